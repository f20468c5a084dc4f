#ifndef TODAMT_TESTFNS_HPP
#define TODAMT_TESTFNS_HPP

#include <optional>
#include <vector>

#include "todamt/functional.hpp"
#include "todamt/surface.hpp"
#include "todamt/weights.hpp"

namespace todamt {

struct BubbleParams {
    Point center;
    double lambda = 2.0;
    double tilde_alpha = 0.0;
    /// Power of (1 + lambda^2 d^2) in the scalar bubble denominator.
    int denominator_power = 4;
};

/// Throws std::invalid_argument unless center is a node, 1 < lambda <= N/8 and tilde_alpha in (-1, 0].
void check_bubble(const SurfaceGrid& grid, const BubbleParams& params);

/// log(lambda^2 / (1 + lambda^2 d^2)^power), not gauged.
Field scalar_bubble_profile(const SurfaceGrid& grid, const BubbleParams& params);
/// scalar_bubble_profile minus its mean.
Field scalar_bubble(const SurfaceGrid& grid, const BubbleParams& params);

/// phi1 = 2 log(lambda^{1+a} / (1 + (lambda d)^{2(1+a)})), phi2 = -phi1/2. Not gauged.
StatePair toda_bubble_profile(const SurfaceGrid& grid, Point p, double lambda, double tilde_alpha);
/// The gauged pair.
StatePair toda_bubble_pair(const SurfaceGrid& grid, Point p, double lambda, double tilde_alpha);

struct LogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // max |value - fit|
};

/// Least squares of value against log(lambda). Needs >= 3 points and distinct lambdas.
LogFit fit_log_slope(const std::vector<std::pair<double, double>>& points);

struct SweepRecord {
    double lambda = 0.0;
    double q_energy = 0.0;
    double mean_u1 = 0.0;
    double mean_u2 = 0.0;
    double log_int_1 = 0.0;
    double log_int_2 = 0.0;
    double j_rho = 0.0;
    double core_fraction = 0.0;  // share of the first density inside B_{10/lambda}(p)
};

struct SweepSlopes {
    LogFit q_energy, mean_u1, mean_u2, log_int_1, log_int_2, j_rho;
};

struct SweepReport {
    Point center;
    double tilde_alpha = 0.0;
    std::vector<SweepRecord> records;  // increasing lambda
    std::vector<double> fit_lambdas;
    SweepSlopes slopes;
    bool fitted = false;  // false when fewer than three lambdas remain for the fit
};

struct SweepOptions {
    std::optional<Point> center;
    bool discard_smallest = true;
    int threads = 1;
};

/**
 * Evaluates the first-component bubble family at every lambda. The bubble sits
 * at the singular point realizing alpha~_1, or at the regular node farthest from
 * all singular points when alpha~_1 = 0, unless a center is given.
 */
SweepReport lambda_sweep(const SurfaceGrid& grid, const SingularConfig& config, const WeightPair& weights,
                         const RhoParams& rho, const std::vector<double>& lambdas, const SweepOptions& opts = {});

/// Center used by lambda_sweep when none is given.
Point default_bubble_center(const SurfaceGrid& grid, const SingularConfig& config);

}  // namespace todamt

#endif  // TODAMT_TESTFNS_HPP

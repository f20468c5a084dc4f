#ifndef TODAMT_ANALYSIS_HPP
#define TODAMT_ANALYSIS_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "todamt/concentration.hpp"
#include "todamt/minimize.hpp"

namespace todamt {

struct BlowupOptions {
    double state_bound = 20.0;
    double mass_fraction = 0.5;
    double radius = 0.1;
};

enum class BlowupTag { compact, single_component, two_point, unclassified };

std::string to_string(BlowupTag t);

struct BlowupScenario {
    BlowupTag tag = BlowupTag::unclassified;
    int component = -1;                 // single_component: 0 or 1
    std::array<std::optional<Point>, 2> points;  // blow-up point of each component
    bool alpha_consistent = true;       // alpha_i(p_i) == alpha~_i for every blow-up point
    std::vector<std::string> evidence;
    BlowupOptions options;
};

/**
 * Reads the last snapshot for masses and every snapshot for max |u|. Needs at
 * least two snapshots; inconclusive evidence gives tag unclassified.
 */
BlowupScenario classify_blowup(const std::vector<ConcentrationSnapshot>& snapshots, const SingularConfig& config,
                               const BlowupOptions& opts = {});
BlowupScenario classify_blowup(const std::vector<MinimizeReport>& reports, const SingularConfig& config,
                               const BlowupOptions& opts = {});

/**
 * Limit profiles G_1, G_2 for the given blow-up points (mean zero). With both
 * points set: G_i = 8 pi (1+a~_i) G_{p_i} - 4 pi (1+a~_j) G_{p_j}. With one point p_i,
 * the other component's normalized density f (from state) stands in for the
 * unknown limit density. Points must be grid nodes.
 */
FieldPair limit_profiles(const SurfaceGrid& grid, const SingularConfig& config,
                         const std::array<std::optional<Point>, 2>& points, const StatePair& state,
                         const WeightPair& weights);

/// max |(u_i - mean u_i) - G_i| over nodes outside the exclusion balls around the blow-up points.
std::array<double, 2> limit_profile_residual(const SurfaceGrid& grid, const StatePair& state,
                                             const SingularConfig& config,
                                             const std::array<std::optional<Point>, 2>& points, double exclusion,
                                             const WeightPair& weights);

/// Uniform radial grid on [0, 1].
struct RadialGrid {
    std::vector<double> r;
    explicit RadialGrid(std::size_t nodes = 2048);
};

struct DiskDeficit {
    double dirichlet = 0.0;       // integral over the disk of |grad u|^2
    double weighted_integral = 0.0;  // integral of |x|^{2 alpha} e^u
    double deficit = 0.0;         // dirichlet - 16 pi (1+alpha) log weighted_integral
};

/**
 * Radial quadrature on the unit disk for u sampled on grid.r. u is treated as
 * piecewise linear for the gradient term; the weighted exponential integral is
 * exact for r^{2 alpha + 1} times the linear interpolant of e^u.
 * Throws std::invalid_argument unless u(1) = 0 and alpha in (-1, 0].
 */
DiskDeficit local_mt_deficit_disk(const RadialGrid& grid, const std::vector<double>& u, double alpha);

/// 2 min{t, 2 (1 + alpha) log(1/r)} on grid.r.
std::vector<double> truncated_log_profile(const RadialGrid& grid, double t, double alpha);

}  // namespace todamt

#endif  // TODAMT_ANALYSIS_HPP

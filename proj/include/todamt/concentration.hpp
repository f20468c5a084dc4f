#ifndef TODAMT_CONCENTRATION_HPP
#define TODAMT_CONCENTRATION_HPP

#include <array>
#include <vector>

#include "todamt/functional.hpp"
#include "todamt/surface.hpp"
#include "todamt/weights.hpp"

namespace todamt {

/// Radii at which concentration masses are reported; classification reads 0.1.
inline constexpr std::array<double, 3> kConcentrationRadii{0.05, 0.1, 0.2};

struct ConcentrationRecord {
    Point point;
    std::size_t point_index = 0;
    double radius = 0.0;
    std::array<double, 2> sigma{};
    std::array<double, 2> alpha{};  // local exponents used in the Pohozaev residual
    double pohozaev_residual = 0.0;
};

/// Concentration data of one state, the input unit of blow-up classification.
struct ConcentrationSnapshot {
    RhoParams rho;
    std::array<double, 2> max_abs{};
    std::vector<ConcentrationRecord> records;
};

/**
 * rho * integral over the open ball d(x,p) < r of the normalized density
 * w e^u / integral w e^u. Requires r >= 4h.
 */
double concentration_mass(const SurfaceGrid& grid, const Field& u, const Field& weight, double rho, Point p, double r);

/// s1^2 - s1 s2 + s2^2 - 4 pi (1 + a1) s1 - 4 pi (1 + a2) s2.
double pohozaev_residual(double sigma1, double sigma2, double a1, double a2);

/**
 * Closed orbit of (0,0) under the two reflections that preserve the zero set
 * along coordinate lines: (s1,s2) -> (s2 + A - s1, s2) and (s1, s1 + B - s2),
 * with A = 4 pi (1 + a1), B = 4 pi (1 + a2). Only nonnegative pairs are kept.
 * Sorted lexicographically.
 */
std::vector<std::array<double, 2>> pohozaev_roots(double a1, double a2);

struct ProbePoint {
    Point point;
    std::array<double, 2> alpha{};
};

/// Singular points of the configuration with their exponents.
std::vector<ProbePoint> probe_points(const SingularConfig& config);

/**
 * Masses at every probe point and every radius in kConcentrationRadii, plus the
 * density maxima of both components when they sit farther than twice the largest
 * radius from every point already listed.
 */
ConcentrationSnapshot collect_concentration(const SurfaceGrid& grid, const StatePair& state, const WeightPair& weights,
                                            const RhoParams& rho, const std::vector<ProbePoint>& probes);

}  // namespace todamt

#endif  // TODAMT_CONCENTRATION_HPP

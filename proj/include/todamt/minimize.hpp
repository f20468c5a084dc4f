#ifndef TODAMT_MINIMIZE_HPP
#define TODAMT_MINIMIZE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "todamt/concentration.hpp"
#include "todamt/functional.hpp"
#include "todamt/surface.hpp"
#include "todamt/weights.hpp"

namespace todamt {

struct MinimizeOptions {
    double tolerance = 1e-7;       // max norm of (-Delta)^{-1} grad J
    int max_iterations = 5000;
    double shrink = 0.5;
    double sufficient_decrease = 1e-4;
    int max_backtracks = 60;
    int memory = 8;                // L-BFGS pairs kept
    double state_bound = 20.0;     // max |u| for divergence
    double drop_bound = 10.0;      // J decrease below its start for divergence

    /// Throws std::invalid_argument on out-of-range values.
    void validate() const;
};

enum class MinimizeStatus { converged, diverged_suspected, iteration_limit };

std::string to_string(MinimizeStatus s);

struct HistoryEntry {
    int iter = 0;
    double j_rho = 0.0;
    double grad_norm = 0.0;
    double max_u1 = 0.0;
    double max_u2 = 0.0;
};

struct MinimizeReport {
    MinimizeStatus status = MinimizeStatus::iteration_limit;
    RhoParams rho;
    EnergyBreakdown energy;
    double initial_energy = 0.0;
    double grad_norm = 0.0;    // preconditioned, max norm
    double el_residual = 0.0;  // max norm
    int iterations = 0;
    StatePair state;
    std::vector<HistoryEntry> history;
    ConcentrationSnapshot concentration;
    bool suspicious_decrease = false;  // J fell past the drop bound with bounded state
    bool line_search_failed = false;   // no decrease found along the steepest direction either
    MinimizeOptions options;
};

/**
 * Preconditioned L-BFGS on gauge-fixed states. The preconditioner is (-Delta)^{-1}
 * per component, inner products are L2 on the torus, and steps are accepted by
 * Armijo backtracking on the exact energy increment. Every iterate is projected
 * to mean zero.
 *
 * Converged means max |(-Delta)^{-1} grad| <= tolerance and max |EL residual| <= 10 tolerance.
 * Throws EvaluationError if the initial energy is not finite.
 */
MinimizeReport minimize_j(const SurfaceGrid& grid, const WeightPair& weights, const RhoParams& rho,
                          const StatePair& init, const MinimizeOptions& opts = {},
                          const std::vector<ProbePoint>& probes = {});

struct DivergenceSample {
    double j_rho = 0.0;
    double max_abs = 0.0;
};

/// True iff some sample has J below the first sample by more than drop_bound while max |u| > state_bound.
bool detect_divergence(const std::vector<DivergenceSample>& history, double state_bound = 20.0,
                       double drop_bound = 10.0);
/// J dropped past drop_bound without max |u| ever exceeding state_bound.
bool detect_suspicious_decrease(const std::vector<DivergenceSample>& history, double state_bound = 20.0,
                                double drop_bound = 10.0);

/**
 * Warm-started minimization along an increasing rho path inside (0, critical].
 * The first step starts from init.
 */
std::vector<MinimizeReport> continuation(const SurfaceGrid& grid, const SingularConfig& config,
                                         const WeightPair& weights, const std::vector<RhoParams>& path,
                                         const StatePair& init, const MinimizeOptions& opts = {});

/// Gauged smooth random state: Gaussian modes damped by exp(-|k|/2), scaled to max |u| = amplitude.
StatePair random_smooth_state(const SurfaceGrid& grid, std::uint64_t seed, double amplitude = 2.0);

}  // namespace todamt

#endif  // TODAMT_MINIMIZE_HPP

#ifndef TODAMT_FUNCTIONAL_HPP
#define TODAMT_FUNCTIONAL_HPP

#include <array>
#include <stdexcept>
#include <string>

#include "todamt/surface.hpp"
#include "todamt/weights.hpp"

namespace todamt {

/// Raised when log of integral h e^u cannot be evaluated (non-finite state or vanishing integral).
class EvaluationError : public std::runtime_error {
public:
    explicit EvaluationError(const std::string& what) : std::runtime_error(what) {}
};

struct RhoParams {
    std::array<double, 2> value{};

    RhoParams() = default;
    RhoParams(double rho1, double rho2);

    double operator[](int i) const { return value[static_cast<std::size_t>(i)]; }
    RhoParams scaled(double s) const { return {value[0] * s, value[1] * s}; }
};

/// A pair (u1, u2). Gauge-fixed states have mean-zero components.
struct StatePair {
    Field u1;
    Field u2;

    const Field& operator[](int i) const { return i == 0 ? u1 : u2; }
    double max_abs() const;
    bool is_gauged(double tol = 1e-10) const;
};

/// Subtracts the mean of each component.
StatePair gauge_fixed(const Field& u1, const Field& u2);

using WeightPair = std::array<const WeightField*, 2>;

struct EnergyBreakdown {
    double q_term = 0.0;
    std::array<double, 2> average_terms{};  // rho_i * mean(u_i)
    std::array<double, 2> log_terms{};      // rho_i * log integral h_i e^{u_i}
    double total = 0.0;
};

/// log integral w e^u, evaluated as max(u) + log integral w e^{u - max(u)}.
double log_integral_exp(const SurfaceGrid& grid, const Field& u, const Field& weight);

/// w e^u / integral w e^u.
Field normalized_density(const SurfaceGrid& grid, const Field& u, const Field& weight);

/**
 * J_rho(u1,u2) = integral Q(u1,u2) + sum_i rho_i (mean(u_i) - log integral h_i e^{u_i}).
 * Accepts states that are not gauge-fixed; the value is invariant under constant shifts.
 */
EnergyBreakdown j_rho(const SurfaceGrid& grid, const StatePair& state, const WeightPair& weights,
                      const RhoParams& rho);

struct FieldPair {
    Field first;
    Field second;
    const Field& operator[](int i) const { return i == 0 ? first : second; }
};

/**
 * L2 gradient of J_rho: -(2 Delta u_i + Delta u_{3-i}) / 3 - rho_i (h_i e^{u_i} / int h_i e^{u_i} - 1).
 * Both components have zero mean.
 */
FieldPair grad_j_rho(const SurfaceGrid& grid, const StatePair& state, const WeightPair& weights,
                     const RhoParams& rho);

/// Residual of the regularized Toda system, i.e. -Delta u_i - 2 rho_i (n_i - 1) + rho_{3-i} (n_{3-i} - 1).
FieldPair euler_lagrange_residual(const SurfaceGrid& grid, const StatePair& state, const WeightPair& weights,
                                  const RhoParams& rho);

/// Energy, gradient and Euler-Lagrange residual from one set of transforms.
struct FunctionalEvaluation {
    EnergyBreakdown energy;
    FieldPair gradient;
    FieldPair residual;
};

FunctionalEvaluation evaluate_functional(const SurfaceGrid& grid, const StatePair& state, const WeightPair& weights,
                                         const RhoParams& rho);

/// Applies the Cartan matrix (2,-1;-1,2) componentwise.
FieldPair apply_cartan(const FieldPair& f);

/// (4 pi (1 + alpha~_1), 4 pi (1 + alpha~_2)).
RhoParams critical_rho(const SingularConfig& config);

struct ScalarDeficit {
    double dirichlet = 0.0;   // integral |grad u|^2
    double log_term = 0.0;    // 16 pi (1 + alpha~) log integral h e^{u - mean u}
    double deficit = 0.0;     // dirichlet - log_term
};

ScalarDeficit scalar_mt_deficit(const SurfaceGrid& grid, const Field& u, const WeightField& w, double alpha_tilde);

/**
 * Cancellation-free J(u + s d) - J(u). The quadratic part is expanded exactly in
 * s and the entropy part uses log1p/expm1 against the current density, so the
 * increment keeps full relative precision even when it is far below |J|.
 */
class EnergyIncrement {
public:
    EnergyIncrement(const SurfaceGrid& grid, const StatePair& state, const FieldPair& direction,
                    const WeightPair& weights, const RhoParams& rho);

    double operator()(double step) const;
    /// d/ds at s = 0.
    double slope() const { return slope_; }

private:
    FieldPair direction_;
    std::array<Field, 2> density_;  // normalized density times quadrature weight
    RhoParams rho_;
    double linear_q_ = 0.0;
    double quadratic_q_ = 0.0;
    std::array<double, 2> direction_mean_{};
    double slope_ = 0.0;
};

}  // namespace todamt

#endif  // TODAMT_FUNCTIONAL_HPP

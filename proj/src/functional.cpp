#include "todamt/functional.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace todamt {

namespace {

constexpr double kPi = std::numbers::pi;

void check_weights(const WeightPair& weights) {
    if (weights[0] == nullptr || weights[1] == nullptr) throw std::invalid_argument("missing weight field");
}

// Laplacians of both components plus energy from shared spectra.
struct Spectral {
    Spectrum s1, s2;
};

}  // namespace

RhoParams::RhoParams(double rho1, double rho2) : value{rho1, rho2} {
    for (double r : value) {
        if (!std::isfinite(r) || !(r > 0.0)) {
            std::ostringstream msg;
            msg << "rho must be positive (got " << r << ")";
            throw std::invalid_argument(msg.str());
        }
    }
}

double StatePair::max_abs() const { return std::max(u1.max_abs(), u2.max_abs()); }

bool StatePair::is_gauged(double tol) const { return std::abs(u1.mean()) < tol && std::abs(u2.mean()) < tol; }

StatePair gauge_fixed(const Field& u1, const Field& u2) { return {u1.centered(), u2.centered()}; }

double log_integral_exp(const SurfaceGrid& grid, const Field& u, const Field& weight) {
    if (u.size() != grid.size() || weight.size() != grid.size()) throw std::invalid_argument("field does not match grid");
    if (!u.all_finite()) throw EvaluationError("state has non-finite values; rescale the initial guess");
    const double top = u.max();
    std::vector<double> terms(u.size());
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = weight[i] * std::exp(u[i] - top);
    const double integral = stable_sum(terms) * grid.quadrature_weight();
    if (!std::isfinite(integral) || !(integral > 0.0)) {
        std::ostringstream msg;
        msg << "exponential integral is not representable (max u = " << top << "); rescale the state";
        throw EvaluationError(msg.str());
    }
    return top + std::log(integral);
}

Field normalized_density(const SurfaceGrid& grid, const Field& u, const Field& weight) {
    const double log_int = log_integral_exp(grid, u, weight);
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = weight[i] * std::exp(u[i] - log_int);
    return Field(std::move(v));
}

EnergyBreakdown j_rho(const SurfaceGrid& grid, const StatePair& state, const WeightPair& weights,
                      const RhoParams& rho) {
    check_weights(weights);
    EnergyBreakdown e;
    e.q_term = grid.q_energy(state.u1, state.u2);
    e.total = e.q_term;
    for (int i = 0; i < 2; ++i) {
        e.average_terms[i] = rho[i] * grid.integrate(state[i]);
        e.log_terms[i] = rho[i] * log_integral_exp(grid, state[i], weights[i]->values);
        e.total += e.average_terms[i] - e.log_terms[i];
    }
    return e;
}

FunctionalEvaluation evaluate_functional(const SurfaceGrid& grid, const StatePair& state, const WeightPair& weights,
                                         const RhoParams& rho) {
    check_weights(weights);
    FunctionalEvaluation out;
    const Spectrum s1 = grid.forward(state.u1);
    const Spectrum s2 = grid.forward(state.u2);
    out.energy.q_term = grid.q_energy(s1, s2);
    out.energy.total = out.energy.q_term;

    std::array<Spectrum, 2> lap{s1, s2};
    const std::size_t cols = grid.spectrum_columns();
    for (auto& s : lap) {
        for (int j = 0; j < grid.n(); ++j) {
            const int ky = grid.row_frequency(j);
            for (int kx = 0; kx <= grid.n() / 2; ++kx) s[static_cast<std::size_t>(j) * cols + kx] *= -SurfaceGrid::multiplier(kx, ky);
        }
    }
    const std::array<Field, 2> laplacian{grid.inverse(lap[0]), grid.inverse(lap[1])};

    std::array<std::vector<double>, 2> excess;  // normalized density minus one
    for (int i = 0; i < 2; ++i) {
        const double log_int = log_integral_exp(grid, state[i], weights[i]->values);
        out.energy.average_terms[i] = rho[i] * grid.integrate(state[i]);
        out.energy.log_terms[i] = rho[i] * log_int;
        out.energy.total += out.energy.average_terms[i] - out.energy.log_terms[i];
        const Field& w = weights[i]->values;
        excess[i].resize(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) excess[i][k] = w[k] * std::exp(state[i][k] - log_int) - 1.0;
    }

    std::array<std::vector<double>, 2> grad, res;
    for (int i = 0; i < 2; ++i) {
        const int o = 1 - i;
        grad[i].resize(grid.size());
        res[i].resize(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            grad[i][k] = -(2.0 * laplacian[i][k] + laplacian[o][k]) / 3.0 - rho[i] * excess[i][k];
            res[i][k] = -laplacian[i][k] - 2.0 * rho[i] * excess[i][k] + rho[o] * excess[o][k];
        }
    }
    out.gradient = {Field(std::move(grad[0])).centered(), Field(std::move(grad[1])).centered()};
    out.residual = {Field(std::move(res[0])), Field(std::move(res[1]))};
    return out;
}

FieldPair grad_j_rho(const SurfaceGrid& grid, const StatePair& state, const WeightPair& weights,
                     const RhoParams& rho) {
    return evaluate_functional(grid, state, weights, rho).gradient;
}

FieldPair euler_lagrange_residual(const SurfaceGrid& grid, const StatePair& state, const WeightPair& weights,
                                  const RhoParams& rho) {
    return evaluate_functional(grid, state, weights, rho).residual;
}

FieldPair apply_cartan(const FieldPair& f) {
    return {axpy(f.first.scaled(2.0), -1.0, f.second), axpy(f.second.scaled(2.0), -1.0, f.first)};
}

RhoParams critical_rho(const SingularConfig& config) {
    return {4.0 * kPi * (1.0 + tilde_alpha(config, 0)), 4.0 * kPi * (1.0 + tilde_alpha(config, 1))};
}

ScalarDeficit scalar_mt_deficit(const SurfaceGrid& grid, const Field& u, const WeightField& w, double alpha_tilde) {
    if (!(alpha_tilde > -1.0) || alpha_tilde > 0.0) throw std::invalid_argument("alpha~ must lie in (-1, 0]");
    ScalarDeficit d;
    d.dirichlet = grid.dirichlet_energy(u);
    d.log_term = 16.0 * kPi * (1.0 + alpha_tilde) * log_integral_exp(grid, u.centered(), w.values);
    d.deficit = d.dirichlet - d.log_term;
    return d;
}

// ---------------------------------------------------------------------------

EnergyIncrement::EnergyIncrement(const SurfaceGrid& grid, const StatePair& state, const FieldPair& direction,
                                 const WeightPair& weights, const RhoParams& rho)
    : direction_(direction), rho_(rho) {
    check_weights(weights);
    const Spectrum u1 = grid.forward(state.u1);
    const Spectrum u2 = grid.forward(state.u2);
    const Spectrum d1 = grid.forward(direction.first);
    const Spectrum d2 = grid.forward(direction.second);
    linear_q_ = (2.0 * grid.energy_form(u1, d1) + 2.0 * grid.energy_form(u2, d2) + grid.energy_form(u1, d2) +
                 grid.energy_form(d1, u2)) /
                3.0;
    quadratic_q_ = (grid.energy_form(d1, d1) + grid.energy_form(d2, d2) + grid.energy_form(d1, d2)) / 3.0;
    slope_ = linear_q_;
    for (int i = 0; i < 2; ++i) {
        density_[i] = normalized_density(grid, state[i], weights[i]->values).scaled(grid.quadrature_weight());
        direction_mean_[i] = grid.integrate(direction[i]);
        std::vector<double> terms(grid.size());
        for (std::size_t k = 0; k < terms.size(); ++k) terms[k] = density_[i][k] * direction[i][k];
        slope_ += rho[i] * (direction_mean_[i] - stable_sum(terms));
    }
}

double EnergyIncrement::operator()(double step) const {
    double total = step * linear_q_ + step * step * quadratic_q_;
    std::vector<double> terms(density_[0].size());
    for (int i = 0; i < 2; ++i) {
        const Field& d = direction_[i];
        for (std::size_t k = 0; k < terms.size(); ++k) terms[k] = density_[i][k] * std::expm1(step * d[k]);
        total += rho_[i] * (step * direction_mean_[i] - std::log1p(stable_sum(terms)));
    }
    return total;
}

}  // namespace todamt

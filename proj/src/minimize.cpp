#include "todamt/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <sstream>
#include <stdexcept>

namespace todamt {

namespace {

double dot(const SurfaceGrid& grid, const FieldPair& a, const FieldPair& b) {
    std::vector<double> terms(2 * grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        terms[k] = a.first[k] * b.first[k];
        terms[grid.size() + k] = a.second[k] * b.second[k];
    }
    return stable_sum(terms) * grid.quadrature_weight();
}

FieldPair combine(const FieldPair& a, double s, const FieldPair& b) {
    return {axpy(a.first, s, b.first), axpy(a.second, s, b.second)};
}

FieldPair scale(const FieldPair& a, double s) { return {a.first.scaled(s), a.second.scaled(s)}; }

FieldPair precondition(const SurfaceGrid& grid, const FieldPair& g) {
    return {grid.inverse_neg_laplacian_projected(g.first), grid.inverse_neg_laplacian_projected(g.second)};
}

double max_norm(const FieldPair& f) { return std::max(f.first.max_abs(), f.second.max_abs()); }

struct Curvature {
    FieldPair s, y;
    double sy = 0.0;
};

FieldPair lbfgs_direction(const SurfaceGrid& grid, const std::deque<Curvature>& memory, const FieldPair& g) {
    FieldPair q = g;
    std::vector<double> alphas(memory.size());
    for (std::size_t k = memory.size(); k-- > 0;) {
        alphas[k] = dot(grid, memory[k].s, q) / memory[k].sy;
        q = combine(q, -alphas[k], memory[k].y);
    }
    FieldPair r = precondition(grid, q);
    if (!memory.empty()) {
        const Curvature& last = memory.back();
        const double yPy = dot(grid, last.y, precondition(grid, last.y));
        r = scale(r, last.sy / yPy);
    }
    for (std::size_t k = 0; k < memory.size(); ++k) {
        const double beta = dot(grid, memory[k].y, r) / memory[k].sy;
        r = combine(r, alphas[k] - beta, memory[k].s);
    }
    return scale(r, -1.0);
}

std::vector<DivergenceSample> samples(const std::vector<HistoryEntry>& history) {
    std::vector<DivergenceSample> out;
    for (const HistoryEntry& h : history) out.push_back({h.j_rho, std::max(h.max_u1, h.max_u2)});
    return out;
}

}  // namespace

void MinimizeOptions::validate() const {
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (max_iterations < 0) throw std::invalid_argument("max_iterations must be nonnegative");
    if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("shrink must lie in (0,1)");
    if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0))
        throw std::invalid_argument("sufficient decrease constant must lie in (0,1)");
    if (max_backtracks < 1) throw std::invalid_argument("max_backtracks must be positive");
    if (memory < 0) throw std::invalid_argument("memory must be nonnegative");
    if (!(state_bound > 0.0) || !(drop_bound > 0.0)) throw std::invalid_argument("divergence bounds must be positive");
}

std::string to_string(MinimizeStatus s) {
    switch (s) {
        case MinimizeStatus::converged: return "converged";
        case MinimizeStatus::diverged_suspected: return "diverged-suspected";
        case MinimizeStatus::iteration_limit: return "iteration-limit";
    }
    return "unknown";
}

bool detect_divergence(const std::vector<DivergenceSample>& history, double state_bound, double drop_bound) {
    if (history.size() < 2) throw std::invalid_argument("divergence test needs at least two samples");
    const double j0 = history.front().j_rho;
    return std::any_of(history.begin() + 1, history.end(), [&](const DivergenceSample& s) {
        return s.j_rho - j0 < -drop_bound && s.max_abs > state_bound;
    });
}

bool detect_suspicious_decrease(const std::vector<DivergenceSample>& history, double state_bound, double drop_bound) {
    if (history.size() < 2) throw std::invalid_argument("divergence test needs at least two samples");
    const double j0 = history.front().j_rho;
    const bool dropped = std::any_of(history.begin() + 1, history.end(),
                                     [&](const DivergenceSample& s) { return s.j_rho - j0 < -drop_bound; });
    const bool grew = std::any_of(history.begin(), history.end(),
                                  [&](const DivergenceSample& s) { return s.max_abs > state_bound; });
    return dropped && !grew;
}

MinimizeReport minimize_j(const SurfaceGrid& grid, const WeightPair& weights, const RhoParams& rho,
                          const StatePair& init, const MinimizeOptions& opts, const std::vector<ProbePoint>& probes) {
    opts.validate();
    MinimizeReport report;
    report.rho = rho;
    report.options = opts;

    StatePair state = gauge_fixed(init.u1, init.u2);
    FunctionalEvaluation eval = evaluate_functional(grid, state, weights, rho);
    if (!std::isfinite(eval.energy.total)) throw EvaluationError("initial energy is not finite");
    report.initial_energy = eval.energy.total;

    std::deque<Curvature> memory;
    int iter = 0;
    for (;; ++iter) {
        const FieldPair pg = precondition(grid, eval.gradient);
        report.grad_norm = max_norm(pg);
        report.el_residual = max_norm(eval.residual);
        report.history.push_back({iter, eval.energy.total, report.grad_norm, state.u1.max_abs(), state.u2.max_abs()});

        if (report.grad_norm <= opts.tolerance && report.el_residual <= 10.0 * opts.tolerance) {
            report.status = MinimizeStatus::converged;
            break;
        }
        if (eval.energy.total - report.initial_energy < -opts.drop_bound && state.max_abs() > opts.state_bound) {
            report.status = MinimizeStatus::diverged_suspected;
            break;
        }
        if (iter >= opts.max_iterations) break;

        FieldPair direction = lbfgs_direction(grid, memory, eval.gradient);
        double slope = dot(grid, eval.gradient, direction);
        if (!(slope < 0.0)) {
            memory.clear();
            direction = scale(pg, -1.0);
            slope = dot(grid, eval.gradient, direction);
        }

        double step = 0.0;
        for (int attempt = 0; attempt < 2 && step == 0.0; ++attempt) {
            const EnergyIncrement increment(grid, state, direction, weights, rho);
            double s = 1.0;
            for (int k = 0; k < opts.max_backtracks; ++k, s *= opts.shrink) {
                const double inc = increment(s);
                if (inc < 0.0 && inc <= opts.sufficient_decrease * s * slope) {
                    step = s;
                    break;
                }
            }
            if (step == 0.0 && !memory.empty()) {
                memory.clear();
                direction = scale(pg, -1.0);
                slope = dot(grid, eval.gradient, direction);
            } else {
                break;
            }
        }
        if (step == 0.0) {
            report.line_search_failed = true;
            break;
        }

        StatePair next = gauge_fixed(axpy(state.u1, step, direction.first), axpy(state.u2, step, direction.second));
        FunctionalEvaluation next_eval = evaluate_functional(grid, next, weights, rho);
        Curvature c{{next.u1 - state.u1, next.u2 - state.u2},
                    {next_eval.gradient.first - eval.gradient.first, next_eval.gradient.second - eval.gradient.second}};
        c.sy = dot(grid, c.s, c.y);
        if (c.sy > 0.0 && opts.memory > 0) {
            memory.push_back(std::move(c));
            if (memory.size() > static_cast<std::size_t>(opts.memory)) memory.pop_front();
        }
        state = std::move(next);
        eval = std::move(next_eval);
    }

    report.iterations = iter;
    report.energy = eval.energy;
    report.suspicious_decrease =
        report.history.size() >= 2 && detect_suspicious_decrease(samples(report.history), opts.state_bound, opts.drop_bound);
    report.concentration = collect_concentration(grid, state, weights, rho, probes);
    report.state = std::move(state);
    return report;
}

std::vector<MinimizeReport> continuation(const SurfaceGrid& grid, const SingularConfig& config,
                                         const WeightPair& weights, const std::vector<RhoParams>& path,
                                         const StatePair& init, const MinimizeOptions& opts) {
    if (path.empty()) throw std::invalid_argument("continuation path is empty");
    const RhoParams critical = critical_rho(config);
    for (std::size_t k = 0; k < path.size(); ++k) {
        for (int i = 0; i < 2; ++i) {
            if (path[k][i] > critical[i] * (1.0 + 1e-12)) {
                std::ostringstream msg;
                msg << "continuation step " << k << ": rho_" << i + 1 << " = " << path[k][i]
                    << " exceeds the critical value " << critical[i];
                throw std::invalid_argument(msg.str());
            }
        }
        if (k > 0) {
            const bool nondecreasing = path[k][0] >= path[k - 1][0] && path[k][1] >= path[k - 1][1];
            const bool moved = path[k][0] > path[k - 1][0] || path[k][1] > path[k - 1][1];
            if (!nondecreasing || !moved) {
                std::ostringstream msg;
                msg << "continuation step " << k << ": rho path must be increasing";
                throw std::invalid_argument(msg.str());
            }
        }
    }
    const std::vector<ProbePoint> probes = probe_points(config);
    std::vector<MinimizeReport> reports;
    StatePair start = init;
    for (std::size_t k = 0; k < path.size(); ++k) {
        try {
            reports.push_back(minimize_j(grid, weights, path[k], start, opts, probes));
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "continuation step " << k << ": " << e.what();
            throw EvaluationError(msg.str());
        }
        start = reports.back().state;
    }
    return reports;
}

StatePair random_smooth_state(const SurfaceGrid& grid, std::uint64_t seed, double amplitude) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::array<Field, 2> out;
    const std::size_t cols = grid.spectrum_columns();
    for (auto& f : out) {
        std::vector<double> noise(grid.size());
        for (double& v : noise) v = normal(rng);
        Spectrum s = grid.forward(Field(std::move(noise)));
        for (int j = 0; j < grid.n(); ++j) {
            const int ky = grid.row_frequency(j);
            for (int kx = 0; kx <= grid.n() / 2; ++kx)
                s[static_cast<std::size_t>(j) * cols + kx] *= std::exp(-0.5 * std::hypot(kx, ky));
        }
        s[0] = 0.0;
        const Field smooth = grid.inverse(s);
        f = smooth.scaled(amplitude / smooth.max_abs());
    }
    return gauge_fixed(out[0], out[1]);
}

}  // namespace todamt

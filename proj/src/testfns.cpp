#include "todamt/testfns.hpp"
#include "todamt/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace todamt {

void check_bubble(const SurfaceGrid& grid, const BubbleParams& params) {
    if (!grid.is_node(params.center)) throw std::invalid_argument("bubble center must be a grid node");
    if (!(params.lambda > 1.0) || params.lambda > grid.n() / 8.0) {
        std::ostringstream msg;
        msg << "lambda " << params.lambda << " outside (1, N/8] for N = " << grid.n();
        throw std::invalid_argument(msg.str());
    }
    if (!(params.tilde_alpha > -1.0) || params.tilde_alpha > 0.0)
        throw std::invalid_argument("bubble exponent must lie in (-1, 0]");
    if (params.denominator_power < 1) throw std::invalid_argument("denominator power must be positive");
}

Field scalar_bubble_profile(const SurfaceGrid& grid, const BubbleParams& params) {
    check_bubble(grid, params);
    const double lam2 = params.lambda * params.lambda;
    const double power = params.denominator_power;
    return grid.sample([&](Point x) {
        const double d = torus_distance(x, params.center);
        return std::log(lam2) - power * std::log1p(lam2 * d * d);
    });
}

Field scalar_bubble(const SurfaceGrid& grid, const BubbleParams& params) {
    return scalar_bubble_profile(grid, params).centered();
}

StatePair toda_bubble_profile(const SurfaceGrid& grid, Point p, double lambda, double tilde_alpha) {
    check_bubble(grid, {p, lambda, tilde_alpha, 4});
    const double a1 = 1.0 + tilde_alpha;
    Field phi = grid.sample([&](Point x) {
        const double d = torus_distance(x, p);
        return 2.0 * (a1 * std::log(lambda) - std::log1p(std::pow(lambda * d, 2.0 * a1)));
    });
    Field half = phi.scaled(-0.5);
    return {std::move(phi), std::move(half)};
}

StatePair toda_bubble_pair(const SurfaceGrid& grid, Point p, double lambda, double tilde_alpha) {
    const StatePair raw = toda_bubble_profile(grid, p, lambda, tilde_alpha);
    return gauge_fixed(raw.u1, raw.u2);
}

LogFit fit_log_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_log_slope needs at least three points");
    std::vector<double> xs;
    for (const auto& [lam, v] : points) {
        if (!(lam > 0.0)) throw std::invalid_argument("fit_log_slope: lambda must be positive");
        xs.push_back(std::log(lam));
    }
    const double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        mx += xs[i];
        my += points[i].second;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (points[i].second - my);
    }
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || !(sxx > 0.0))
        throw std::invalid_argument("fit_log_slope: abscissas must be distinct");
    LogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t i = 0; i < points.size(); ++i)
        fit.residual = std::max(fit.residual, std::abs(points[i].second - fit.intercept - fit.slope * xs[i]));
    return fit;
}

Point default_bubble_center(const SurfaceGrid& grid, const SingularConfig& config) {
    const double at = tilde_alpha(config, 0);
    if (at < 0.0) {
        for (std::size_t j = 0; j < config.size(); ++j)
            if (config.alpha(0, j) == at) return config.point(j);
    }
    if (config.size() == 0) return grid.node(grid.node_index(grid.n() / 2, grid.n() / 2));
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double d = 1.0;
        for (const Point& p : config.points()) d = std::min(d, torus_distance(grid.node(k), p));
        if (d > best_d + 1e-12) {
            best_d = d;
            best = k;
        }
    }
    return grid.node(best);
}

namespace {

SweepRecord evaluate_lambda(const SurfaceGrid& grid, Point center, double tilde, const WeightPair& weights,
                            const RhoParams& rho, double lambda) {
    const StatePair raw = toda_bubble_profile(grid, center, lambda, tilde);
    SweepRecord r;
    r.lambda = lambda;
    r.q_energy = grid.q_energy(raw.u1, raw.u2);
    r.mean_u1 = raw.u1.mean();
    r.mean_u2 = raw.u2.mean();
    r.log_int_1 = log_integral_exp(grid, raw.u1, weights[0]->values);
    r.log_int_2 = log_integral_exp(grid, raw.u2, weights[1]->values);
    r.j_rho = j_rho(grid, raw, weights, rho).total;
    const Field density = normalized_density(grid, raw.u1, weights[0]->values);
    std::vector<double> inside(grid.size(), 0.0);
    for (std::size_t k = 0; k < grid.size(); ++k)
        if (torus_distance(grid.node(k), center) < 10.0 / lambda) inside[k] = density[k];
    r.core_fraction = stable_sum(inside) * grid.quadrature_weight();
    return r;
}

}  // namespace

SweepReport lambda_sweep(const SurfaceGrid& grid, const SingularConfig& config, const WeightPair& weights,
                         const RhoParams& rho, const std::vector<double>& lambdas, const SweepOptions& opts) {
    if (weights[0] == nullptr || weights[1] == nullptr) throw std::invalid_argument("missing weight field");
    if (lambdas.empty()) throw std::invalid_argument("lambda list is empty");
    for (std::size_t i = 1; i < lambdas.size(); ++i)
        if (!(lambdas[i] > lambdas[i - 1])) throw std::invalid_argument("lambda list must be strictly increasing");

    SweepReport report;
    report.tilde_alpha = tilde_alpha(config, 0);
    report.center = opts.center ? grid.node(grid.nearest_node(*opts.center)) : default_bubble_center(grid, config);
    for (double lam : lambdas) check_bubble(grid, {report.center, lam, report.tilde_alpha, 4});

    report.records.resize(lambdas.size());
    parallel_for(lambdas.size(), opts.threads, [&](std::size_t i) {
        try {
            report.records[i] = evaluate_lambda(grid, report.center, report.tilde_alpha, weights, rho, lambdas[i]);
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "lambda " << lambdas[i] << ": " << e.what();
            throw EvaluationError(msg.str());
        }
    });

    const std::size_t first = opts.discard_smallest && lambdas.size() > 3 ? 1 : 0;
    std::vector<std::pair<double, double>> q, m1, m2, l1, l2, j;
    for (std::size_t i = first; i < report.records.size(); ++i) {
        const SweepRecord& r = report.records[i];
        report.fit_lambdas.push_back(r.lambda);
        q.emplace_back(r.lambda, r.q_energy);
        m1.emplace_back(r.lambda, r.mean_u1);
        m2.emplace_back(r.lambda, r.mean_u2);
        l1.emplace_back(r.lambda, r.log_int_1);
        l2.emplace_back(r.lambda, r.log_int_2);
        j.emplace_back(r.lambda, r.j_rho);
    }
    if (q.size() >= 3) {
        report.fitted = true;
        report.slopes = {fit_log_slope(q),  fit_log_slope(m1), fit_log_slope(m2),
                         fit_log_slope(l1), fit_log_slope(l2), fit_log_slope(j)};
    }
    return report;
}

}  // namespace todamt

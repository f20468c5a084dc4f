#include "todamt/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace todamt {

namespace {
constexpr double kPi = std::numbers::pi;
}

double concentration_mass(const SurfaceGrid& grid, const Field& u, const Field& weight, double rho, Point p,
                          double r) {
    if (r < 4.0 * grid.spacing() - 1e-12) {
        std::ostringstream msg;
        msg << "radius " << r << " is below 4 grid spacings";
        throw std::invalid_argument(msg.str());
    }
    const Field density = normalized_density(grid, u, weight);
    std::vector<double> inside(grid.size(), 0.0);
    for (std::size_t k = 0; k < grid.size(); ++k)
        if (torus_distance(grid.node(k), p) < r) inside[k] = density[k];
    return rho * stable_sum(inside) * grid.quadrature_weight();
}

double pohozaev_residual(double sigma1, double sigma2, double a1, double a2) {
    return sigma1 * sigma1 - sigma1 * sigma2 + sigma2 * sigma2 - 4.0 * kPi * (1.0 + a1) * sigma1 -
           4.0 * kPi * (1.0 + a2) * sigma2;
}

std::vector<std::array<double, 2>> pohozaev_roots(double a1, double a2) {
    if (!(a1 > -1.0) || !(a2 > -1.0)) throw std::invalid_argument("exponent must exceed -1");
    const double A = 4.0 * kPi * (1.0 + a1);
    const double B = 4.0 * kPi * (1.0 + a2);
    const double tol = 1e-9 * (A + B);
    std::vector<std::array<double, 2>> roots{{0.0, 0.0}};
    auto known = [&](const std::array<double, 2>& c) {
        return std::any_of(roots.begin(), roots.end(), [&](const auto& r) {
            return std::abs(r[0] - c[0]) <= tol && std::abs(r[1] - c[1]) <= tol;
        });
    };
    for (std::size_t i = 0; i < roots.size(); ++i) {
        const auto [s1, s2] = roots[i];
        for (const std::array<double, 2>& c : {std::array<double, 2>{s2 + A - s1, s2}, {s1, s1 + B - s2}}) {
            if (c[0] < -tol || c[1] < -tol || known(c)) continue;
            roots.push_back({std::max(c[0], 0.0), std::max(c[1], 0.0)});
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::vector<ProbePoint> probe_points(const SingularConfig& config) {
    std::vector<ProbePoint> out;
    for (std::size_t j = 0; j < config.size(); ++j)
        out.push_back({config.point(j), {config.alpha(0, j), config.alpha(1, j)}});
    return out;
}

ConcentrationSnapshot collect_concentration(const SurfaceGrid& grid, const StatePair& state, const WeightPair& weights,
                                            const RhoParams& rho, const std::vector<ProbePoint>& probes) {
    ConcentrationSnapshot snap;
    snap.rho = rho;
    snap.max_abs = {state.u1.max_abs(), state.u2.max_abs()};
    const std::array<Field, 2> density{normalized_density(grid, state.u1, weights[0]->values),
                                       normalized_density(grid, state.u2, weights[1]->values)};

    std::vector<ProbePoint> points = probes;
    const double separation = 2.0 * kConcentrationRadii.back();
    for (int i = 0; i < 2; ++i) {
        const auto values = density[i].values();
        const std::size_t peak = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
        const Point p = grid.node(peak);
        const bool isolated = std::all_of(points.begin(), points.end(),
                                          [&](const ProbePoint& q) { return torus_distance(p, q.point) > separation; });
        if (isolated) points.push_back({p, {0.0, 0.0}});
    }

    for (std::size_t j = 0; j < points.size(); ++j) {
        const Field dist = grid.distance_field(points[j].point);
        for (double r : kConcentrationRadii) {
            ConcentrationRecord rec;
            rec.point = points[j].point;
            rec.point_index = j;
            rec.radius = r;
            rec.alpha = points[j].alpha;
            for (int i = 0; i < 2; ++i) {
                std::vector<double> inside(grid.size(), 0.0);
                for (std::size_t k = 0; k < grid.size(); ++k)
                    if (dist[k] < r) inside[k] = density[i][k];
                rec.sigma[i] = rho[i] * stable_sum(inside) * grid.quadrature_weight();
            }
            rec.pohozaev_residual = pohozaev_residual(rec.sigma[0], rec.sigma[1], rec.alpha[0], rec.alpha[1]);
            snap.records.push_back(rec);
        }
    }
    return snap;
}

}  // namespace todamt

#include "todamt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace todamt {

namespace {

constexpr double kPi = std::numbers::pi;

std::string describe(Point p) {
    std::ostringstream s;
    s << "(" << p.x << ", " << p.y << ")";
    return s.str();
}

}  // namespace

std::string to_string(BlowupTag t) {
    switch (t) {
        case BlowupTag::compact: return "compact";
        case BlowupTag::single_component: return "single-component";
        case BlowupTag::two_point: return "two-point";
        case BlowupTag::unclassified: return "unclassified";
    }
    return "unknown";
}

BlowupScenario classify_blowup(const std::vector<ConcentrationSnapshot>& snapshots, const SingularConfig& config,
                               const BlowupOptions& opts) {
    if (snapshots.size() < 2) throw std::invalid_argument("classification needs at least two snapshots");
    BlowupScenario out;
    out.options = opts;

    double peak = 0.0;
    for (const auto& s : snapshots) peak = std::max({peak, s.max_abs[0], s.max_abs[1]});
    if (peak <= opts.state_bound) {
        out.tag = BlowupTag::compact;
        std::ostringstream e;
        e << "max |u| = " << peak << " stays within " << opts.state_bound;
        out.evidence.push_back(e.str());
        return out;
    }

    const ConcentrationSnapshot& last = snapshots.back();
    std::array<std::vector<const ConcentrationRecord*>, 2> heavy;
    bool radius_found = false;
    for (const auto& rec : last.records) {
        if (std::abs(rec.radius - opts.radius) > 1e-12) continue;
        radius_found = true;
        for (int i = 0; i < 2; ++i) {
            if (rec.sigma[i] > opts.mass_fraction * last.rho[i]) heavy[i].push_back(&rec);
        }
    }
    if (!radius_found) {
        out.evidence.push_back("no concentration records at the classification radius");
        return out;
    }
    for (int i = 0; i < 2; ++i) {
        for (const auto* rec : heavy[i]) {
            std::ostringstream e;
            e << "sigma_" << i + 1 << " = " << rec->sigma[i] << " > " << opts.mass_fraction << " rho_" << i + 1
              << " at " << describe(rec->point);
            out.evidence.push_back(e.str());
        }
    }
    if (heavy[0].size() > 1 || heavy[1].size() > 1) {
        out.evidence.push_back("mass threshold crossed at several points");
        return out;
    }
    if (heavy[0].empty() && heavy[1].empty()) {
        std::ostringstream e;
        e << "max |u| = " << peak << " exceeds " << opts.state_bound << " but no mass threshold is crossed";
        out.evidence.push_back(e.str());
        return out;
    }
    if (!heavy[0].empty() && !heavy[1].empty()) {
        const Point p = heavy[0][0]->point;
        const Point q = heavy[1][0]->point;
        if (torus_distance(p, q) <= 2.0 * opts.radius) {
            out.evidence.push_back("both components concentrate at the same point");
            return out;
        }
        out.tag = BlowupTag::two_point;
        out.points = {p, q};
    } else {
        const int i = heavy[0].empty() ? 1 : 0;
        out.tag = BlowupTag::single_component;
        out.component = i;
        out.points[i] = heavy[i][0]->point;
    }
    for (int i = 0; i < 2; ++i) {
        if (!out.points[i]) continue;
        const double local = alpha_at(config, i, *out.points[i]);
        const double tilde = tilde_alpha(config, i);
        if (std::abs(local - tilde) > 1e-12) {
            out.alpha_consistent = false;
            std::ostringstream e;
            e << "alpha_" << i + 1 << " at " << describe(*out.points[i]) << " is " << local << ", expected " << tilde;
            out.evidence.push_back(e.str());
        }
    }
    return out;
}

BlowupScenario classify_blowup(const std::vector<MinimizeReport>& reports, const SingularConfig& config,
                               const BlowupOptions& opts) {
    std::vector<ConcentrationSnapshot> snaps;
    for (const auto& r : reports) snaps.push_back(r.concentration);
    return classify_blowup(snaps, config, opts);
}

FieldPair limit_profiles(const SurfaceGrid& grid, const SingularConfig& config,
                         const std::array<std::optional<Point>, 2>& points, const StatePair& state,
                         const WeightPair& weights) {
    if (!points[0] && !points[1]) throw std::invalid_argument("no blow-up point given");
    std::array<Field, 2> source;  // mean-zero potential of each component's limit measure
    for (int i = 0; i < 2; ++i) {
        if (points[i]) {
            if (!grid.is_node(*points[i])) throw std::invalid_argument("blow-up point must be a grid node");
            source[i] = green_function(grid, *points[i]);
        } else {
            const Field f = normalized_density(grid, state[i], weights[i]->values);
            source[i] = grid.inverse_neg_laplacian_projected(f);
        }
    }
    const double c1 = 4.0 * kPi * (1.0 + tilde_alpha(config, 0));
    const double c2 = 4.0 * kPi * (1.0 + tilde_alpha(config, 1));
    return {axpy(source[0].scaled(2.0 * c1), -c2, source[1]), axpy(source[1].scaled(2.0 * c2), -c1, source[0])};
}

std::array<double, 2> limit_profile_residual(const SurfaceGrid& grid, const StatePair& state,
                                             const SingularConfig& config,
                                             const std::array<std::optional<Point>, 2>& points, double exclusion,
                                             const WeightPair& weights) {
    if (exclusion < 4.0 * grid.spacing() - 1e-12) throw std::invalid_argument("exclusion radius below 4 grid spacings");
    const FieldPair g = limit_profiles(grid, config, points, state, weights);
    std::array<double, 2> out{0.0, 0.0};
    for (int i = 0; i < 2; ++i) {
        const Field centered = state[i].centered();
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const Point x = grid.node(k);
            bool excluded = false;
            for (const auto& p : points)
                if (p && torus_distance(x, *p) < exclusion) excluded = true;
            if (!excluded) out[i] = std::max(out[i], std::abs(centered[k] - g[i][k]));
        }
    }
    return out;
}

RadialGrid::RadialGrid(std::size_t nodes) {
    if (nodes < 2) throw std::invalid_argument("radial grid needs at least two nodes");
    r.resize(nodes);
    for (std::size_t i = 0; i < nodes; ++i) r[i] = static_cast<double>(i) / static_cast<double>(nodes - 1);
}

DiskDeficit local_mt_deficit_disk(const RadialGrid& grid, const std::vector<double>& u, double alpha) {
    if (u.size() != grid.r.size()) throw std::invalid_argument("profile does not match radial grid");
    if (!(alpha > -1.0) || alpha > 0.0) throw std::invalid_argument("alpha must lie in (-1, 0]");
    if (std::abs(u.back()) > 1e-12) {
        std::ostringstream msg;
        msg << "profile must vanish at r = 1 (got " << u.back() << ")";
        throw std::invalid_argument(msg.str());
    }
    const double b = 2.0 * alpha + 2.0;
    std::vector<double> grad_terms, int_terms;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        const double r0 = grid.r[i], r1 = grid.r[i + 1];
        const double du = (u[i + 1] - u[i]) / (r1 - r0);
        grad_terms.push_back(du * du * (r1 * r1 - r0 * r0) / 2.0);
        const double g0 = std::exp(u[i]), g1 = std::exp(u[i + 1]);
        const double i0 = (std::pow(r1, b) - std::pow(r0, b)) / b;
        const double i1 = (std::pow(r1, b + 1.0) - std::pow(r0, b + 1.0)) / (b + 1.0);
        int_terms.push_back(g0 * i0 + (g1 - g0) / (r1 - r0) * (i1 - r0 * i0));
    }
    DiskDeficit d;
    d.dirichlet = 2.0 * kPi * stable_sum(grad_terms);
    d.weighted_integral = 2.0 * kPi * stable_sum(int_terms);
    d.deficit = d.dirichlet - 16.0 * kPi * (1.0 + alpha) * std::log(d.weighted_integral);
    return d;
}

std::vector<double> truncated_log_profile(const RadialGrid& grid, double t, double alpha) {
    std::vector<double> u(grid.r.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = grid.r[i];
        const double log_part = r > 0.0 ? -2.0 * (1.0 + alpha) * std::log(r) : std::numeric_limits<double>::infinity();
        u[i] = 2.0 * std::min(t, log_part);
    }
    u.back() = 0.0;
    return u;
}

}  // namespace todamt

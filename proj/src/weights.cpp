#include "todamt/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace todamt {

namespace {

constexpr double kPi = std::numbers::pi;

std::pair<int, int> node_coords(const SurfaceGrid& grid, Point p) {
    const std::size_t idx = grid.nearest_node(p);
    const auto n = static_cast<std::size_t>(grid.n());
    return {static_cast<int>(idx % n), static_cast<int>(idx / n)};
}

}  // namespace

int SingularConfig::check_component(int i) {
    if (i != 0 && i != 1) throw std::out_of_range("component index must be 0 or 1");
    return i;
}

SingularConfig::SingularConfig(const SurfaceGrid& grid, std::vector<Point> points,
                               std::array<std::vector<double>, 2> alpha)
    : alpha_(std::move(alpha)), spacing_(grid.spacing()) {
    for (int i = 0; i < 2; ++i) {
        if (alpha_[i].size() != points.size()) {
            std::ostringstream msg;
            msg << "alpha row " << i + 1 << " has " << alpha_[i].size() << " entries for " << points.size()
                << " singular points";
            throw std::invalid_argument(msg.str());
        }
        for (double a : alpha_[i]) {
            if (!std::isfinite(a) || !(a > -1.0)) {
                std::ostringstream msg;
                msg << "exponent must exceed -1 (got " << a << ")";
                throw std::invalid_argument(msg.str());
            }
        }
    }
    for (const Point& p : points) {
        const std::size_t idx = grid.nearest_node(p);
        nodes_.push_back(idx);
        points_.push_back(grid.node(idx));
    }
    const double min_sep = 8.0 * grid.spacing();
    for (std::size_t a = 0; a < points_.size(); ++a) {
        for (std::size_t b = a + 1; b < points_.size(); ++b) {
            if (torus_distance(points_[a], points_[b]) < min_sep - 1e-12) {
                std::ostringstream msg;
                msg << "singular points " << a + 1 << " and " << b + 1 << " are closer than 8 grid spacings";
                throw std::invalid_argument(msg.str());
            }
        }
    }
}

SingularConfig SingularConfig::regular(const SurfaceGrid& grid) { return SingularConfig(grid, {}, {}); }

double tilde_alpha(const SingularConfig& config, int i) {
    double worst = 0.0;
    for (double a : config.alpha_row(i)) worst = std::max(worst, a < 0.0 ? -a : 0.0);
    return -worst;
}

double alpha_at(const SingularConfig& config, int i, Point p) {
    SingularConfig::check_component(i);
    for (std::size_t j = 0; j < config.size(); ++j) {
        if (torus_distance(p, config.point(j)) <= 0.5 * config.spacing() + 1e-12) return config.alpha(i, j);
    }
    return 0.0;
}

Field TrigBase::sample(const SurfaceGrid& grid) const {
    constexpr double two_pi = 2.0 * kPi;
    Field f = grid.sample([this](Point x) {
        double v = constant;
        for (const Term& t : terms) {
            const double arg = two_pi * (t.kx * x.x + t.ky * x.y);
            v += t.cos_coef * std::cos(arg) + t.sin_coef * std::sin(arg);
        }
        return v;
    });
    if (!(f.min() > 0.0)) throw std::invalid_argument("base weight must be strictly positive on the grid");
    return f;
}

std::complex<double> green_coefficient(const SurfaceGrid& grid, Point p, int kx, int ky) {
    if (kx == 0 && ky == 0) return {0.0, 0.0};
    const auto [ix, iy] = node_coords(grid, p);
    const int n = grid.n();
    // phase index reduced mod N keeps the exponential exact for node positions
    const long long m = ((static_cast<long long>(kx) * ix + static_cast<long long>(ky) * iy) % n + n) % n;
    const double angle = -2.0 * kPi * static_cast<double>(m) / n;
    return std::complex<double>(std::cos(angle), std::sin(angle)) / SurfaceGrid::multiplier(kx, ky);
}

Field green_function(const SurfaceGrid& grid, Point p) {
    if (!grid.is_node(p)) throw std::invalid_argument("green_function: source point must be a grid node");
    const int n = grid.n();
    const auto [ix, iy] = node_coords(grid, p);
    std::vector<double> cos_table(n), sin_table(n);
    for (int m = 0; m < n; ++m) {
        const double angle = -2.0 * kPi * m / n;
        cos_table[m] = std::cos(angle);
        sin_table[m] = std::sin(angle);
    }
    Spectrum s(grid.spectrum_size());
    const std::size_t cols = grid.spectrum_columns();
    for (int j = 0; j < n; ++j) {
        const int ky = grid.row_frequency(j);
        for (int kx = 0; kx <= n / 2; ++kx) {
            if (kx == 0 && ky == 0) continue;
            const long long m = ((static_cast<long long>(kx) * ix + static_cast<long long>(ky) * iy) % n + n) % n;
            s[static_cast<std::size_t>(j) * cols + kx] =
                std::complex<double>(cos_table[m], sin_table[m]) / SurfaceGrid::multiplier(kx, ky);
        }
    }
    return grid.inverse(s);
}

ShellFit shell_log_fit(const SurfaceGrid& grid, const Field& values, Point p, double inner, double outer) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t count = 0;
    const double tol = 1e-12;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double d = torus_distance(grid.node(i), p);
        if (d < inner - tol || d > outer + tol) continue;
        const double lx = std::log(d);
        sx += lx;
        sy += values[i];
        sxx += lx * lx;
        sxy += lx * values[i];
        ++count;
    }
    if (count < 3) throw std::invalid_argument("shell_log_fit: fewer than three nodes in the shell");
    const double cn = static_cast<double>(count);
    const double denom = cn * sxx - sx * sx;
    if (!(std::abs(denom) > 0.0)) throw std::invalid_argument("shell_log_fit: degenerate shell");
    ShellFit fit;
    fit.slope = (cn * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / cn;
    fit.count = count;
    return fit;
}

Field capped_green_function(const SurfaceGrid& grid, Point p, double eps) {
    Field g = green_function(grid, p);
    const double h = grid.spacing();
    const Field log_dist_term = grid.sample([p](Point x) {
        const double d = torus_distance(x, p);
        return d > 0.0 ? std::log(d) / (2.0 * kPi) : 0.0;
    });
    double regular = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double d = torus_distance(grid.node(i), p);
        if (d >= 4.0 * h - 1e-12 && d <= 16.0 * h + 1e-12) {
            regular += g[i] + log_dist_term[i];
            ++count;
        }
    }
    regular /= static_cast<double>(count);
    const double cap = -std::log(eps) / (2.0 * kPi) + regular;
    std::vector<double> v = std::move(g).release();
    for (double& x : v) x = std::min(x, cap);
    return Field(std::move(v));
}

WeightField build_weight(const SurfaceGrid& grid, const SingularConfig& config, int i, const Field& base) {
    SingularConfig::check_component(i);
    if (base.size() != grid.size()) throw std::invalid_argument("base weight does not match grid");
    if (!(base.min() > 0.0)) throw std::invalid_argument("base weight must be strictly positive");
    WeightField w;
    w.epsilon = 0.5 * grid.spacing();
    std::vector<double> exponent(grid.size(), 0.0);
    for (std::size_t j = 0; j < config.size(); ++j) {
        const double a = config.alpha(i, j);
        w.exponents.push_back({config.point(j), 2.0 * a});
        if (a == 0.0) continue;
        const Field g = capped_green_function(grid, config.point(j), w.epsilon);
        for (std::size_t k = 0; k < exponent.size(); ++k) exponent[k] -= 4.0 * kPi * a * g[k];
    }
    for (std::size_t k = 0; k < exponent.size(); ++k) exponent[k] = base[k] * std::exp(exponent[k]);
    w.values = Field(std::move(exponent));
    return w;
}

WeightField build_weight(const SurfaceGrid& grid, const SingularConfig& config, int i) {
    return build_weight(grid, config, i, Field::constant(grid.size(), 1.0));
}

}  // namespace todamt

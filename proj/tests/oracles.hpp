#ifndef TODAMT_TESTS_ORACLES_HPP
#define TODAMT_TESTS_ORACLES_HPP

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "todamt/concentration.hpp"

namespace oracle {

using Pair = std::array<double, 2>;

inline bool contains(const std::vector<Pair>& set, Pair p, double tol) {
    for (const auto& q : set)
        if (std::abs(q[0] - p[0]) <= tol && std::abs(q[1] - p[1]) <= tol) return true;
    return false;
}

// Starting from (0,0), scan each coordinate line through a known root at step
// pi/1000 for sign changes of the residual, bisect, and repeat until no new
// nonnegative root appears.
inline std::vector<Pair> scan_pohozaev_roots(double a1, double a2) {
    const double pi = std::numbers::pi;
    const double step = pi * 1e-3;
    const double top = 4 * pi * (2 + a1 + a2) * 1.5;
    std::vector<Pair> roots{{0.0, 0.0}};
    for (std::size_t i = 0; i < roots.size(); ++i) {
        for (int axis = 0; axis < 2; ++axis) {
            const Pair base = roots[i];
            auto f = [&](double t) {
                Pair p = base;
                p[axis] = t;
                return todamt::pohozaev_residual(p[0], p[1], a1, a2);
            };
            for (double t = -step / 2; t < top; t += step) {
                const double fa = f(t), fb = f(t + step);
                if ((fa > 0) == (fb > 0)) continue;
                double lo = t, hi = t + step;
                for (int k = 0; k < 200; ++k) {
                    const double mid = 0.5 * (lo + hi);
                    ((f(mid) > 0) == (fa > 0) ? lo : hi) = mid;
                }
                Pair p = base;
                p[axis] = std::max(0.0, 0.5 * (lo + hi));
                if (!contains(roots, p, 1e-6)) roots.push_back(p);
            }
        }
    }
    return roots;
}

}  // namespace oracle

#endif  // TODAMT_TESTS_ORACLES_HPP

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "todamt/minimize.hpp"
#include "todamt/testfns.hpp"

using namespace todamt;
using std::numbers::pi;

TEST_CASE("options validation") {
    MinimizeOptions o;
    CHECK_NOTHROW(o.validate());
    o.shrink = 1.0;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
    o = {};
    o.tolerance = 0.0;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
}

TEST_CASE("divergence detector") {
    CHECK_FALSE(detect_divergence({{1.0, 3.0}, {1.0, 3.0}, {1.0, 3.0}}));
    CHECK(detect_divergence({{0.0, 3.0}, {-50.0, 40.0}}, 20.0, 20.0));
    CHECK_FALSE(detect_divergence({{0.0, 3.0}, {-50.0, 3.0}}, 20.0, 20.0));
    CHECK(detect_suspicious_decrease({{0.0, 3.0}, {-50.0, 3.0}}, 20.0, 20.0));
    CHECK_THROWS_AS(detect_divergence({{0.0, 1.0}}), std::invalid_argument);
}

TEST_CASE("subcritical flat problem stays at zero") {
    const auto g = SurfaceGrid::build(64);
    const WeightField flat{Field::constant(g.size(), 1.0), 0.0, {}};
    const Field zero = Field::constant(g.size(), 0.0);
    const MinimizeReport r = minimize_j(g, {&flat, &flat}, RhoParams(2 * pi, 2 * pi), {zero, zero});
    CHECK(r.status == MinimizeStatus::converged);
    CHECK(r.iterations == 0);
    CHECK(r.energy.total == 0.0);
}

TEST_CASE("singular problem reaches one level from several starts") {
    const auto g = SurfaceGrid::build(128);
    const SingularConfig c(g, {{0.25, 0.25}, {0.75, 0.75}}, {{{-0.5, 0.5}, {0.3, -0.25}}});
    const WeightField w1 = build_weight(g, c, 0), w2 = build_weight(g, c, 1);
    const RhoParams rho = critical_rho(c).scaled(0.8);
    std::vector<double> levels;
    for (std::uint64_t seed : {1, 2, 3}) {
        const MinimizeReport r = minimize_j(g, {&w1, &w2}, rho, random_smooth_state(g, seed), {}, probe_points(c));
        CHECK(r.status == MinimizeStatus::converged);
        CHECK(r.grad_norm <= r.options.tolerance);
        CHECK(r.el_residual <= 10 * r.options.tolerance);
        CHECK(r.state.is_gauged());
        for (std::size_t k = 1; k < r.history.size(); ++k)
            CHECK(r.history[k].j_rho <= r.history[k - 1].j_rho + 1e-12 * (1 + std::abs(r.history[k].j_rho)));
        for (int i = 0; i < 2; ++i) {
            for (double rad : kConcentrationRadii) {
                double total = 0.0;
                for (const auto& rec : r.concentration.records)
                    if (rec.radius == rad) total += rec.sigma[i];
                CHECK(total <= 1.05 * rho[i]);
            }
        }
        levels.push_back(r.energy.total);
    }
    for (double l : levels) CHECK(std::abs(l - levels[0]) < 1e-4 * (1 + std::abs(levels[0])));
}

TEST_CASE("continuation along a flat path") {
    const auto g = SurfaceGrid::build(64);
    const SingularConfig c = SingularConfig::regular(g);
    const WeightField w = build_weight(g, c, 0);
    TrigBase base;
    base.terms.push_back({1, 0, 0.3, 0.0});
    const WeightField w2 = build_weight(g, c, 1, base.sample(g));
    const RhoParams crit = critical_rho(c);
    const std::vector<RhoParams> path{crit.scaled(0.5), crit.scaled(0.7), crit.scaled(0.9)};
    const StatePair init = random_smooth_state(g, 4, 0.5);
    const auto reports = continuation(g, c, {&w, &w2}, path, init);
    REQUIRE(reports.size() == 3);
    for (std::size_t k = 0; k < reports.size(); ++k) {
        CHECK(reports[k].status == MinimizeStatus::converged);
        const MinimizeReport cold = minimize_j(g, {&w, &w2}, path[k], init);
        CHECK(cold.energy.total == doctest::Approx(reports[k].energy.total).epsilon(1e-4).scale(1.0));
    }
    CHECK_THROWS_AS(continuation(g, c, {&w, &w2}, {crit.scaled(0.5), crit.scaled(1.1)}, init), std::invalid_argument);
    CHECK_THROWS_AS(continuation(g, c, {&w, &w2}, {crit.scaled(0.7), crit.scaled(0.5)}, init), std::invalid_argument);
}

TEST_CASE("non-finite initial state is rejected") {
    const auto g = SurfaceGrid::build(32);
    const WeightField flat{Field::constant(g.size(), 1.0), 0.0, {}};
    std::vector<double> v(g.size(), 0.0);
    v[0] = INFINITY;
    CHECK_THROWS_AS(minimize_j(g, {&flat, &flat}, RhoParams(1.0, 1.0), {Field(v), Field(v)}), EvaluationError);
}

TEST_CASE("random smooth states are reproducible") {
    const auto g = SurfaceGrid::build(32);
    const StatePair a = random_smooth_state(g, 42), b = random_smooth_state(g, 42);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(a.u1[k] == b.u1[k]);
    CHECK(a.is_gauged());
}

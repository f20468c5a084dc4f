#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "todamt/functional.hpp"
#include "todamt/minimize.hpp"

using namespace todamt;
using std::numbers::pi;

namespace {

struct Setup {
    SurfaceGrid grid = SurfaceGrid::build(64);
    SingularConfig config{grid, {{0.25, 0.25}, {0.75, 0.75}}, {{{-0.5, 0.5}, {0.3, -0.25}}}};
    WeightField w1 = build_weight(grid, config, 0);
    WeightField w2 = build_weight(grid, config, 1);
    WeightPair weights{&w1, &w2};
    RhoParams rho{5.0, 7.0};
};

// Oracle: direct sums without any shift.
double naive_log_integral(const SurfaceGrid& g, const Field& u, const Field& w) {
    double s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) s += w[k] * std::exp(u[k]);
    return std::log(s / static_cast<double>(g.size()));
}

}  // namespace

TEST_CASE("rho validation") {
    CHECK_THROWS_AS(RhoParams(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(RhoParams(1.0, -2.0), std::invalid_argument);
    CHECK(RhoParams(2.0, 3.0).scaled(0.5)[1] == 1.5);
}

TEST_CASE("log integral matches direct evaluation and survives large states") {
    Setup s;
    const StatePair r = random_smooth_state(s.grid, 3);
    CHECK(log_integral_exp(s.grid, r.u1, s.w1.values) ==
          doctest::Approx(naive_log_integral(s.grid, r.u1, s.w1.values)).epsilon(1e-12));
    const Field big = r.u1.shifted(900.0);
    CHECK(log_integral_exp(s.grid, big, s.w1.values) ==
          doctest::Approx(900.0 + naive_log_integral(s.grid, r.u1, s.w1.values)).epsilon(1e-12));
    std::vector<double> bad(s.grid.size(), 0.0);
    bad[3] = std::nan("");
    CHECK_THROWS_AS(log_integral_exp(s.grid, Field(bad), s.w1.values), EvaluationError);
    const Field dens = normalized_density(s.grid, r.u1, s.w1.values);
    CHECK(s.grid.integrate(dens) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("J at zero with flat weights vanishes") {
    const auto g = SurfaceGrid::build(32);
    const WeightField flat{Field::constant(g.size(), 1.0), 0.0, {}};
    const Field zero = Field::constant(g.size(), 0.0);
    const EnergyBreakdown e = j_rho(g, {zero, zero}, {&flat, &flat}, {3.0, 4.0});
    CHECK(e.total == 0.0);
}

TEST_CASE("J breakdown is consistent") {
    Setup s;
    const StatePair r = random_smooth_state(s.grid, 5);
    const EnergyBreakdown e = j_rho(s.grid, r, s.weights, s.rho);
    CHECK(e.total == doctest::Approx(e.q_term + e.average_terms[0] + e.average_terms[1] - e.log_terms[0] -
                                     e.log_terms[1]));
    CHECK(e.q_term == doctest::Approx(s.grid.q_energy(r.u1, r.u2)));
    const FunctionalEvaluation ev = evaluate_functional(s.grid, r, s.weights, s.rho);
    CHECK(ev.energy.total == doctest::Approx(e.total).epsilon(1e-13));
}

TEST_CASE("gauge invariance") {
    Setup s;
    const StatePair r = random_smooth_state(s.grid, 9);
    const double j0 = j_rho(s.grid, r, s.weights, s.rho).total;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> c(-10.0, 10.0);
    for (int t = 0; t < 10; ++t) {
        const StatePair shifted{r.u1.shifted(c(rng)), r.u2.shifted(c(rng))};
        CHECK(std::abs(j_rho(s.grid, shifted, s.weights, s.rho).total - j0) < 1e-9 * (1 + std::abs(j0)));
    }
}

TEST_CASE("gradient matches central differences") {
    Setup s;
    const StatePair r = random_smooth_state(s.grid, 11);
    const FieldPair grad = grad_j_rho(s.grid, r, s.weights, s.rho);
    CHECK(std::abs(grad.first.mean()) < 1e-12);
    for (std::uint64_t seed = 100; seed < 105; ++seed) {
        const StatePair d = random_smooth_state(s.grid, seed);
        const double eps = 1e-5;
        const StatePair plus{axpy(r.u1, eps, d.u1), axpy(r.u2, eps, d.u2)};
        const StatePair minus{axpy(r.u1, -eps, d.u1), axpy(r.u2, -eps, d.u2)};
        const double fd =
            (j_rho(s.grid, plus, s.weights, s.rho).total - j_rho(s.grid, minus, s.weights, s.rho).total) / (2 * eps);
        const double an = s.grid.integrate(Field([&] {
            std::vector<double> v(s.grid.size());
            for (std::size_t k = 0; k < v.size(); ++k) v[k] = grad.first[k] * d.u1[k] + grad.second[k] * d.u2[k];
            return v;
        }()));
        CHECK(an == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("residual is the Cartan matrix applied to the gradient") {
    Setup s;
    const StatePair r = random_smooth_state(s.grid, 13);
    const FunctionalEvaluation ev = evaluate_functional(s.grid, r, s.weights, s.rho);
    const FieldPair c = apply_cartan(ev.gradient);
    for (std::size_t k = 0; k < s.grid.size(); k += 7) {
        CHECK(c.first[k] == doctest::Approx(ev.residual.first[k]).epsilon(1e-9).scale(1.0));
        CHECK(c.second[k] == doctest::Approx(ev.residual.second[k]).epsilon(1e-9).scale(1.0));
    }
    const FieldPair direct = euler_lagrange_residual(s.grid, r, s.weights, s.rho);
    CHECK(direct.first[17] == ev.residual.first[17]);
}

TEST_CASE("energy increment agrees with direct differences") {
    Setup s;
    const StatePair r = random_smooth_state(s.grid, 21);
    const StatePair d0 = random_smooth_state(s.grid, 22);
    const FieldPair d{d0.u1, d0.u2};
    const EnergyIncrement inc(s.grid, r, d, s.weights, s.rho);
    const double j0 = j_rho(s.grid, r, s.weights, s.rho).total;
    for (double step : {1.0, 0.3, 0.01}) {
        const StatePair moved{axpy(r.u1, step, d.first), axpy(r.u2, step, d.second)};
        CHECK(inc(step) == doctest::Approx(j_rho(s.grid, moved, s.weights, s.rho).total - j0).epsilon(1e-9));
    }
    const double h = 1e-6;
    CHECK(inc.slope() == doctest::Approx((inc(h) - inc(-h)) / (2 * h)).epsilon(1e-6));
    CHECK(inc(0.0) == 0.0);
}

TEST_CASE("critical parameters") {
    Setup s;
    const RhoParams c = critical_rho(s.config);
    CHECK(c[0] == doctest::Approx(2 * pi));
    CHECK(c[1] == doctest::Approx(3 * pi));
    CHECK(critical_rho(SingularConfig::regular(s.grid))[0] == doctest::Approx(4 * pi));
}

TEST_CASE("scalar deficit at zero") {
    const auto g = SurfaceGrid::build(32);
    const WeightField flat{Field::constant(g.size(), 2.0), 0.0, {}};
    const ScalarDeficit d = scalar_mt_deficit(g, Field::constant(g.size(), 0.0), flat, 0.0);
    CHECK(d.dirichlet == 0.0);
    CHECK(d.deficit == doctest::Approx(-16 * pi * std::log(2.0)));
    CHECK_THROWS_AS(scalar_mt_deficit(g, Field::constant(g.size(), 0.0), flat, 0.5), std::invalid_argument);
}

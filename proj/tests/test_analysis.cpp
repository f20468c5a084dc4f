#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "todamt/analysis.hpp"
#include "todamt/testfns.hpp"
#include "oracles.hpp"

using namespace todamt;
using std::numbers::pi;

using oracle::contains;
using oracle::Pair;

TEST_CASE("Pohozaev residual values") {
    CHECK(pohozaev_residual(4 * pi * 1.3, 0.0, 0.3, -0.2) == doctest::Approx(0.0).scale(1.0));
    CHECK(pohozaev_residual(8 * pi, 8 * pi, 0.0, 0.0) == doctest::Approx(0.0).scale(100.0));
    CHECK(pohozaev_residual(1.0, 1.0, 0.0, 0.0) == doctest::Approx(1.0 - 8 * pi));
    for (double s1 : {0.3, 2.0, 11.0})
        for (double s2 : {0.0, 5.0})
            CHECK(pohozaev_residual(s1, s2, 0.4, -0.3) == doctest::Approx(pohozaev_residual(s2, s1, -0.3, 0.4)));
}

TEST_CASE("Pohozaev roots against a brute-force scan") {
    for (const auto& [a1, a2] : std::vector<Pair>{{0.0, 0.0}, {0.5, -0.5}, {-0.9, 2.0}, {1.0, 0.25}}) {
        const auto roots = pohozaev_roots(a1, a2);
        const double A = 4 * pi * (1 + a1), B = 4 * pi * (1 + a2);
        CHECK(contains(roots, {A, 0.0}, 1e-9));
        for (const auto& r : roots) {
            const double scale = r[0] * r[0] + r[1] * r[1] + A * r[0] + B * r[1];
            CHECK(std::abs(pohozaev_residual(r[0], r[1], a1, a2)) <= 1e-9 * std::max(scale, 1.0));
            CHECK(r[0] >= 0.0);
            CHECK(r[1] >= 0.0);
        }
        const auto scanned = oracle::scan_pohozaev_roots(a1, a2);
        CHECK(scanned.size() == roots.size());
        for (const auto& s : scanned) CHECK(contains(roots, s, 1e-6));
        const auto swapped = pohozaev_roots(a2, a1);
        REQUIRE(swapped.size() == roots.size());
        for (const auto& r : roots) CHECK(contains(swapped, {r[1], r[0]}, 1e-9));
    }
    const auto zero = pohozaev_roots(0.0, 0.0);
    for (Pair p : {Pair{0, 0}, Pair{4 * pi, 0}, Pair{0, 4 * pi}, Pair{8 * pi, 4 * pi}, Pair{4 * pi, 8 * pi},
                   Pair{8 * pi, 8 * pi}})
        CHECK(contains(zero, p, 1e-9));
    CHECK(zero.size() == 6);
    CHECK_THROWS_AS(pohozaev_roots(-1.0, 0.0), std::invalid_argument);
}

TEST_CASE("concentration mass of uniform and bubbling densities") {
    const auto g = SurfaceGrid::build(512);
    const Field zero = Field::constant(g.size(), 0.0);
    const Field flat = Field::constant(g.size(), 1.0);
    const Point p = g.node(g.node_index(100, 300));
    for (double r : {0.05, 0.1, 0.2}) CHECK(concentration_mass(g, zero, flat, 3.0, p, r) == doctest::Approx(3.0 * pi * r * r).epsilon(0.02));
    CHECK(concentration_mass(g, zero, flat, 3.0, p, std::sqrt(0.5) + 1e-9) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK_THROWS_AS(concentration_mass(g, zero, flat, 3.0, p, 3 * g.spacing()), std::invalid_argument);

    const StatePair b = toda_bubble_pair(g, p, 64.0, 0.0);
    CHECK(concentration_mass(g, b.u1, flat, 4 * pi, p, 0.25) >= 0.9 * 4 * pi);
    double prev = 0.0;
    for (double r : {0.01, 0.02, 0.05, 0.1, 0.3, 0.6}) {
        const double m = concentration_mass(g, b.u1, flat, 4 * pi, p, r);
        CHECK(m >= prev);
        CHECK(m <= 4 * pi * (1 + 1e-12));
        prev = m;
    }
}

namespace {

struct Flat {
    SurfaceGrid grid;
    SingularConfig config;
    WeightField w1, w2;
    explicit Flat(int n)
        : grid(SurfaceGrid::build(n)),
          config(SingularConfig::regular(grid)),
          w1(build_weight(grid, config, 0)),
          w2(build_weight(grid, config, 1)) {}
    WeightPair weights() const { return {&w1, &w2}; }
};

}  // namespace

TEST_CASE("classification of synthetic sequences") {
    Flat f(256);
    const RhoParams rho{4 * pi, 4 * pi};
    const Point p = f.grid.node(f.grid.node_index(64, 64));
    const Point q = f.grid.node(f.grid.node_index(192, 192));

    std::vector<ConcentrationSnapshot> compact;
    for (std::uint64_t s : {1, 2}) compact.push_back(collect_concentration(f.grid, random_smooth_state(f.grid, s), f.weights(), rho, {}));
    CHECK(classify_blowup(compact, f.config).tag == BlowupTag::compact);

    BlowupOptions low;
    low.state_bound = 8.0;
    std::vector<ConcentrationSnapshot> single;
    for (double lam : {8.0, 16.0, 32.0})
        single.push_back(collect_concentration(f.grid, toda_bubble_pair(f.grid, p, lam, 0.0), f.weights(), rho, {}));
    const BlowupScenario s1 = classify_blowup(single, f.config, low);
    CHECK(s1.tag == BlowupTag::single_component);
    CHECK(s1.component == 0);
    REQUIRE(s1.points[0]);
    CHECK(torus_distance(*s1.points[0], p) < 1e-12);
    CHECK(s1.alpha_consistent);

    std::vector<ConcentrationSnapshot> two;
    for (double lam : {8.0, 16.0, 32.0}) {
        const StatePair a = toda_bubble_pair(f.grid, p, lam, 0.0);
        const StatePair b = toda_bubble_pair(f.grid, q, lam, 0.0);
        two.push_back(collect_concentration(f.grid, {a.u1, b.u1}, f.weights(), rho, {}));
    }
    const BlowupScenario s2 = classify_blowup(two, f.config, low);
    CHECK(s2.tag == BlowupTag::two_point);
    REQUIRE(s2.points[0]);
    REQUIRE(s2.points[1]);
    CHECK(torus_distance(*s2.points[0], *s2.points[1]) > 0.2);

    // blowing up at a point whose exponent is not the minimal one is flagged
    const SingularConfig c(f.grid, {p, q}, {{{0.5, -0.5}, {0.0, 0.0}}});
    const BlowupScenario s3 = classify_blowup(single, c, low);
    CHECK(s3.tag == BlowupTag::single_component);
    CHECK_FALSE(s3.alpha_consistent);

    // large state without concentrated mass: a deep well leaves the density spread out
    const Field well = f.grid.sample([&](Point x) { return -30.0 * std::exp(-std::pow(torus_distance(x, p), 2) / 0.01); });
    std::vector<ConcentrationSnapshot> deep;
    for (int k = 0; k < 2; ++k) deep.push_back(collect_concentration(f.grid, {well, well}, f.weights(), rho, {}));
    const BlowupScenario s4 = classify_blowup(deep, f.config);
    CHECK(s4.tag == BlowupTag::unclassified);
    CHECK_FALSE(s4.evidence.empty());
    CHECK_THROWS_AS(classify_blowup(std::vector<ConcentrationSnapshot>{compact[0]}, f.config), std::invalid_argument);
}

TEST_CASE("limit profile residuals") {
    Flat f(128);
    const Point p = f.grid.node(f.grid.node_index(32, 32));
    const Point q = f.grid.node(f.grid.node_index(96, 80));
    const std::array<std::optional<Point>, 2> pts{p, q};
    const Field zero = Field::constant(f.grid.size(), 0.0);
    const FieldPair G = limit_profiles(f.grid, f.config, pts, {zero, zero}, f.weights());
    const Field gp = green_function(f.grid, p), gq = green_function(f.grid, q);
    CHECK(G.first[5] == doctest::Approx(8 * pi * gp[5] - 4 * pi * gq[5]));

    auto r = limit_profile_residual(f.grid, {G.first, G.second}, f.config, pts, 0.05, f.weights());
    CHECK(r[0] < 1e-12);
    CHECK(r[1] < 1e-12);
    const Field bump = f.grid.sample([](Point x) { return 0.1 * std::cos(2 * pi * x.x); });
    r = limit_profile_residual(f.grid, {G.first + bump, G.second}, f.config, pts, 0.05, f.weights());
    CHECK(r[0] == doctest::Approx(0.1).epsilon(1e-9));
    CHECK_THROWS_AS(limit_profile_residual(f.grid, {G.first, G.second}, f.config, pts, 0.01, f.weights()),
                    std::invalid_argument);
    CHECK_THROWS_AS(limit_profiles(f.grid, f.config, {Point{0.001, 0.0}, std::nullopt}, {zero, zero}, f.weights()),
                    std::invalid_argument);

    // single-component profile uses the measured density of the other component
    const StatePair s = random_smooth_state(f.grid, 8);
    const FieldPair H = limit_profiles(f.grid, f.config, {p, std::nullopt}, s, f.weights());
    const Field lap = f.grid.laplacian(H.second);
    const Field dens = normalized_density(f.grid, s.u2, f.w2.values);
    const Field lgp = f.grid.laplacian(gp);
    for (std::size_t k = 0; k < f.grid.size(); k += 31)
        CHECK(-lap[k] == doctest::Approx(8 * pi * (dens[k] - 1) + 4 * pi * lgp[k]).epsilon(1e-8).scale(1.0));
}

TEST_CASE("disk deficit") {
    const RadialGrid grid;
    const std::vector<double> zero(grid.r.size(), 0.0);
    for (double a : {0.0, -0.5}) {
        const DiskDeficit d = local_mt_deficit_disk(grid, zero, a);
        CHECK(d.deficit == doctest::Approx(-16 * pi * (1 + a) * std::log(pi / (1 + a))).epsilon(0.01));
        std::vector<double> values;
        for (int t = 1; t <= 6; ++t) values.push_back(local_mt_deficit_disk(grid, truncated_log_profile(grid, t, a), a).deficit);
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        double mean = 0.0;
        for (double v : values) mean += v / values.size();
        CHECK(*hi - *lo < 0.5 * std::abs(mean));
    }
    std::vector<double> u(grid.r.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = 1 - grid.r[i] * grid.r[i];
    CHECK(local_mt_deficit_disk(grid, u, 0.0).dirichlet == doctest::Approx(2 * pi).epsilon(1e-5));
    u.back() = 0.5;
    CHECK_THROWS_AS(local_mt_deficit_disk(grid, u, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(local_mt_deficit_disk(grid, zero, 0.2), std::invalid_argument);
}

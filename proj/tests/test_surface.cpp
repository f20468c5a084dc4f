#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "todamt/surface.hpp"

using namespace todamt;
using std::numbers::pi;

TEST_CASE("grid construction rejects bad sizes") {
    CHECK_THROWS_AS(SurfaceGrid::build(4), std::invalid_argument);
    CHECK_THROWS_AS(SurfaceGrid::build(12), std::invalid_argument);
    const auto g = SurfaceGrid::build(16);
    CHECK(g.size() == 256);
    CHECK(g.quadrature_weight() == doctest::Approx(1.0 / 256));
    CHECK(g.node(g.node_index(3, 5)).x == doctest::Approx(3.0 / 16));
    CHECK(g.node(g.node_index(3, 5)).y == doctest::Approx(5.0 / 16));
    CHECK(g.node_index(-1, 16) == g.node_index(15, 0));
}

TEST_CASE("torus distance") {
    CHECK(torus_distance({0.1, 0.1}, {0.9, 0.9}) == doctest::Approx(std::sqrt(0.08)));
    CHECK(torus_distance({0.5, 0.0}, {0.0, 0.0}) == doctest::Approx(0.5));
    const Point w = wrap({-0.25, 1.5});
    CHECK(w.x == doctest::Approx(0.75));
    CHECK(w.y == doctest::Approx(0.5));
}

TEST_CASE("stable sum keeps small terms") {
    const std::vector<double> v{1e16, 1.0, -1e16};
    CHECK(stable_sum(v) == 1.0);
}

TEST_CASE("forward transform uses the unit-area convention") {
    const auto g = SurfaceGrid::build(32);
    const Field u = g.sample([](Point x) { return 3.0 + std::cos(2 * pi * x.x) + 2.0 * std::sin(2 * pi * 2 * x.y); });
    const Spectrum s = g.forward(u);
    const std::size_t cols = g.spectrum_columns();
    CHECK(s[0].real() == doctest::Approx(3.0));
    CHECK(s[1].real() == doctest::Approx(0.5));
    // sin(2 pi 2 y) = (e^{i..} - e^{-i..}) / 2i  ->  coefficient at ky = 2 is -i
    CHECK(s[2 * cols].imag() == doctest::Approx(-1.0));
    const Field back = g.inverse(s);
    for (std::size_t k = 0; k < g.size(); k += 37) CHECK(back[k] == doctest::Approx(u[k]).epsilon(1e-13));
}

TEST_CASE("laplacian and its inverse on trigonometric modes") {
    const auto g = SurfaceGrid::build(32);
    const Field u = g.sample([](Point x) { return std::sin(2 * pi * (2 * x.x + 3 * x.y)); });
    const Field lu = g.laplacian(u);
    for (std::size_t k = 0; k < g.size(); k += 11) CHECK(lu[k] == doctest::Approx(-4 * pi * pi * 13 * u[k]).epsilon(1e-10));
    const Field v = g.inverse_laplacian(lu);
    for (std::size_t k = 0; k < g.size(); k += 11) CHECK(v[k] == doctest::Approx(u[k]).epsilon(1e-10));
    CHECK_THROWS_AS(g.inverse_laplacian(u.shifted(1.0)), std::domain_error);
    const Field w = g.inverse_neg_laplacian_projected(u.shifted(1.0));
    CHECK(std::abs(w.mean()) < 1e-14);
    CHECK(w[5] == doctest::Approx(u[5] / (4 * pi * pi * 13)).epsilon(1e-10));
}

TEST_CASE("energies") {
    const auto g = SurfaceGrid::build(64);
    const Field u = g.sample([](Point x) { return std::sin(2 * pi * x.x); });
    CHECK(g.dirichlet_energy(u) == doctest::Approx(2 * pi * pi));
    CHECK(g.q_energy(u, u) == doctest::Approx(2 * pi * pi));
    // Q(phi, -phi/2) = (1 + 1/4 - 1/2) / 3 |grad phi|^2
    const Field phi = g.sample([](Point x) { return std::exp(std::cos(2 * pi * x.x) * std::sin(2 * pi * x.y)); });
    CHECK(g.q_energy(phi, phi.scaled(-0.5)) == doctest::Approx(0.25 * g.dirichlet_energy(phi)).epsilon(1e-12));
}

TEST_CASE("Parseval holds for random fields") {
    const auto g = SurfaceGrid::build(32);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    std::vector<double> v(g.size());
    for (double& x : v) x = nd(rng);
    const Field u(std::move(v));
    const Spectrum s = g.forward(u);
    double spectral = 0.0;
    for (int j = 0; j < g.n(); ++j)
        for (int kx = 0; kx <= g.n() / 2; ++kx)
            spectral += g.column_multiplicity(kx) * std::norm(s[static_cast<std::size_t>(j) * g.spectrum_columns() + kx]);
    double direct = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) direct += u[k] * u[k];
    direct *= g.quadrature_weight();
    CHECK(spectral == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("gradients") {
    const auto g = SurfaceGrid::build(128);
    const Field u = g.sample([](Point x) { return std::sin(2 * pi * x.x) * std::cos(2 * pi * x.y); });
    const auto [ux, uy] = g.spectral_gradient(u);
    const Field norm = g.difference_gradient_norm(u);
    for (std::size_t k = 0; k < g.size(); k += 97) {
        const Point x = g.node(k);
        const double ex = 2 * pi * std::cos(2 * pi * x.x) * std::cos(2 * pi * x.y);
        const double ey = -2 * pi * std::sin(2 * pi * x.x) * std::sin(2 * pi * x.y);
        CHECK(ux[k] == doctest::Approx(ex).epsilon(1e-9).scale(1.0));
        CHECK(uy[k] == doctest::Approx(ey).epsilon(1e-9).scale(1.0));
        CHECK(norm[k] == doctest::Approx(std::hypot(ex, ey)).epsilon(2e-3).scale(1.0));
    }
}

TEST_CASE("distance field and sampling") {
    const auto g = SurfaceGrid::build(16);
    const Point p = g.node(g.node_index(4, 4));
    const Field d = g.distance_field(p);
    CHECK(d[g.node_index(4, 4)] == 0.0);
    CHECK(d[g.node_index(12, 4)] == doctest::Approx(0.5));
    CHECK(g.is_node(p));
    CHECK_FALSE(g.is_node({0.01, 0.0}));
    CHECK(g.nearest_node({0.99, 0.01}) == g.node_index(0, 0));
}

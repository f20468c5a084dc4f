#ifndef TODAMT_SURFACE_HPP
#define TODAMT_SURFACE_HPP

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace todamt {

/** A point of the flat torus R^2 / Z^2, stored in the fundamental domain [0,1)^2. */
struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Geodesic distance on the unit torus: minimum over the 9 neighbouring lattice translates.
double torus_distance(Point a, Point b);

/// Wraps an arbitrary point into [0,1)^2.
Point wrap(Point p);

/**
 * Real samples at the N x N grid nodes, row-major with index iy * N + ix.
 * The mean is cached at construction; a Field is immutable afterwards.
 */
class Field {
public:
    Field() = default;
    explicit Field(std::vector<double> values);

    static Field constant(std::size_t size, double value);

    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }
    double mean() const { return mean_; }

    double max() const;
    double min() const;
    double max_abs() const;
    bool all_finite() const;

    Field shifted(double c) const;
    Field scaled(double c) const;
    /// u - mean(u).
    Field centered() const;

    /// Moves the sample vector out (leaves the Field empty).
    std::vector<double> release() &&;

    friend Field operator+(const Field& a, const Field& b);
    friend Field operator-(const Field& a, const Field& b);
    friend Field operator*(double c, const Field& a);

private:
    std::vector<double> values_;
    double mean_ = 0.0;
};

/// Compensated (Neumaier) sum.
double stable_sum(std::span<const double> v);

/// a + s * b, elementwise.
Field axpy(const Field& a, double s, const Field& b);

using Spectrum = std::vector<std::complex<double>>;

namespace detail {
class FftPlans;
}

/**
 * Spectral discretization of the flat torus of unit area.
 *
 * Nodes sit at (ix/N, iy/N); each node carries quadrature weight 1/N^2, so the
 * total area is exactly 1. Fourier coefficients use the unitary convention of
 * the unit-area torus,
 *
 *     u_hat(k) = integral of u(x) exp(-2 pi i k.x) dV = (1/N^2) sum_n u_n exp(-2 pi i k.x_n),
 *
 * so that Parseval reads  integral |u|^2 = sum_k |u_hat(k)|^2  with no extra factors
 * and the Laplacian acts as multiplication by -4 pi^2 |k|^2. Frequencies are taken
 * with |k_a| <= N/2; the half spectrum stored is N rows (k_y) by N/2+1 columns (k_x).
 *
 * The grid is immutable and cheap to copy (FFT plans are shared). All methods are
 * const and safe to call concurrently.
 */
class SurfaceGrid {
public:
    /// Throws std::invalid_argument unless n >= 8 and n is a power of two.
    static SurfaceGrid build(int n);

    int n() const { return n_; }
    double spacing() const { return 1.0 / n_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }
    double quadrature_weight() const { return 1.0 / static_cast<double>(size()); }

    Point node(std::size_t index) const;
    std::size_t node_index(int ix, int iy) const;
    /// Index of the node closest (in torus distance) to p.
    std::size_t nearest_node(Point p) const;
    /// True when p lies within tol of a grid node.
    bool is_node(Point p, double tol = 1e-9) const;

    /// 4 pi^2 |k|^2.
    static double multiplier(int kx, int ky);

    // Half-spectrum layout helpers.
    std::size_t spectrum_columns() const { return static_cast<std::size_t>(n_ / 2 + 1); }
    std::size_t spectrum_size() const { return static_cast<std::size_t>(n_) * spectrum_columns(); }
    /// Signed frequency of row j (j <= N/2 maps to j, the rest to j - N).
    int row_frequency(int j) const { return j <= n_ / 2 ? j : j - n_; }
    /// Multiplicity of column kx in the full spectrum (1 for kx = 0 or N/2, else 2).
    double column_multiplicity(int kx) const { return (kx == 0 || kx == n_ / 2) ? 1.0 : 2.0; }

    Spectrum forward(const Field& u) const;
    Field inverse(const Spectrum& s) const;

    double integrate(const Field& f) const;

    /// sum_k 4 pi^2 |k|^2 Re(a_hat conj(b_hat)) over the full spectrum.
    double energy_form(const Spectrum& a, const Spectrum& b) const;
    double dirichlet_energy(const Field& u) const;
    /// One third of the integral of |grad u1|^2 + |grad u2|^2 + grad u1 . grad u2.
    double q_energy(const Field& u1, const Field& u2) const;
    double q_energy(const Spectrum& s1, const Spectrum& s2) const;

    Field laplacian(const Field& u) const;
    /// Solves Delta v = f with mean(v) = 0; throws std::domain_error when |mean(f)| >= 1e-10.
    Field inverse_laplacian(const Field& f) const;
    /// (-Delta)^{-1} applied after discarding the k = 0 mode; no solvability check.
    Field inverse_neg_laplacian_projected(const Field& f) const;

    /// Spectral partial derivatives (d/dx, d/dy); the Nyquist modes are dropped.
    std::pair<Field, Field> spectral_gradient(const Field& u) const;
    /// |grad u| by second-order central differences at every node.
    Field difference_gradient_norm(const Field& u) const;

    /// Torus distance from p to every node.
    Field distance_field(Point p) const;

    template <class F>
    Field sample(F&& f) const {
        std::vector<double> v(size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(node(i));
        return Field(std::move(v));
    }

private:
    explicit SurfaceGrid(int n);

    int n_ = 0;
    std::shared_ptr<const detail::FftPlans> plans_;
};

}  // namespace todamt

#endif  // TODAMT_SURFACE_HPP

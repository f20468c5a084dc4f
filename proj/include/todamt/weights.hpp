#ifndef TODAMT_WEIGHTS_HPP
#define TODAMT_WEIGHTS_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "todamt/surface.hpp"

namespace todamt {

/**
 * Singular points p_j (snapped to grid nodes) and the exponent matrix alpha[i][j]
 * for the two components i = 0, 1.
 *
 * Construction validates alpha > -1, snaps every point to its nearest node and
 * requires a pairwise separation of at least 8 grid spacings.
 */
class SingularConfig {
public:
    SingularConfig() = default;
    SingularConfig(const SurfaceGrid& grid, std::vector<Point> points, std::array<std::vector<double>, 2> alpha);

    /// No singular points at all.
    static SingularConfig regular(const SurfaceGrid& grid);

    std::size_t size() const { return points_.size(); }
    Point point(std::size_t j) const { return points_[j]; }
    std::size_t node(std::size_t j) const { return nodes_[j]; }
    const std::vector<Point>& points() const { return points_; }
    double alpha(int i, std::size_t j) const { return alpha_[check_component(i)][j]; }
    const std::vector<double>& alpha_row(int i) const { return alpha_[check_component(i)]; }
    double spacing() const { return spacing_; }

    static int check_component(int i);

private:
    std::vector<Point> points_;
    std::vector<std::size_t> nodes_;
    std::array<std::vector<double>, 2> alpha_;
    double spacing_ = 0.0;
};

/// -max_j (alpha_{i,j})^-, i.e. min{0, min_j alpha_{i,j}}.
double tilde_alpha(const SingularConfig& config, int i);

/// alpha_{i,j} when p is within half a grid spacing of p_j, otherwise 0.
double alpha_at(const SingularConfig& config, int i, Point p);

struct SingularExponent {
    Point point;
    double exponent = 0.0;  // 2 alpha_{i,j}
};

/// Samples of a singular weight h~_i together with its regularization scale.
struct WeightField {
    Field values;
    double epsilon = 0.0;
    std::vector<SingularExponent> exponents;
};

/// A positive trigonometric polynomial used as the smooth factor of a weight.
struct TrigBase {
    struct Term {
        int kx = 0;
        int ky = 0;
        double cos_coef = 0.0;
        double sin_coef = 0.0;
    };
    double constant = 1.0;
    std::vector<Term> terms;

    /// Throws std::invalid_argument if any sample is not strictly positive.
    Field sample(const SurfaceGrid& grid) const;
};

/// Fourier coefficient exp(-2 pi i k.p) / (4 pi^2 |k|^2) of G_p (zero at k = 0).
std::complex<double> green_coefficient(const SurfaceGrid& grid, Point p, int kx, int ky);

/// Mean-zero G_p with -Delta G_p = delta_p - 1, spectrally truncated. p must be a grid node.
Field green_function(const SurfaceGrid& grid, Point p);

/// Least-squares fit of values against log d(., p) over nodes with inner <= d <= outer.
struct ShellFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::size_t count = 0;
};
ShellFit shell_log_fit(const SurfaceGrid& grid, const Field& values, Point p, double inner, double outer);

/**
 * G_p with its self-singular value capped: the effective distance never drops
 * below eps. The cap is -log(eps)/(2 pi) + R, where R is the regular part of G_p
 * read off the 4h..16h shells.
 */
Field capped_green_function(const SurfaceGrid& grid, Point p, double eps);

/// base * exp(-4 pi sum_j alpha_{i,j} G^{eps}_{p_j}) with eps = h/2.
WeightField build_weight(const SurfaceGrid& grid, const SingularConfig& config, int i, const Field& base);
WeightField build_weight(const SurfaceGrid& grid, const SingularConfig& config, int i);

}  // namespace todamt

#endif  // TODAMT_WEIGHTS_HPP

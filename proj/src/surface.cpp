#include "todamt/surface.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace todamt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Planner calls are not thread-safe in FFTW; execution with new arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

template <class T>
struct FftwDeleter {
    void operator()(T* p) const { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter<T>>;

FftwBuffer<double> alloc_real(std::size_t n) {
    return FftwBuffer<double>(fftw_alloc_real(n));
}

FftwBuffer<fftw_complex> alloc_complex(std::size_t n) {
    return FftwBuffer<fftw_complex>(fftw_alloc_complex(n));
}

double wrap_coord(double c) {
    double w = c - std::floor(c);
    return w >= 1.0 ? 0.0 : w;
}

}  // namespace

namespace detail {

class FftPlans {
public:
    explicit FftPlans(int n) : n_(n) {
        const std::size_t real_size = static_cast<std::size_t>(n) * n;
        const std::size_t cplx_size = static_cast<std::size_t>(n) * (n / 2 + 1);
        auto in = alloc_real(real_size);
        auto out = alloc_complex(cplx_size);
        std::lock_guard<std::mutex> lock(planner_mutex());
        forward_ = fftw_plan_dft_r2c_2d(n, n, in.get(), out.get(), FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_c2r_2d(n, n, out.get(), in.get(), FFTW_ESTIMATE);
        if (forward_ == nullptr || backward_ == nullptr) throw std::runtime_error("FFTW planning failed");
    }

    ~FftPlans() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }

    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;

    Spectrum forward(std::span<const double> u) const {
        const std::size_t real_size = static_cast<std::size_t>(n_) * n_;
        const std::size_t cplx_size = static_cast<std::size_t>(n_) * (n_ / 2 + 1);
        auto in = alloc_real(real_size);
        auto out = alloc_complex(cplx_size);
        std::memcpy(in.get(), u.data(), real_size * sizeof(double));
        fftw_execute_dft_r2c(forward_, in.get(), out.get());
        const double scale = 1.0 / static_cast<double>(real_size);
        Spectrum s(cplx_size);
        for (std::size_t i = 0; i < cplx_size; ++i) s[i] = {out[i][0] * scale, out[i][1] * scale};
        return s;
    }

    std::vector<double> backward(const Spectrum& s) const {
        const std::size_t real_size = static_cast<std::size_t>(n_) * n_;
        const std::size_t cplx_size = static_cast<std::size_t>(n_) * (n_ / 2 + 1);
        auto in = alloc_complex(cplx_size);
        auto out = alloc_real(real_size);
        for (std::size_t i = 0; i < cplx_size; ++i) {
            in[i][0] = s[i].real();
            in[i][1] = s[i].imag();
        }
        fftw_execute_dft_c2r(backward_, in.get(), out.get());
        return std::vector<double>(out.get(), out.get() + real_size);
    }

private:
    int n_;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

}  // namespace detail

// ---------------------------------------------------------------------------

double torus_distance(Point a, Point b) {
    double best = std::numeric_limits<double>::infinity();
    for (int sx = -1; sx <= 1; ++sx) {
        for (int sy = -1; sy <= 1; ++sy) {
            const double dx = a.x - b.x + sx;
            const double dy = a.y - b.y + sy;
            best = std::min(best, std::hypot(dx, dy));
        }
    }
    return best;
}

Point wrap(Point p) { return {wrap_coord(p.x), wrap_coord(p.y)}; }

double stable_sum(std::span<const double> v) {
    double sum = 0.0;
    double comp = 0.0;
    for (double x : v) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

Field::Field(std::vector<double> values) : values_(std::move(values)) {
    mean_ = values_.empty() ? 0.0 : stable_sum(values_) / static_cast<double>(values_.size());
}

Field Field::constant(std::size_t size, double value) { return Field(std::vector<double>(size, value)); }

double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }
double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }

double Field::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

bool Field::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Field Field::shifted(double c) const {
    std::vector<double> v(values_);
    for (double& x : v) x += c;
    return Field(std::move(v));
}

Field Field::scaled(double c) const {
    std::vector<double> v(values_);
    for (double& x : v) x *= c;
    return Field(std::move(v));
}

Field Field::centered() const { return shifted(-mean_); }

std::vector<double> Field::release() && {
    mean_ = 0.0;
    return std::move(values_);
}

Field operator+(const Field& a, const Field& b) { return axpy(a, 1.0, b); }
Field operator-(const Field& a, const Field& b) { return axpy(a, -1.0, b); }
Field operator*(double c, const Field& a) { return a.scaled(c); }

Field axpy(const Field& a, double s, const Field& b) {
    if (a.size() != b.size()) throw std::invalid_argument("field size mismatch");
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + s * b[i];
    return Field(std::move(v));
}

// ---------------------------------------------------------------------------

SurfaceGrid::SurfaceGrid(int n) : n_(n), plans_(std::make_shared<detail::FftPlans>(n)) {}

SurfaceGrid SurfaceGrid::build(int n) {
    if (n < 8) throw std::invalid_argument("grid resolution must be at least 8, got " + std::to_string(n));
    if ((n & (n - 1)) != 0) throw std::invalid_argument("grid resolution must be a power of two, got " + std::to_string(n));
    return SurfaceGrid(n);
}

Point SurfaceGrid::node(std::size_t index) const {
    const auto ix = static_cast<int>(index % static_cast<std::size_t>(n_));
    const auto iy = static_cast<int>(index / static_cast<std::size_t>(n_));
    return {static_cast<double>(ix) / n_, static_cast<double>(iy) / n_};
}

std::size_t SurfaceGrid::node_index(int ix, int iy) const {
    ix = ((ix % n_) + n_) % n_;
    iy = ((iy % n_) + n_) % n_;
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(ix);
}

std::size_t SurfaceGrid::nearest_node(Point p) const {
    const Point w = wrap(p);
    const auto ix = static_cast<int>(std::lround(w.x * n_));
    const auto iy = static_cast<int>(std::lround(w.y * n_));
    return node_index(ix, iy);
}

bool SurfaceGrid::is_node(Point p, double tol) const { return torus_distance(p, node(nearest_node(p))) <= tol; }

double SurfaceGrid::multiplier(int kx, int ky) {
    return kTwoPi * kTwoPi * (static_cast<double>(kx) * kx + static_cast<double>(ky) * ky);
}

Spectrum SurfaceGrid::forward(const Field& u) const {
    if (u.size() != size()) throw std::invalid_argument("field does not match grid");
    return plans_->forward(u.values());
}

Field SurfaceGrid::inverse(const Spectrum& s) const {
    if (s.size() != spectrum_size()) throw std::invalid_argument("spectrum does not match grid");
    return Field(plans_->backward(s));
}

double SurfaceGrid::integrate(const Field& f) const { return stable_sum(f.values()) * quadrature_weight(); }

double SurfaceGrid::energy_form(const Spectrum& a, const Spectrum& b) const {
    const std::size_t cols = spectrum_columns();
    std::vector<double> terms;
    terms.reserve(a.size());
    for (int j = 0; j < n_; ++j) {
        const int ky = row_frequency(j);
        for (int kx = 0; kx <= n_ / 2; ++kx) {
            const std::size_t i = static_cast<std::size_t>(j) * cols + static_cast<std::size_t>(kx);
            const double re = a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
            terms.push_back(column_multiplicity(kx) * multiplier(kx, ky) * re);
        }
    }
    return stable_sum(terms);
}

double SurfaceGrid::dirichlet_energy(const Field& u) const {
    const Spectrum s = forward(u);
    return energy_form(s, s);
}

double SurfaceGrid::q_energy(const Spectrum& s1, const Spectrum& s2) const {
    return (energy_form(s1, s1) + energy_form(s2, s2) + energy_form(s1, s2)) / 3.0;
}

double SurfaceGrid::q_energy(const Field& u1, const Field& u2) const { return q_energy(forward(u1), forward(u2)); }

Field SurfaceGrid::laplacian(const Field& u) const {
    Spectrum s = forward(u);
    const std::size_t cols = spectrum_columns();
    for (int j = 0; j < n_; ++j) {
        const int ky = row_frequency(j);
        for (int kx = 0; kx <= n_ / 2; ++kx) s[static_cast<std::size_t>(j) * cols + kx] *= -multiplier(kx, ky);
    }
    return inverse(s);
}

Field SurfaceGrid::inverse_neg_laplacian_projected(const Field& f) const {
    Spectrum s = forward(f);
    const std::size_t cols = spectrum_columns();
    for (int j = 0; j < n_; ++j) {
        const int ky = row_frequency(j);
        for (int kx = 0; kx <= n_ / 2; ++kx) {
            auto& c = s[static_cast<std::size_t>(j) * cols + kx];
            c = (kx == 0 && ky == 0) ? std::complex<double>{} : c / multiplier(kx, ky);
        }
    }
    return inverse(s);
}

Field SurfaceGrid::inverse_laplacian(const Field& f) const {
    const double m = integrate(f);
    if (!(std::abs(m) < 1e-10))
        throw std::domain_error("inverse_laplacian: source must have zero mean (mean = " + std::to_string(m) + ")");
    return inverse_neg_laplacian_projected(f).scaled(-1.0);
}

std::pair<Field, Field> SurfaceGrid::spectral_gradient(const Field& u) const {
    const Spectrum s = forward(u);
    Spectrum sx(s.size()), sy(s.size());
    const std::size_t cols = spectrum_columns();
    const std::complex<double> i_unit(0.0, 1.0);
    for (int j = 0; j < n_; ++j) {
        const int ky = row_frequency(j);
        for (int kx = 0; kx <= n_ / 2; ++kx) {
            const std::size_t i = static_cast<std::size_t>(j) * cols + kx;
            sx[i] = (kx == n_ / 2) ? 0.0 : i_unit * (kTwoPi * kx) * s[i];
            sy[i] = (j == n_ / 2) ? 0.0 : i_unit * (kTwoPi * ky) * s[i];
        }
    }
    return {inverse(sx), inverse(sy)};
}

Field SurfaceGrid::difference_gradient_norm(const Field& u) const {
    std::vector<double> g(size());
    const double inv = 0.5 * n_;
    for (int iy = 0; iy < n_; ++iy) {
        for (int ix = 0; ix < n_; ++ix) {
            const double dx = (u[node_index(ix + 1, iy)] - u[node_index(ix - 1, iy)]) * inv;
            const double dy = (u[node_index(ix, iy + 1)] - u[node_index(ix, iy - 1)]) * inv;
            g[node_index(ix, iy)] = std::hypot(dx, dy);
        }
    }
    return Field(std::move(g));
}

Field SurfaceGrid::distance_field(Point p) const {
    return sample([p](Point x) { return torus_distance(x, p); });
}

}  // namespace todamt

#ifndef DGBO_SPECTRAL_HPP
#define DGBO_SPECTRAL_HPP

// Fourier machinery on the torus [-pi, pi).
//
// Coefficient convention used everywhere in the library:
//     fhat_k = (1/2pi) \int_T f(x) e^{-ikx} dx,      f(x) = sum_k fhat_k e^{ikx},
// so products of functions convolve coefficients without 2pi factors and
//     ||f||_{L^2}^2 = 2pi sum_k |fhat_k|^2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "dgbo/errors.hpp"

namespace dgbo {

using cplx = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Japanese bracket <x> = (1 + x^2)^{1/2}.
inline double bracket(double x) { return std::sqrt(1.0 + x * x); }

/// Uniform collocation grid x_j = -pi + 2 pi j / N with retained frequencies |k| <= K.
struct TorusGrid {
    int K = 0;
    int N = 0;

    static TorusGrid make(int K, int N) {
        if (K < 1) throw ArgumentError("TorusGrid: K must be >= 1 (K = 0 leaves no mean-zero modes)");
        if (N < 2 * K + 1)
            throw ArgumentError("TorusGrid: N = " + std::to_string(N) + " cannot resolve K = " +
                                std::to_string(K) + " (need N >= 2K+1)");
        return TorusGrid{K, N};
    }

    /// Smallest power of two N >= 3K+1, i.e. enough headroom for exact quadratic products.
    static TorusGrid dealiased(int K) {
        int n = 8;
        while (n < 3 * K + 1) n *= 2;
        return make(K, n);
    }

    bool supports_products() const { return N >= 3 * K + 1; }
    double x(int j) const { return -kPi + kTwoPi * j / N; }
    bool operator==(const TorusGrid&) const = default;
};

/// Coefficients c_k for k in [-band, band]; no structural invariants.
class Spectrum {
public:
    Spectrum() = default;
    explicit Spectrum(int band) : band_(band), c_(static_cast<std::size_t>(2 * band + 1)) {
        if (band < 0) throw ArgumentError("Spectrum: negative band");
    }

    int band() const { return band_; }
    std::size_t size() const { return c_.size(); }

    cplx& operator[](int k) { return c_[static_cast<std::size_t>(k + band_)]; }
    const cplx& operator[](int k) const { return c_[static_cast<std::size_t>(k + band_)]; }

    /// Out-of-band reads return 0.
    cplx get(int k) const { return (k < -band_ || k > band_) ? cplx{} : (*this)[k]; }

    std::span<cplx> data() { return c_; }
    std::span<const cplx> data() const { return c_; }

    /// Truncate or zero-pad to a new band.
    Spectrum resized(int band) const {
        Spectrum out(band);
        const int m = std::min(band, band_);
        for (int k = -m; k <= m; ++k) out[k] = (*this)[k];
        return out;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& z : c_) m = std::max(m, std::abs(z));
        return m;
    }

    double reality_defect() const {
        double d = 0.0;
        for (int k = 0; k <= band_; ++k) d = std::max(d, std::abs((*this)[-k] - std::conj((*this)[k])));
        return d;
    }

    bool all_finite() const {
        return std::all_of(c_.begin(), c_.end(),
                           [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
    }

    Spectrum& operator+=(const Spectrum& o) { return axpy(cplx{1.0}, o); }
    Spectrum& operator-=(const Spectrum& o) { return axpy(cplx{-1.0}, o); }
    Spectrum& operator*=(cplx s) {
        for (auto& z : c_) z *= s;
        return *this;
    }

    /// this += a * o, growing the band if o is wider.
    Spectrum& axpy(cplx a, const Spectrum& o) {
        if (o.band_ > band_) *this = resized(o.band_);
        for (int k = -o.band_; k <= o.band_; ++k) (*this)[k] += a * o[k];
        return *this;
    }

    friend Spectrum operator+(Spectrum a, const Spectrum& b) { return a += b; }
    friend Spectrum operator-(Spectrum a, const Spectrum& b) { return a -= b; }
    friend Spectrum operator*(cplx s, Spectrum a) { return a *= s; }

private:
    int band_ = 0;
    std::vector<cplx> c_;
};

/// L^2(T) inner product <u, v> = \int u conj(v) = 2pi sum_k u_k conj(v_k).
inline cplx inner(const Spectrum& u, const Spectrum& v) {
    const int m = std::min(u.band(), v.band());
    cplx s{};
    for (int k = -m; k <= m; ++k) s += u[k] * std::conj(v[k]);
    return kTwoPi * s;
}

inline double l2_norm(const Spectrum& u) { return std::sqrt(std::max(0.0, inner(u, u).real())); }

namespace detail {

inline Eigen::FFT<double>& fft_engine() {
    // Plans are cached per thread.
    thread_local Eigen::FFT<double> engine;
    return engine;
}

// sum_k c_k e^{i k x_j} on an N-point grid starting at -pi. Requires 2*band < N.
inline std::vector<cplx> synthesize(const Spectrum& c, int N) {
    std::vector<cplx> freq(static_cast<std::size_t>(N), cplx{});
    for (int k = -c.band(); k <= c.band(); ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;  // e^{-ik pi}
        freq[static_cast<std::size_t>(((k % N) + N) % N)] += sign * c[k];
    }
    std::vector<cplx> out;
    fft_engine().inv(out, freq);
    for (auto& z : out) z *= static_cast<double>(N);
    return out;
}

// (1/N) sum_j f_j e^{-i k x_j} for |k| <= band.
inline Spectrum analyze(const std::vector<cplx>& samples, int band) {
    const int N = static_cast<int>(samples.size());
    std::vector<cplx> freq;
    fft_engine().fwd(freq, samples);
    Spectrum out(band);
    for (int k = -band; k <= band; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        out[k] = sign * freq[static_cast<std::size_t>(((k % N) + N) % N)] / static_cast<double>(N);
    }
    return out;
}

} // namespace detail

/// Trapezoid/DFT approximation of fhat_k, |k| <= grid.K.
inline Spectrum forward_transform(std::span<const double> samples, const TorusGrid& grid) {
    if (static_cast<int>(samples.size()) != grid.N)
        throw ArgumentError("forward_transform: got " + std::to_string(samples.size()) +
                            " samples for a grid with N = " + std::to_string(grid.N));
    std::vector<cplx> z(samples.begin(), samples.end());
    return detail::analyze(z, grid.K);
}

/// f(x_j) = sum_k fhat_k e^{ikx_j}. The coefficients must be Hermitian-symmetric.
inline std::vector<double> inverse_transform(const Spectrum& coeffs, const TorusGrid& grid) {
    if (2 * coeffs.band() >= grid.N)
        throw ArgumentError("inverse_transform: band " + std::to_string(coeffs.band()) +
                            " is not resolved by N = " + std::to_string(grid.N));
    const double scale = std::max(1.0, coeffs.max_abs());
    if (coeffs.reality_defect() > 1e-12 * scale)
        throw InvariantError("inverse_transform: coefficients violate c_{-k} = conj(c_k)");
    const auto z = detail::synthesize(coeffs, grid.N);
    std::vector<double> out(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) {
        if (std::abs(z[j].imag()) > 1e-12 * scale)
            throw InvariantError("inverse_transform: imaginary residue " + std::to_string(z[j].imag()));
        out[j] = z[j].real();
    }
    return out;
}

/// Real, mean-zero, finite field with |k| <= grid.K.
class SpectralField {
public:
    SpectralField() = default;

    SpectralField(const TorusGrid& grid, Spectrum coeffs) : grid_(grid) {
        if (coeffs.band() > grid.K) {
            for (int k = grid.K + 1; k <= coeffs.band(); ++k)
                if (coeffs[k] != cplx{} || coeffs[-k] != cplx{})
                    throw InvariantError("SpectralField: energy above the grid's K");
        }
        coeffs_ = coeffs.resized(grid.K);
        if (!coeffs_.all_finite()) throw InvariantError("SpectralField: non-finite coefficient");
        const double scale = std::max(1.0, coeffs_.max_abs());
        if (std::abs(coeffs_[0]) > 1e-12 * scale)
            throw InvariantError("SpectralField: nonzero mean (v_0 = " + std::to_string(std::abs(coeffs_[0])) + ")");
        if (coeffs_.reality_defect() > 1e-12 * scale)
            throw InvariantError("SpectralField: reality violated");
        coeffs_[0] = 0.0;
        for (int k = 1; k <= grid.K; ++k) {
            const cplx z = 0.5 * (coeffs_[k] + std::conj(coeffs_[-k]));
            coeffs_[k] = z;
            coeffs_[-k] = std::conj(z);
        }
    }

    static SpectralField zero(const TorusGrid& grid) { return SpectralField(grid, Spectrum(grid.K)); }

    const TorusGrid& grid() const { return grid_; }
    const Spectrum& coeffs() const { return coeffs_; }
    int K() const { return grid_.K; }
    cplx operator[](int k) const { return coeffs_.get(k); }
    double l2_norm() const { return dgbo::l2_norm(coeffs_); }

private:
    TorusGrid grid_;
    Spectrum coeffs_;
};

inline void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* where) {
    if (!(a == b)) throw ArgumentError(std::string(where) + ": grid mismatch");
}

/// Multiplier k -> sym(k) applied coefficient-wise.
template <class Symbol>
Spectrum apply_symbol(const Spectrum& v, Symbol&& sym) {
    Spectrum out(v.band());
    for (int k = -v.band(); k <= v.band(); ++k) out[k] = sym(k) * v[k];
    return out;
}

/// Symbol of D^alpha d/dx: i k |k|^alpha.
inline cplx dispersion_symbol(int k, double alpha) {
    return cplx{0.0, k * std::pow(std::abs(static_cast<double>(k)), alpha)};
}

/// Symbol of D^s: |k|^s, with the k = 0 entry 1 for s = 0 and 0 otherwise.
inline double fractional_symbol(int k, double s) {
    if (k == 0) return s == 0.0 ? 1.0 : 0.0;
    return std::pow(std::abs(static_cast<double>(k)), s);
}

inline Spectrum apply_dispersion(const Spectrum& v, double alpha) {
    if (alpha < 0.0) throw ArgumentError("apply_dispersion: alpha must be >= 0");
    return apply_symbol(v, [alpha](int k) { return dispersion_symbol(k, alpha); });
}

inline SpectralField apply_dispersion(const SpectralField& v, double alpha) {
    return SpectralField(v.grid(), apply_dispersion(v.coeffs(), alpha));
}

inline Spectrum apply_fractional(const Spectrum& v, double s) {
    if (s < 0.0 && std::abs(v.get(0)) != 0.0)
        throw ArgumentError("apply_fractional: negative order needs a mean-zero input");
    return apply_symbol(v, [s](int k) { return cplx{fractional_symbol(k, s)}; });
}

inline SpectralField apply_fractional(const SpectralField& v, double s) {
    return SpectralField(v.grid(), apply_fractional(v.coeffs(), s));
}

inline Spectrum derivative(const Spectrum& v) {
    return apply_symbol(v, [](int k) { return cplx{0.0, static_cast<double>(k)}; });
}

/// Exact linear convolution (a * b)_k = sum_m a_{k-m} b_m for |k| <= out_band,
/// evaluated with an FFT long enough that nothing wraps into the kept band.
inline Spectrum convolve(const Spectrum& a, const Spectrum& b, int out_band) {
    const int need = a.band() + b.band() + out_band + 1;
    int n = 8;
    while (n < need) n *= 2;
    auto fa = detail::synthesize(a, n);
    const auto fb = detail::synthesize(b, n);
    for (std::size_t j = 0; j < fa.size(); ++j) fa[j] *= fb[j];
    return detail::analyze(fa, out_band);
}

/// Dealiased product of two fields on a shared grid, projected to |k| <= K.
/// The k = 0 coefficient of the product is kept (it is the product's mean);
/// use project_mean_zero to drop it.
inline Spectrum multiply(const SpectralField& u, const SpectralField& v) {
    require_same_grid(u.grid(), v.grid(), "multiply");
    const auto& g = u.grid();
    if (!g.supports_products())
        throw ArgumentError("multiply: N = " + std::to_string(g.N) + " < 3K+1, products would alias");
    auto fu = detail::synthesize(u.coeffs(), g.N);
    const auto fv = detail::synthesize(v.coeffs(), g.N);
    for (std::size_t j = 0; j < fu.size(); ++j) fu[j] *= fv[j];
    return detail::analyze(fu, g.K);
}

inline SpectralField project_mean_zero(const TorusGrid& grid, Spectrum s) {
    s = s.resized(grid.K);
    s[0] = 0.0;
    return SpectralField(grid, std::move(s));
}

/// d/dx (v^2), dealiased. Exact for |k| <= K.
inline SpectralField dx_square(const SpectralField& v) {
    return SpectralField(v.grid(), derivative(multiply(v, v)));
}

// ---------------------------------------------------------------------------
// Mode vectors: the 2K mean-zero modes k in {-K..K}\{0} stored contiguously,
// index(k) = k + K for k < 0 and k + K - 1 for k > 0. Dense operators on the
// truncated space act on these vectors.

inline int mode_index(int k, int K) { return k < 0 ? k + K : k + K - 1; }
inline int mode_of_index(int i, int K) { return i < K ? i - K : i - K + 1; }

inline Eigen::VectorXcd to_modes(const Spectrum& s, int K) {
    Eigen::VectorXcd v(2 * K);
    for (int i = 0; i < 2 * K; ++i) v(i) = s.get(mode_of_index(i, K));
    return v;
}

inline Spectrum from_modes(const Eigen::VectorXcd& v, int K) {
    Spectrum s(K);
    for (int i = 0; i < 2 * K; ++i) s[mode_of_index(i, K)] = v(i);
    return s;
}

inline SpectralField field_from_modes(const TorusGrid& grid, const Eigen::VectorXcd& v) {
    return SpectralField(grid, from_modes(v, grid.K));
}

/// Enforce v_{-k} = conj(v_k) on a mode vector; returns the defect removed.
inline double symmetrize_modes(Eigen::VectorXcd& v, int K) {
    double defect = 0.0;
    for (int k = 1; k <= K; ++k) {
        const int ip = mode_index(k, K), im = mode_index(-k, K);
        defect = std::max(defect, std::abs(v(im) - std::conj(v(ip))));
        const cplx z = 0.5 * (v(ip) + std::conj(v(im)));
        v(ip) = z;
        v(im) = std::conj(z);
    }
    return defect;
}

} // namespace dgbo

#endif

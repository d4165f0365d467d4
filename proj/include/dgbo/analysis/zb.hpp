#ifndef DGBO_ANALYSIS_ZB_HPP
#define DGBO_ANALYSIS_ZB_HPP

// Discrete dissipation-normalized Bourgain norms.
//
//   |u|_{Z^b}^2 = sum_k \int w_{b,k}(tau - L_k)^2 |uhat_k(tau)|^2 dtau,
//   w_{b,k}(s) = <k>^{b beta}           <s / <k>^beta>^b   if |b| < 1/2,
//              = <k>^{sgn(b) beta / 2}  <s / <k>^beta>^b   otherwise,
//
// with uhat_k(tau) = \int u_k(t) e^{-i tau t} dt. A space-time field is stored
// through its demodulated profiles a_k(t) = e^{i L_k t} u_k(t), so the time
// transform of a_k is directly a function of the modulation s = tau - L_k and
// the sampling rate only needs to resolve s, not L_k. With this scaling Z^0 is
// exactly the L^2(dt dx) norm of the (windowed) samples.

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "dgbo/model.hpp"
#include "dgbo/spectral.hpp"

namespace dgbo {

struct ZbParams {
    double b = 0.0;
    double beta = 0.0;
    double alpha = 1.5;

    /// Weight w_{b,k}(s) at modulation s = tau - L_k. |b| = 1/2 uses the second branch.
    double weight(int k, double s) const {
        const double kb = bracket(static_cast<double>(k));
        const double scale = std::pow(kb, beta);
        const double mod = std::pow(bracket(s / scale), b);
        if (std::abs(b) < 0.5) return std::pow(kb, b * beta) * mod;
        const double sg = b > 0.0 ? 1.0 : (b < 0.0 ? -1.0 : 0.0);
        return std::pow(kb, sg * 0.5 * beta) * mod;
    }

    double L(int k) const { return ModelParams::dispersion_relation(k, alpha); }
};

// --- smooth cutoffs ------------------------------------------------------------

namespace detail {

inline double psi(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

/// C^infinity step: 0 for s <= 0, 1 for s >= 1.
inline double smooth_step(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = psi(s), b = psi(1.0 - s);
    return a / (a + b);
}

} // namespace detail

/// eta(t): 1 on [-1, 1], 0 outside [-2, 2], C^infinity.
inline double cutoff_eta(double t) { return detail::smooth_step(2.0 - std::abs(t)); }

struct TimeGrid {
    double t0 = 0.0;
    double dt = 0.1;
    int M = 0;
    double t(int m) const { return t0 + dt * m; }
    double t_end() const { return t(M - 1); }
};

/// Window applied before the time transform.
struct Window {
    enum class Kind { none, tukey } kind = Kind::tukey;
    double taper = 0.1;  // fraction of the span used by each smooth edge

    static Window none() { return Window{Kind::none, 0.0}; }
    static Window tukey(double taper = 0.1) { return Window{Kind::tukey, taper}; }

    std::vector<double> values(const TimeGrid& g) const {
        std::vector<double> w(static_cast<std::size_t>(g.M), 1.0);
        if (kind == Kind::none || g.M < 2) return w;
        const double span = g.dt * (g.M - 1);
        const double edge = taper * span;
        if (!(edge > 0.0)) return w;
        for (int m = 0; m < g.M; ++m) {
            const double x = g.dt * m;
            w[static_cast<std::size_t>(m)] = detail::smooth_step(x / edge) * detail::smooth_step((span - x) / edge);
        }
        return w;
    }
};

/// Per-mode time transforms U_k(s_j), k = 1..K, on the zero-padded dual grid.
struct ModulationSpectrum {
    int K = 0;
    double ds = 0.0;                         // spacing of the dual grid
    int P = 0;                               // padded length
    std::vector<std::vector<cplx>> U;        // U[k-1][j], j = 0..P-1, s_j = ds * (j < P/2 ? j : j - P)

    double s(int j) const { return ds * (j < P / 2 ? j : j - P); }
};

class SpaceTimeField {
public:
    SpaceTimeField(const TorusGrid& grid, double alpha, const TimeGrid& time)
        : grid_(grid), alpha_(alpha), time_(time),
          a_(static_cast<std::size_t>(grid.K), std::vector<cplx>(static_cast<std::size_t>(time.M))) {
        if (time.M < 2 || !(time.dt > 0.0)) throw ArgumentError("SpaceTimeField: need M >= 2 samples and dt > 0");
    }

    /// Build from demodulated profiles a_k(t), k = 1..K.
    static SpaceTimeField from_profile(const TorusGrid& grid, double alpha, const TimeGrid& time,
                                       const std::function<cplx(int, double)>& profile) {
        SpaceTimeField f(grid, alpha, time);
        for (int k = 1; k <= grid.K; ++k)
            for (int m = 0; m < time.M; ++m) f.a_[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(m)] = profile(k, time.t(m));
        return f;
    }

    /// Build from Fourier coefficients u_k(t), k = 1..K.
    static SpaceTimeField from_modes(const TorusGrid& grid, double alpha, const TimeGrid& time,
                                     const std::function<cplx(int, double)>& coeff) {
        return from_profile(grid, alpha, time, [&](int k, double t) {
            return std::exp(cplx{0.0, ModelParams::dispersion_relation(k, alpha) * t}) * coeff(k, t);
        });
    }

    /// Build from real samples u(t_m, x_j), row-major M x N.
    static SpaceTimeField from_samples(const TorusGrid& grid, double alpha, const TimeGrid& time,
                                       std::span<const double> values) {
        if (values.size() != static_cast<std::size_t>(time.M) * static_cast<std::size_t>(grid.N))
            throw ArgumentError("SpaceTimeField: sample array is not M x N");
        SpaceTimeField f(grid, alpha, time);
        for (int m = 0; m < time.M; ++m) {
            const Spectrum c = forward_transform(values.subspan(static_cast<std::size_t>(m) * grid.N, grid.N), grid);
            for (int k = 1; k <= grid.K; ++k)
                f.a_[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(m)] =
                    std::exp(cplx{0.0, ModelParams::dispersion_relation(k, alpha) * time.t(m)}) * c[k];
        }
        return f;
    }

    const TorusGrid& grid() const { return grid_; }
    const TimeGrid& time() const { return time_; }
    double alpha() const { return alpha_; }
    int K() const { return grid_.K; }

    cplx profile(int k, int m) const { return a_[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(m)]; }
    cplx& profile(int k, int m) { return a_[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(m)]; }

    /// u_k(t_m) for k != 0, using u_{-k} = conj(u_k).
    cplx coeff(int k, int m) const {
        if (k == 0) return {};
        const cplx a = profile(std::abs(k), m);
        const cplx u = std::exp(cplx{0.0, -ModelParams::dispersion_relation(std::abs(k), alpha_) * time_.t(m)}) * a;
        return k > 0 ? u : std::conj(u);
    }

    /// Real samples u(t_m, x_j), row-major M x N (no window).
    std::vector<double> samples() const {
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(time_.M) * grid_.N);
        for (int m = 0; m < time_.M; ++m) {
            Spectrum s(grid_.K);
            for (int k = 1; k <= grid_.K; ++k) {
                s[k] = coeff(k, m);
                s[-k] = std::conj(s[k]);
            }
            const auto v = inverse_transform(s, grid_);
            out.insert(out.end(), v.begin(), v.end());
        }
        return out;
    }

    /// Windowed, zero-padded transform of every profile: U_k(s_j) = dt sum_m w_m a_k(t_m) e^{-i s_j t_m}.
    ModulationSpectrum transform(const Window& window = Window::tukey(), int pad = 4) const {
        if (pad < 1) throw ArgumentError("SpaceTimeField::transform: pad must be >= 1");
        int P = 1;
        while (P < pad * time_.M) P *= 2;
        ModulationSpectrum ms;
        ms.K = grid_.K;
        ms.P = P;
        ms.ds = kTwoPi / (P * time_.dt);
        const auto w = window.values(time_);
        auto& fft = detail::fft_engine();
        std::vector<cplx> buf(static_cast<std::size_t>(P));
        ms.U.resize(static_cast<std::size_t>(grid_.K));
        for (int k = 1; k <= grid_.K; ++k) {
            std::fill(buf.begin(), buf.end(), cplx{});
            for (int m = 0; m < time_.M; ++m)
                buf[static_cast<std::size_t>(m)] = w[static_cast<std::size_t>(m)] * profile(k, m);
            std::vector<cplx> out;
            fft.fwd(out, buf);
            // Shift the time origin from t_0 to 0: factor e^{-i s t_0}.
            for (int j = 0; j < P; ++j) out[static_cast<std::size_t>(j)] *= time_.dt * std::exp(cplx{0.0, -ms.s(j) * time_.t0});
            ms.U[static_cast<std::size_t>(k - 1)] = std::move(out);
        }
        return ms;
    }

private:
    TorusGrid grid_;
    double alpha_;
    TimeGrid time_;
    std::vector<std::vector<cplx>> a_;
};

/// Weighted energies sum_j w^2 |U|^2 ds of modes +k and -k.
struct ModeEnergy {
    double plus = 0.0;
    double minus = 0.0;
};

inline ModeEnergy mode_energy(const ModulationSpectrum& ms, const ZbParams& zb, int k) {
    const auto& U = ms.U[static_cast<std::size_t>(k - 1)];
    ModeEnergy e;
    for (int j = 0; j < ms.P; ++j) {
        const double s = ms.s(j);
        const double n2 = std::norm(U[static_cast<std::size_t>(j)]);
        const double wp = zb.weight(k, s);
        // Mode -k has profile conj(a_k), whose transform at s is conj(U_k(-s)).
        const double wm = zb.weight(-k, -s);
        e.plus += wp * wp * n2;
        e.minus += wm * wm * n2;
    }
    e.plus *= ms.ds;
    e.minus *= ms.ds;
    return e;
}

/// Z^b norm of a transformed field, with an optional extra spatial multiplier m(k)
/// (e.g. |k| for d/dx or |k|^s for D^s).
inline double znorm(const ModulationSpectrum& ms, const ZbParams& zb,
                    const std::function<double(int)>& multiplier = nullptr) {
    double total = 0.0;
    for (int k = 1; k <= ms.K; ++k) {
        const ModeEnergy e = mode_energy(ms, zb, k);
        const double mk = multiplier ? multiplier(k) : 1.0;
        const double mmk = multiplier ? multiplier(-k) : 1.0;
        total += mk * mk * e.plus + mmk * mmk * e.minus;
    }
    return std::sqrt(total);
}

inline double znorm(const SpaceTimeField& f, const ZbParams& zb, const Window& window = Window::tukey(), int pad = 4) {
    return znorm(f.transform(window, pad), zb);
}

} // namespace dgbo

#endif

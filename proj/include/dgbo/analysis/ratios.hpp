#ifndef DGBO_ANALYSIS_RATIOS_HPP
#define DGBO_ANALYSIS_RATIOS_HPP

// Linear estimates in Z^b measured as ratios: the free evolution bound, the
// time-cutoff scaling and the Duhamel smoothing estimate. All fields are built
// from demodulated profiles, where the diagonal semigroup reads e^{-c_k |t|}.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "dgbo/analysis/zb.hpp"
#include "dgbo/damping.hpp"
#include "dgbo/fit.hpp"
#include "dgbo/semigroup.hpp"

namespace dgbo {

struct RatioStats {
    double max = 0.0;
    double mean = 0.0;
    double min = 0.0;
    std::vector<double> values;
};

inline RatioStats summarize(std::vector<double> values) {
    RatioStats s;
    if (values.empty()) return s;
    s.max = *std::max_element(values.begin(), values.end());
    s.min = *std::min_element(values.begin(), values.end());
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    s.values = std::move(values);
    return s;
}

namespace detail {

/// Random complex coefficients <k>^{-1} (X + iY), k = 1..K.
inline std::vector<cplx> random_coefficients(int K, std::mt19937_64& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    std::vector<cplx> f(static_cast<std::size_t>(K));
    for (int k = 1; k <= K; ++k) {
        const double re = n01(rng), im = n01(rng);
        f[static_cast<std::size_t>(k - 1)] = cplx{re, im} / bracket(k);
    }
    return f;
}

/// Time grid covering [lo - edge, hi + edge] with a smooth taper on each edge.
struct PaddedWindow {
    TimeGrid grid;
    Window window;
};

inline PaddedWindow padded_window(double lo, double hi, double dt) {
    const double edge = 0.1 * (hi - lo);
    const double span = hi - lo + 2.0 * edge;
    PaddedWindow p;
    p.grid.t0 = lo - edge;
    p.grid.dt = dt;
    p.grid.M = static_cast<int>(std::ceil(span / dt)) + 1;
    p.window = Window::tukey(edge / (dt * (p.grid.M - 1)));
    return p;
}

inline void check_decay(double c_min, double flat_length, double tol, const char* where) {
    if (!(std::exp(-c_min * flat_length) < tol))
        throw PrecisionError(std::string(where) + ": window too short, exp(-c_min T) = " +
                             std::to_string(std::exp(-c_min * flat_length)) + " is not below " + std::to_string(tol));
}

} // namespace detail

// --- free evolution ----------------------------------------------------------

struct FreeRatioOptions {
    int K = 16;
    double dt = 0.05;
    double decay_tol = 1e-8;
    /// Half-length of the untapered window; 0 picks log(1/decay_tol) / c_min.
    double half_window = 0.0;
    int pad = 4;
};

/// Unit contributions Z_k = |S(.) e_k|^2_{Z^b}, k = 1..K (equal for -k).
inline std::vector<double> free_mode_energies(const ZbParams& zb, const DampingDecomposition& d,
                                              const FreeRatioOptions& opt = {}) {
    if (opt.K < 1 || opt.K > d.kmax()) throw ArgumentError("free_solution_ratio: K must lie in [1, kmax]");
    double c_min = d.c(1);
    for (int k = 1; k <= opt.K; ++k) c_min = std::min({c_min, d.c(k), d.c(-k)});
    const double half = opt.half_window > 0.0 ? opt.half_window : std::log(1.0 / opt.decay_tol) / c_min;
    detail::check_decay(c_min, half, opt.decay_tol, "free_solution_ratio");
    const auto pw = detail::padded_window(-half, half, opt.dt);
    const TorusGrid grid = TorusGrid::make(opt.K, 2 * opt.K + 2);
    const auto field = SpaceTimeField::from_profile(grid, zb.alpha, pw.grid,
                                                    [&](int k, double t) { return cplx{std::exp(-d.c(k) * std::abs(t)), 0.0}; });
    const auto ms = field.transform(pw.window, opt.pad);
    std::vector<double> z(static_cast<std::size_t>(opt.K));
    for (int k = 1; k <= opt.K; ++k) z[static_cast<std::size_t>(k - 1)] = mode_energy(ms, zb, k).plus;
    return z;
}

/// |S(.) f|_{Z^b} / |f|_{L^2} over random real f with coefficients <k>^{-1} gaussian.
inline RatioStats free_solution_ratio(const ZbParams& zb, const DampingDecomposition& d, int trials,
                                      std::uint64_t seed = 0, const FreeRatioOptions& opt = {}) {
    if (trials < 1) throw ArgumentError("free_solution_ratio: trials must be >= 1");
    const auto z = free_mode_energies(zb, d, opt);
    std::mt19937_64 rng(seed);
    std::vector<double> out;
    for (int t = 0; t < trials; ++t) {
        const auto f = detail::random_coefficients(opt.K, rng);
        double num = 0.0, den = 0.0;
        for (int k = 1; k <= opt.K; ++k) {
            const double a = std::norm(f[static_cast<std::size_t>(k - 1)]);
            num += a * z[static_cast<std::size_t>(k - 1)];
            den += a;
        }
        out.push_back(std::sqrt(num / (kTwoPi * den)));
    }
    return summarize(std::move(out));
}

// --- time cutoff ---------------------------------------------------------------

struct CutoffScaling {
    std::vector<double> T;
    std::vector<double> ratio;
    LineFit fit;
};

/// Demodulated profile a_k(t), k = 1..K.
using ProfileFn = std::function<cplx(int, double)>;

/// Fits the exponent of rho(T) = |eta(t/T) u|_{Z^{b'}} / |eta(t/2T) u|_{Z^b} in T.
/// The second cutoff equals 1 on the support of the first, so rho(T) <~ T^{b-b'}
/// is the cutoff estimate applied to the localized field eta(t/2T) u.
inline CutoffScaling cutoff_scaling(double b, double b_prime, const ZbParams& base, int K, const ProfileFn& profile,
                                    std::span<const double> T_grid, int samples_per_T = 128) {
    if (!(b_prime > -0.5 && b_prime <= b && b < 0.5))
        throw ArgumentError("cutoff_scaling: need -1/2 < b' <= b < 1/2");
    if (T_grid.size() < 2) throw ArgumentError("cutoff_scaling: need at least two T values");
    const TorusGrid grid = TorusGrid::make(K, 2 * K + 2);
    ZbParams zb = base, zbp = base;
    zb.b = b;
    zbp.b = b_prime;
    CutoffScaling out;
    for (double T : T_grid) {
        if (!(T > 0.0)) throw ArgumentError("cutoff_scaling: T must be positive");
        TimeGrid tg;
        tg.dt = T / samples_per_T;
        tg.M = 2 * static_cast<int>(std::ceil(4.4 * samples_per_T)) + 1;
        tg.t0 = -tg.dt * (tg.M - 1) / 2;
        const auto num = SpaceTimeField::from_profile(grid, base.alpha, tg,
                                                      [&](int k, double t) { return cutoff_eta(t / T) * profile(k, t); });
        const auto den = SpaceTimeField::from_profile(grid, base.alpha, tg,
                                                      [&](int k, double t) { return cutoff_eta(t / (2.0 * T)) * profile(k, t); });
        const double n = znorm(num, zbp, Window::none());
        const double dn = znorm(den, zb, Window::none());
        if (!(dn > 0.0)) throw ArgumentError("cutoff_scaling: degenerate field (zero norm)");
        out.T.push_back(T);
        out.ratio.push_back(n / dn);
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < out.T.size(); ++i) {
        lx.push_back(std::log(out.T[i]));
        ly.push_back(std::log(out.ratio[i]));
    }
    out.fit = fit_line(lx, ly);
    return out;
}

/// Demodulated free profile e^{-c_k |t|} f_k.
inline ProfileFn free_profile(const DampingDecomposition& d, std::vector<cplx> f) {
    return [&d, f = std::move(f)](int k, double t) { return std::exp(-d.c(k) * std::abs(t)) * f[static_cast<std::size_t>(k - 1)]; };
}

// --- Duhamel term ---------------------------------------------------------------

/// Forcing in the demodulated frame: F_k(s) = amp_k e^{-i detune_k s} exp(-(s - center)^2 / (2 width^2)).
struct Forcing {
    double center = 20.0;
    double width = 2.0;
    std::vector<cplx> amp;        // k = 1..K
    std::vector<double> detune;   // k = 1..K

    int K() const { return static_cast<int>(amp.size()); }
    cplx operator()(int k, double s) const {
        const double x = (s - center) / width;
        const auto i = static_cast<std::size_t>(k - 1);
        return amp[i] * std::exp(cplx{-0.5 * x * x, -detune[i] * s});
    }
};

/// Random forcing: detuning <k>^beta N(0,1), amplitudes <k>^{-1} complex gaussian.
inline Forcing random_forcing(int K, double beta, std::mt19937_64& rng, double center = 20.0, double width = 2.0) {
    std::normal_distribution<double> n01(0.0, 1.0);
    Forcing f;
    f.center = center;
    f.width = width;
    f.amp = detail::random_coefficients(K, rng);
    for (int k = 1; k <= K; ++k) f.detune.push_back(std::pow(bracket(k), beta) * n01(rng));
    return f;
}

/// a(t) = \int_0^t e^{-c |t - s|} F(s) ds on the grid, by exact decay per step
/// and 8-point Gauss-Legendre on each step.
inline std::vector<cplx> duhamel_profile(double c, const std::function<cplx(double)>& F, const TimeGrid& tg) {
    std::vector<double> x, w;
    detail::gauss_legendre(8, x, w);
    const double h = tg.dt;
    const double decay = std::exp(-c * h);
    std::vector<cplx> a(static_cast<std::size_t>(tg.M));
    // Index of the sample closest to t = 0; the recursion starts exactly at 0.
    const int m0 = static_cast<int>(std::lround(-tg.t0 / h));
    const double origin = tg.t(m0);
    auto step_integral = [&](double lo, double end, int sign) {
        // sign > 0: \int_lo^{lo+h} e^{-c(lo+h-s)} F; sign < 0: \int_{lo}^{lo+h} e^{-c(s-lo)} F.
        cplx acc{};
        for (std::size_t q = 0; q < x.size(); ++q) {
            const double s = lo + 0.5 * h * (1.0 + x[q]);
            const double lag = sign > 0 ? end - s : s - lo;
            acc += w[q] * std::exp(-c * lag) * F(s);
        }
        return 0.5 * h * acc;
    };
    // Start from the exact value at the grid point nearest 0 (small offset integral).
    cplx start{};
    if (origin != 0.0) {
        const double lo = std::min(0.0, origin), hi = std::max(0.0, origin);
        cplx acc{};
        for (std::size_t q = 0; q < x.size(); ++q) {
            const double s = lo + 0.5 * (hi - lo) * (1.0 + x[q]);
            acc += w[q] * std::exp(-c * std::abs(origin - s)) * F(s);
        }
        start = (origin > 0.0 ? 1.0 : -1.0) * 0.5 * (hi - lo) * acc;
    }
    if (m0 >= 0 && m0 < tg.M) a[static_cast<std::size_t>(m0)] = start;
    cplx cur = start;
    for (int m = m0 + 1; m < tg.M; ++m) {
        const double lo = tg.t(m - 1);
        cur = decay * cur + step_integral(lo, lo + h, +1);
        if (m >= 0) a[static_cast<std::size_t>(m)] = cur;
    }
    cur = start;
    for (int m = m0 - 1; m >= 0; --m) {
        const double lo = tg.t(m);
        cur = decay * cur - step_integral(lo, lo + h, -1);
        if (m < tg.M) a[static_cast<std::size_t>(m)] = cur;
    }
    return a;
}

struct DuhamelOptions {
    double dt = 0.05;
    double decay_tol = 1e-8;
    /// Length of the untapered window after the forcing; 0 picks log(1/decay_tol) / c_min.
    double tail = 0.0;
    int pad = 4;
};

struct DuhamelValue {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

/// |\int_0^t S(t-s) f(s) ds|_{Z^b} against |D^{-beta(b-1/2)} f|_{Z^{b-1}} for one forcing.
inline DuhamelValue duhamel_value(const ZbParams& zb, const DampingDecomposition& d, const Forcing& f,
                                  const DuhamelOptions& opt = {}) {
    if (!(zb.b > 0.5 && zb.b < 1.5)) throw ArgumentError("duhamel_smoothing_ratio: b must lie in (1/2, 3/2)");
    const int K = f.K();
    if (K < 1 || K > d.kmax()) throw ArgumentError("duhamel_smoothing_ratio: forcing band exceeds kmax");
    if (!(f.center - 8.0 * f.width >= 0.0)) throw ArgumentError("duhamel_smoothing_ratio: forcing must start after t = 0");
    double c_min = d.c(1);
    for (int k = 1; k <= K; ++k) c_min = std::min({c_min, d.c(k), d.c(-k)});
    const double tail = opt.tail > 0.0 ? opt.tail : std::log(1.0 / opt.decay_tol) / c_min;
    detail::check_decay(c_min, tail, opt.decay_tol, "duhamel_smoothing_ratio");
    const double hi = f.center + 8.0 * f.width + tail;
    const auto pw = detail::padded_window(0.0, hi, opt.dt);
    const TorusGrid grid = TorusGrid::make(K, 2 * K + 2);

    SpaceTimeField lhs(grid, zb.alpha, pw.grid), rhs(grid, zb.alpha, pw.grid);
    for (int k = 1; k <= K; ++k) {
        const auto a = duhamel_profile(d.c(k), [&](double s) { return f(k, s); }, pw.grid);
        for (int m = 0; m < pw.grid.M; ++m) {
            lhs.profile(k, m) = a[static_cast<std::size_t>(m)];
            rhs.profile(k, m) = f(k, pw.grid.t(m));
        }
    }
    ZbParams zr = zb;
    zr.b = zb.b - 1.0;
    const double s = -zb.beta * (zb.b - 0.5);
    DuhamelValue v;
    v.lhs = znorm(lhs.transform(pw.window, opt.pad), zb);
    v.rhs = znorm(rhs.transform(pw.window, opt.pad), zr,
                  [s](int k) { return std::pow(std::abs(static_cast<double>(k)), s); });
    if (!(v.rhs > 0.0)) throw ArgumentError("duhamel_smoothing_ratio: zero forcing");
    v.ratio = v.lhs / v.rhs;
    return v;
}

inline RatioStats duhamel_smoothing_ratio(const ZbParams& zb, const DampingDecomposition& d, int K, int forcings,
                                          std::uint64_t seed = 0, const DuhamelOptions& opt = {}) {
    if (forcings < 1) throw ArgumentError("duhamel_smoothing_ratio: need at least one forcing");
    std::mt19937_64 rng(seed);
    std::vector<double> out;
    for (int i = 0; i < forcings; ++i) out.push_back(duhamel_value(zb, d, random_forcing(K, zb.beta, rng), opt).ratio);
    return summarize(std::move(out));
}

} // namespace dgbo

#endif

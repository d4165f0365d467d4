#ifndef DGBO_DAMPING_HPP
#define DGBO_DAMPING_HPP

// Localized damping G h = g (h - \int g h) and the split of G D^beta G into a
// diagonal part (multiplication by c_k), the off-diagonal coupling N1 and a
// finite-rank remainder R.
//
// Every operator here is the exact Galerkin compression to |k| <= K: the
// intermediate products g*v, D^beta(g*v) are carried at full bandwidth
// (|m| <= K + H, H the decay horizon of ghat) and only the final output is
// projected. With that convention c_k is literally the diagonal of
// v -> P_K g D^beta (g v).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dgbo/spectral.hpp"

namespace dgbo {

enum class ProfileKind { constant, raised_cosine, smooth_bump };

inline std::string to_string(ProfileKind k) {
    switch (k) {
    case ProfileKind::constant: return "constant";
    case ProfileKind::raised_cosine: return "raised_cosine";
    case ProfileKind::smooth_bump: return "smooth_bump";
    }
    return "?";
}

inline ProfileKind profile_kind_from_string(const std::string& s) {
    if (s == "constant") return ProfileKind::constant;
    if (s == "raised_cosine") return ProfileKind::raised_cosine;
    if (s == "smooth_bump") return ProfileKind::smooth_bump;
    throw ArgumentError("unknown profile kind '" + s + "'");
}

struct Interval {
    double a = -kPi;
    double b = kPi;
    double length() const { return b - a; }
    double center() const { return 0.5 * (a + b); }
};

namespace detail {

// sin(z)/z, accurate near 0.
inline double sinc(double z) {
    if (std::abs(z) < 1e-4) return 1.0 - z * z / 6.0;
    return std::sin(z) / z;
}

inline double bump_shape(double s) { return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }

} // namespace detail

/// Nonnegative profile g with \int_T g = 1 and its Fourier coefficients.
class DampingProfile {
public:
    static constexpr int kClosedFormBand = 1 << 17;
    static constexpr int kMinQuadraturePoints = 1 << 17;

    static DampingProfile build(ProfileKind kind, Interval support, const TorusGrid& grid) {
        DampingProfile p;
        p.kind_ = kind;
        p.grid_ = grid;
        if (kind == ProfileKind::constant) support = Interval{-kPi, kPi};
        if (!(support.a < support.b)) throw ProfileError("damping profile: empty support");
        if (support.a < -kPi - 1e-12 || support.b > kPi + 1e-12)
            throw ProfileError("damping profile: support must lie in [-pi, pi]");
        p.support_ = support;

        switch (kind) {
        case ProfileKind::constant:
            p.table_ = Spectrum(0);
            p.table_[0] = 1.0 / kTwoPi;
            p.truncation_bound_ = 0.0;
            break;
        case ProfileKind::raised_cosine: p.fill_raised_cosine(); break;
        case ProfileKind::smooth_bump: p.fill_by_quadrature(); break;
        }
        p.check_nonnegative();
        return p;
    }

    ProfileKind kind() const { return kind_; }
    const Interval& support() const { return support_; }
    const TorusGrid& grid() const { return grid_; }

    /// Exact profile value g(x), x taken modulo 2pi into [-pi, pi).
    double value(double x) const {
        x = std::remainder(x, kTwoPi);
        switch (kind_) {
        case ProfileKind::constant: return 1.0 / kTwoPi;
        case ProfileKind::raised_cosine: {
            if (x < support_.a || x > support_.b) return 0.0;
            const double L = support_.length();
            return (1.0 + std::cos(kTwoPi * (x - support_.center()) / L)) / L;
        }
        case ProfileKind::smooth_bump: {
            const double s = (2.0 * x - support_.a - support_.b) / support_.length();
            return detail::bump_shape(s) / bump_mass_;
        }
        }
        return 0.0;
    }

    /// ghat_j, zero beyond the stored table.
    cplx coeff(int j) const { return table_.get(j); }
    int table_band() const { return table_.band(); }

    /// ghat restricted to |j| <= band.
    Spectrum ghat(int band) const { return table_.resized(band); }
    Spectrum ghat() const { return ghat(grid_.K); }

    /// Smallest H such that sum_{|j|>H} (|j| + K)^beta |ghat_j|^2 <= tol |ghat_0|^2.
    /// Throws PrecisionError when the table does not decay that far.
    int horizon(double beta, int K, double tol = 1e-14) const {
        const int J = table_.band();
        if (J == 0) return 0;
        std::vector<double> suffix(static_cast<std::size_t>(J + 2), 0.0);
        for (int j = J; j >= 1; --j) {
            const double w = std::pow(static_cast<double>(j + K), beta);
            suffix[static_cast<std::size_t>(j)] =
                suffix[static_cast<std::size_t>(j + 1)] + w * (std::norm(table_[j]) + std::norm(table_[-j]));
        }
        const double target = tol * std::norm(table_[0]);
        int H = 0;
        while (H < J && suffix[static_cast<std::size_t>(H + 1)] > target) ++H;
        if (H > J / 2)
            throw PrecisionError("damping profile (" + to_string(kind_) + "): coefficient tail does not reach " +
                                 std::to_string(tol) + " within the first half of " + std::to_string(J) +
                                 " stored modes; profile is not smooth enough");
        return H;
    }

    /// sup-norm bound of the series truncation sum_{|j|>H} |ghat_j|.
    double tail_l1(int H) const {
        double s = 0.0;
        for (int j = H + 1; j <= table_.band(); ++j) s += std::abs(table_[j]) + std::abs(table_[-j]);
        return s + truncation_bound_;
    }

private:
    void fill_raised_cosine() {
        // ghat_j = e^{-ijc}/(2 pi L) [S(j) + S(j - w)/2 + S(j + w)/2],
        // S(nu) = L sinc(nu L / 2), w = 2 pi / L.
        const double L = support_.length(), c = support_.center(), w = kTwoPi / L;
        auto S = [L](double nu) { return L * detail::sinc(0.5 * nu * L); };
        table_ = Spectrum(kClosedFormBand);
        for (int j = -kClosedFormBand; j <= kClosedFormBand; ++j) {
            const double jj = j;
            const double mag = (S(jj) + 0.5 * S(jj - w) + 0.5 * S(jj + w)) / (kTwoPi * L);
            table_[j] = std::polar(mag, -jj * c);
        }
        table_[0] = 1.0 / kTwoPi;
        truncation_bound_ = 0.0;
    }

    void fill_by_quadrature() {
        const int n = std::max(8 * grid_.K, kMinQuadraturePoints);
        std::vector<cplx> samples(static_cast<std::size_t>(n));
        double mass = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = -kPi + kTwoPi * i / n;
            const double s = (2.0 * x - support_.a - support_.b) / support_.length();
            const double v = detail::bump_shape(s);
            samples[static_cast<std::size_t>(i)] = v;
            mass += v;
        }
        mass *= kTwoPi / n;
        if (!(mass > 0.0)) throw ProfileError("smooth_bump: support too narrow for the quadrature grid");
        bump_mass_ = mass;
        for (auto& z : samples) z /= mass;
        table_ = detail::analyze(samples, n / 4);
        table_[0] = 1.0 / kTwoPi;
        for (int j = 1; j <= table_.band(); ++j) {
            const cplx z = 0.5 * (table_[j] + std::conj(table_[-j]));
            table_[j] = z;
            table_[-j] = std::conj(z);
        }
        truncation_bound_ = 0.0;
    }

    void check_nonnegative() const {
        const TorusGrid& g = grid_;
        for (int j = 0; j < g.N; ++j)
            if (value(g.x(j)) < -1e-12) throw ProfileError("damping profile: negative value at a collocation point");
        if (kind_ == ProfileKind::constant) return;
        // Series truncated to the table: allowed to dip below zero only by its own
        // truncation bound.
        const int n = 4 * table_.band();
        const auto vals = detail::synthesize(table_, n);
        const double allowance = 1e-12 + 1e-9 * (1.0 / support_.length());
        for (const auto& z : vals)
            if (z.real() < -allowance) throw ProfileError("damping profile: truncated series is negative");
    }

    ProfileKind kind_ = ProfileKind::constant;
    Interval support_{};
    TorusGrid grid_{};
    Spectrum table_;
    double bump_mass_ = 1.0;
    double truncation_bound_ = 0.0;
};

// ---------------------------------------------------------------------------
// Operators on coefficient arrays (complex-linear, any band).

/// \int_T g h dx = 2 pi sum_j ghat_{-j} h_j.
inline cplx integral_against(const Spectrum& ghat, const Spectrum& h) {
    const int m = std::min(ghat.band(), h.band());
    cplx s{};
    for (int j = -m; j <= m; ++j) s += ghat[-j] * h[j];
    return kTwoPi * s;
}

/// G h = g h - g \int g h, carried at band min(out_band, h.band() + ghat.band()).
inline Spectrum apply_G(const Spectrum& ghat, const Spectrum& h, int out_band) {
    Spectrum gh = convolve(ghat, h, out_band);
    const cplx mean = integral_against(ghat, h);
    gh.axpy(-mean, ghat.resized(std::min(out_band, ghat.band())));
    return gh;
}

inline Spectrum apply_G(const DampingProfile& profile, const Spectrum& h, int H) {
    const Spectrum ghat = profile.ghat(H);
    return apply_G(ghat, h, h.band() + H);
}

/// Diagonal data c_k = sum_m |m|^beta |ghat_{m-k}|^2 plus the constants of
/// the two-sided bound |k|^beta ghat_0^2 <= c_k <= C(g) (1 + |k|^beta).
class DampingDecomposition {
public:
    DampingDecomposition() = default;

    const DampingProfile& profile() const { return profile_; }
    double beta() const { return beta_; }
    /// Largest |k| with a stored c_k.
    int kmax() const { return kmax_; }
    int K() const { return profile_.grid().K; }
    /// Decay horizon H; sums over m run over |m| <= kmax + H.
    int horizon() const { return horizon_; }
    double c(int k) const {
        if (k == 0 || std::abs(k) > kmax_) throw ArgumentError("c_k requested outside 1 <= |k| <= kmax");
        return c_[static_cast<std::size_t>(k + kmax_)];
    }
    double c_min() const {
        double m = c(1);
        for (int k = 1; k <= kmax_; ++k) m = std::min({m, c(k), c(-k)});
        return m;
    }
    double lower_bound(int k) const { return std::pow(std::abs(static_cast<double>(k)), beta_) * std::norm(profile_.coeff(0)); }
    double upper_constant() const { return upper_constant_; }
    double upper_bound(int k) const { return upper_constant_ * (1.0 + std::pow(std::abs(static_cast<double>(k)), beta_)); }
    /// Neglected part of every m-sum, relative to ghat_0^2.
    double tail_bound() const { return tail_bound_; }

    Spectrum ghat() const { return profile_.ghat(horizon_); }

    friend DampingDecomposition compute_ck(const DampingProfile& profile, double beta, int kmax);

private:
    DampingProfile profile_;
    double beta_ = 0.0;
    int kmax_ = 0;
    int horizon_ = 0;
    std::vector<double> c_;
    double upper_constant_ = 0.0;
    double tail_bound_ = 0.0;
};

/// c_k for 1 <= |k| <= kmax.
inline DampingDecomposition compute_ck(const DampingProfile& profile, double beta, int kmax) {
    if (beta < 0.0) throw ArgumentError("compute_ck: beta must be >= 0");
    if (kmax < 1) throw ArgumentError("compute_ck: kmax must be >= 1");
    DampingDecomposition d;
    d.profile_ = profile;
    d.beta_ = beta;
    d.kmax_ = kmax;
    constexpr double tol = 1e-14;
    d.horizon_ = profile.horizon(beta, kmax, tol);
    d.tail_bound_ = tol;
    const int H = d.horizon_;
    std::vector<double> w(static_cast<std::size_t>(2 * H + 1));
    for (int j = -H; j <= H; ++j) w[static_cast<std::size_t>(j + H)] = std::norm(profile.coeff(j));
    d.c_.assign(static_cast<std::size_t>(2 * kmax + 1), 0.0);
    for (int k = -kmax; k <= kmax; ++k) {
        if (k == 0) continue;
        // m = k + j
        double s = 0.0;
        for (int j = -H; j <= H; ++j) s += std::pow(std::abs(static_cast<double>(k + j)), beta) * w[static_cast<std::size_t>(j + H)];
        d.c_[static_cast<std::size_t>(k + kmax)] = s;
    }
    // |m|^beta <= s_beta (|m-k|^beta + |k|^beta) with s_beta = max(1, 2^{beta-1}).
    double seminorm = 0.0, l2 = 0.0;
    for (int j = -H; j <= H; ++j) {
        seminorm += std::pow(std::abs(static_cast<double>(j)), beta) * w[static_cast<std::size_t>(j + H)];
        l2 += w[static_cast<std::size_t>(j + H)];
    }
    const double s_beta = std::max(1.0, std::pow(2.0, beta - 1.0));
    d.upper_constant_ = s_beta * std::max(seminorm, l2);
    return d;
}

inline DampingDecomposition compute_ck(const DampingProfile& profile, double beta) {
    return compute_ck(profile, beta, profile.grid().K);
}

// --- the three pieces, on coefficient arrays of band K ----------------------

/// P_K G D^beta G v, evaluated literally as G(D^beta(G v)).
inline Spectrum gdg_spectrum(const DampingDecomposition& d, const Spectrum& v) {
    const Spectrum ghat = d.ghat();
    const int H = d.horizon();
    const Spectrum gv = apply_G(ghat, v, v.band() + H);
    const Spectrum dgv = apply_fractional(gv, d.beta());
    return apply_G(ghat, dgv, v.band());
}

/// P_K [g D^beta (g v)].
inline Spectrum g_dbeta_g_spectrum(const DampingDecomposition& d, const Spectrum& v) {
    const Spectrum ghat = d.ghat();
    const Spectrum gv = convolve(ghat, v, v.band() + d.horizon());
    return convolve(ghat, apply_fractional(gv, d.beta()), v.band());
}

/// N1[v]_k = sum_m sum_{n != k} |m|^beta ghat_{k-m} ghat_{m-n} v_n for k != 0.
inline Spectrum n1_spectrum(const DampingDecomposition& d, const Spectrum& v) {
    Spectrum out = g_dbeta_g_spectrum(d, v);
    for (int k = -v.band(); k <= v.band(); ++k) out[k] = (k == 0) ? cplx{} : out[k] - d.c(k) * v[k];
    return out;
}

/// c_k v_k.
inline Spectrum diagonal_spectrum(const DampingDecomposition& d, const Spectrum& v) {
    Spectrum out(v.band());
    for (int k = -v.band(); k <= v.band(); ++k) out[k] = (k == 0) ? cplx{} : d.c(k) * v[k];
    return out;
}

/// Closed form of R = G D^beta G - (c_k) - N1 on the modes k != 0:
///     R[v] = -(\int g D^beta(g v)) g - (\int g v) G[D^beta g].
/// Both functionals and both vectors are precomputed; R has rank <= 2.
class RemainderOperator {
public:
    RemainderOperator(const DampingDecomposition& d, int K) : K_(K) {
        const Spectrum ghat = d.ghat();
        const int H = d.horizon();
        const Spectrum dg = apply_fractional(ghat, d.beta());
        p_ = convolve(ghat, dg, K);  // g D^beta g
        double energy = 0.0;         // \int g D^beta g
        for (int m = -H; m <= H; ++m) energy += std::pow(std::abs(static_cast<double>(m)), d.beta()) * std::norm(ghat[m]);
        energy *= kTwoPi;
        r_ = p_;
        r_.axpy(-energy, ghat.resized(K));  // G[D^beta g]
        g_ = ghat.resized(K);
    }

    Spectrum apply(const Spectrum& v) const {
        const cplx a = integral_against(p_, v);  // \int (g D^beta g) v
        const cplx s = integral_against(g_, v);  // \int g v
        Spectrum out(v.band());
        for (int k = -v.band(); k <= v.band(); ++k)
            out[k] = (k == 0 || std::abs(k) > K_) ? cplx{} : -a * g_.get(k) - s * r_.get(k);
        return out;
    }

    /// The two left/right vector pairs: R = -g (x) p~ - r (x) g~.
    const Spectrum& g() const { return g_; }
    const Spectrum& g_dbeta_g() const { return p_; }
    const Spectrum& G_dbeta_g() const { return r_; }

private:
    int K_;
    Spectrum p_, r_, g_;
};

inline Spectrum r_spectrum(const DampingDecomposition& d, const Spectrum& v) {
    return RemainderOperator(d, v.band()).apply(v);
}

// --- field-level wrappers ----------------------------------------------------

inline void check_grid(const DampingDecomposition& d, const SpectralField& v, const char* where) {
    if (v.K() > d.kmax()) throw ArgumentError(std::string(where) + ": field K exceeds the decomposition's kmax");
    require_same_grid(d.profile().grid(), v.grid(), where);
}

inline SpectralField apply_GDbetaG(const DampingDecomposition& d, const SpectralField& v) {
    check_grid(d, v, "apply_GDbetaG");
    return project_mean_zero(v.grid(), gdg_spectrum(d, v.coeffs()));
}

inline SpectralField apply_N1(const DampingDecomposition& d, const SpectralField& v) {
    check_grid(d, v, "apply_N1");
    return SpectralField(v.grid(), n1_spectrum(d, v.coeffs()));
}

inline SpectralField apply_R(const DampingDecomposition& d, const SpectralField& v) {
    check_grid(d, v, "apply_R");
    return SpectralField(v.grid(), r_spectrum(d, v.coeffs()));
}

inline SpectralField apply_Dtilde(const DampingDecomposition& d, const SpectralField& v) {
    check_grid(d, v, "apply_Dtilde");
    return SpectralField(v.grid(), diagonal_spectrum(d, v.coeffs()));
}

// --- dense matrices on the 2K mean-zero modes --------------------------------

/// Matrix of a complex-linear map on band-K spectra, assembled column by column.
template <class Op>
Eigen::MatrixXcd dense_matrix(Op&& op, int K) {
    Eigen::MatrixXcd M(2 * K, 2 * K);
    for (int i = 0; i < 2 * K; ++i) {
        Spectrum e(K);
        e[mode_of_index(i, K)] = 1.0;
        M.col(i) = to_modes(op(e), K);
    }
    return M;
}

inline Eigen::MatrixXcd gdg_matrix(const DampingDecomposition& d, int K) {
    return dense_matrix([&](const Spectrum& e) { return gdg_spectrum(d, e); }, K);
}

inline Eigen::MatrixXcd n1_matrix(const DampingDecomposition& d, int K) {
    return dense_matrix([&](const Spectrum& e) { return n1_spectrum(d, e); }, K);
}

inline Eigen::MatrixXcd r_matrix(const DampingDecomposition& d, int K) {
    RemainderOperator R(d, K);
    return dense_matrix([&](const Spectrum& e) { return R.apply(e); }, K);
}

inline Eigen::MatrixXcd diagonal_matrix(const DampingDecomposition& d, int K) {
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(2 * K, 2 * K);
    for (int i = 0; i < 2 * K; ++i) M(i, i) = d.c(mode_of_index(i, K));
    return M;
}

} // namespace dgbo

#endif

#ifndef DGBO_SEMIGROUP_HPP
#define DGBO_SEMIGROUP_HPP

// Linear dynamics: the diagonal semigroup S(t), the full linear semigroup
// W(t) = exp(tA) with A = -(D^alpha d/dx + G D^beta G), and the stabilization
// diagnostics built on it (spectral abscissa, observability Gramian, Ingham
// gaps, biorthogonal families, restricted-strip Gramians).
//
// Matrices act on mode vectors (see spectral.hpp). The Euclidean norm of a mode
// vector is the L^2 norm up to the constant factor sqrt(2 pi), which cancels in
// every ratio and eigenvalue reported here.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "dgbo/damping.hpp"
#include "dgbo/fit.hpp"
#include "dgbo/integrator.hpp"
#include "dgbo/model.hpp"

namespace dgbo {

// --- S(t) -------------------------------------------------------------------

/// F[S(t) f]_k = exp(-i L_k t - c_k |t|) f_k.
inline Spectrum apply_S(double alpha, const DampingDecomposition& d, const Spectrum& f, double t) {
    Spectrum out(f.band());
    for (int k = -f.band(); k <= f.band(); ++k) {
        if (k == 0) continue;
        const double L = ModelParams::dispersion_relation(k, alpha);
        out[k] = std::exp(cplx{-d.c(k) * std::abs(t), -L * t}) * f[k];
    }
    return out;
}

inline SpectralField apply_S(const ModelParams& params, const DampingDecomposition& d, const SpectralField& f, double t) {
    return SpectralField(f.grid(), apply_S(params.alpha, d, f.coeffs(), t));
}

/// Time transform of e^{-c|t|} restricted to t >= 0 (the even part): c / (c^2 + tau^2).
inline double phi_k(double c, double tau) {
    if (!(c > 0.0)) throw ArgumentError("phi_k: c must be > 0");
    return c / (c * c + tau * tau);
}

/// Transform of sgn(t) e^{-c|t|} (odd part): tau / (c^2 + tau^2).
inline double phi_k_a(double c, double tau) {
    if (!(c > 0.0)) throw ArgumentError("phi_k_a: c must be > 0");
    return tau / (c * c + tau * tau);
}

// --- A and W(t) --------------------------------------------------------------

struct LinearOperatorMatrix {
    int K = 0;
    double alpha = 0.0;
    Eigen::MatrixXcd A;        // -(dispersion + damping)
    Eigen::MatrixXcd damping;  // G D^beta G on the truncated space, Hermitian PSD
    Eigen::VectorXcd lambda;   // exactly propagated diagonal: -i L_k - c_k
    Eigen::MatrixXcd coupling; // A - diag(lambda)

    int dim() const { return 2 * K; }
};

inline LinearOperatorMatrix build_linear_matrix(const ModelParams& params, const DampingDecomposition& d, int K) {
    params.validate_linear();
    if (K < 1) throw ArgumentError("build_linear_matrix: K must be >= 1");
    if (K > d.kmax()) throw ArgumentError("build_linear_matrix: K exceeds the decomposition's kmax");
    LinearOperatorMatrix m;
    m.K = K;
    m.alpha = params.alpha;
    m.damping = gdg_matrix(d, K);
    // Columns from the operators themselves: A e = -(D^alpha d/dx e + G D^beta G e).
    const Eigen::MatrixXcd disp =
        dense_matrix([&](const Spectrum& e) { return apply_dispersion(e, params.alpha); }, K);
    m.A = -(disp + m.damping);
    m.lambda.resize(2 * K);
    for (int i = 0; i < 2 * K; ++i) {
        const int k = mode_of_index(i, K);
        m.lambda(i) = cplx{-d.c(k), -params.L(k)};
    }
    m.coupling = m.A;
    m.coupling.diagonal() -= m.lambda;
    return m;
}

/// W(t) as a dense matrix (scaling and squaring).
inline Eigen::MatrixXcd propagator(const LinearOperatorMatrix& m, double t) {
    if (t < 0.0) throw ArgumentError("propagator: t must be >= 0");
    if (t == 0.0) return Eigen::MatrixXcd::Identity(m.dim(), m.dim());
    return (m.A * t).exp();
}

/// W(t) v0 by integrating-factor RK4 with the diagonal (dispersion + c_k) exact.
inline Eigen::VectorXcd apply_W_stepping(const LinearOperatorMatrix& m, const Eigen::VectorXcd& v0, double t,
                                          double max_step = 0.0) {
    if (t < 0.0) throw ArgumentError("apply_W: t must be >= 0");
    if (t == 0.0) return v0;
    // The coupling oscillates at differences of L_k in the rotating frame.
    if (max_step <= 0.0) max_step = std::min(1e-3, 0.1 / m.lambda.imag().cwiseAbs().maxCoeff());
    const int steps = std::max(1, static_cast<int>(std::ceil(t / max_step)));
    const detail::LawsonRK4 rk(m.lambda, t / steps);
    Eigen::VectorXcd v = v0;
    const auto N = [&](const Eigen::VectorXcd& u) -> Eigen::VectorXcd { return m.coupling * u; };
    for (int s = 0; s < steps; ++s) v = rk.step(v, N);
    return v;
}

inline constexpr int kExpmMaxK = 64;

inline Eigen::VectorXcd apply_W(const LinearOperatorMatrix& m, const Eigen::VectorXcd& v0, double t) {
    if (t < 0.0) throw ArgumentError("apply_W: t must be >= 0");
    if (m.K <= kExpmMaxK) return propagator(m, t) * v0;
    return apply_W_stepping(m, v0, t);
}

inline SpectralField apply_W(const LinearOperatorMatrix& m, const SpectralField& v0, double t) {
    if (v0.K() != m.K) throw ArgumentError("apply_W: field K does not match the matrix");
    Eigen::VectorXcd v = apply_W(m, to_modes(v0.coeffs(), m.K), t);
    symmetrize_modes(v, m.K);
    return field_from_modes(v0.grid(), v);
}

// --- spectrum ----------------------------------------------------------------

struct SpectrumReport {
    std::vector<cplx> eigenvalues;  // sorted by decreasing real part
    double spectral_abscissa = 0.0;
};

inline SpectrumReport spectral_abscissa(const LinearOperatorMatrix& m) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m.A, false);
    if (es.info() != Eigen::Success)
        throw NumericalError("spectral_abscissa: eigen-solver did not converge (dim " + std::to_string(m.dim()) + ")");
    SpectrumReport r;
    r.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(r.eigenvalues.begin(), r.eigenvalues.end(),
              [](const cplx& a, const cplx& b) { return a.real() > b.real(); });
    r.spectral_abscissa = r.eigenvalues.front().real();
    return r;
}

struct DecayFit {
    double rate = 0.0;  // lambda in |W(t) v0| ~ C e^{-lambda t}
    LineFit line;
};

/// Least-squares decay rate of |W(t) v0| over the final third of [0, T].
inline DecayFit semigroup_decay_rate(const LinearOperatorMatrix& m, const Eigen::VectorXcd& v0, double T,
                                     int samples = 300) {
    if (!(T > 0.0) || samples < 30) throw ArgumentError("semigroup_decay_rate: need T > 0 and >= 30 samples");
    const double dt = T / samples;
    const Eigen::MatrixXcd step = propagator(m, dt);
    Eigen::VectorXcd v = v0;
    std::vector<double> ts, ys;
    for (int i = 1; i <= samples; ++i) {
        v = step * v;
        const double t = i * dt;
        if (t >= 2.0 * T / 3.0) {
            const double n = v.norm();
            if (!(n > 0.0) || !std::isfinite(n)) break;
            ts.push_back(t);
            ys.push_back(std::log(n));
        }
    }
    if (ts.size() < 10) throw PrecisionError("semigroup_decay_rate: norm underflowed before the fitting window");
    DecayFit f;
    f.line = fit_line(ts, ys);
    f.rate = -f.line.slope;
    return f;
}

// --- observability Gramian -----------------------------------------------------

struct GramianReport {
    double T = 0.0;
    double min_eigenvalue = 0.0;
    double energy_residual = 0.0;  // max over unit v of |2<Mv,v> - (|v|^2 - |W(T)v|^2)|
    int panels = 0;
    int order = 0;
    Eigen::MatrixXcd M;
};

namespace detail {

// Full Gauss-Legendre rule on [-1, 1].
template <int Order>
void gauss_legendre(std::vector<double>& x, std::vector<double>& w) {
    using Rule = boost::math::quadrature::gauss<double, Order>;
    const auto& a = Rule::abscissa();
    const auto& b = Rule::weights();
    x.clear();
    w.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) {
            x.push_back(0.0);
            w.push_back(b[i]);
            continue;
        }
        x.push_back(a[i]);
        w.push_back(b[i]);
        x.push_back(-a[i]);
        w.push_back(b[i]);
    }
}

inline void gauss_legendre(int order, std::vector<double>& x, std::vector<double>& w) {
    switch (order) {
    case 4: gauss_legendre<4>(x, w); break;
    case 8: gauss_legendre<8>(x, w); break;
    case 10: gauss_legendre<10>(x, w); break;
    case 15: gauss_legendre<15>(x, w); break;
    case 20: gauss_legendre<20>(x, w); break;
    case 25: gauss_legendre<25>(x, w); break;
    case 30: gauss_legendre<30>(x, w); break;
    default: throw ArgumentError("Gauss-Legendre order must be one of 4, 8, 10, 15, 20, 25, 30");
    }
}

// Composite rule on 2^levels equal panels. Every panel integral is a
// conjugation of the first one, M_[t,t+h] = W(t)^* M_[0,h] W(t), so the sum is
// accumulated by interval doubling: M_[0,2s] = M_[0,s] + W(s)^* M_[0,s] W(s).
inline Eigen::MatrixXcd gramian_panels(const LinearOperatorMatrix& m, double T, int levels,
                                       const std::vector<double>& x, const std::vector<double>& w) {
    const int n = m.dim();
    const double h = std::ldexp(T, -levels);
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Eigen::MatrixXcd W = propagator(m, 0.5 * h * (x[i] + 1.0));
        M.noalias() += (0.5 * h * w[i]) * (W.adjoint() * (m.damping * W));
    }
    Eigen::MatrixXcd step = propagator(m, h);
    for (int l = 0; l < levels; ++l) {
        M += step.adjoint() * M * step;
        step = step * step;
    }
    return 0.5 * (M + M.adjoint());
}

} // namespace detail

/// M(T) = \int_0^T W(t)^* (G D^beta G) W(t) dt by composite Gauss-Legendre,
/// doubling the panel count until the energy identity
///     2 M(T) = I - W(T)^* W(T)
/// holds to `tol` in operator norm.
inline GramianReport observability_gramian(const LinearOperatorMatrix& m, double T, int order = 30,
                                           double tol = 1e-8, int max_panels = 4096) {
    if (!(T > 0.0)) throw ArgumentError("observability_gramian: T must be > 0");
    std::vector<double> x, w;
    detail::gauss_legendre(order, x, w);
    const Eigen::MatrixXcd WT = propagator(m, T);
    const Eigen::MatrixXcd defect = Eigen::MatrixXcd::Identity(m.dim(), m.dim()) - WT.adjoint() * WT;

    GramianReport r;
    r.T = T;
    r.order = order;
    int panels = 1;
    double residual = 0.0;
    for (int levels = 0; panels <= max_panels; ++levels, panels *= 2) {
        r.M = detail::gramian_panels(m, T, levels, x, w);
        const Eigen::MatrixXcd E = 2.0 * r.M - defect;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (E + E.adjoint()), Eigen::EigenvaluesOnly);
        residual = es.eigenvalues().cwiseAbs().maxCoeff();
        if (residual < tol) break;
    }
    if (residual >= tol)
        throw PrecisionError("observability_gramian: energy residual " + std::to_string(residual) +
                             " above tolerance after " + std::to_string(max_panels) + " panels");
    r.panels = panels;
    r.energy_residual = residual;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r.M, Eigen::EigenvaluesOnly);
    r.min_eigenvalue = es.eigenvalues().minCoeff();
    return r;
}

// --- Ingham ------------------------------------------------------------------

struct InghamReport {
    double alpha = 0.0;
    int K = 0;
    std::vector<int> modes;        // k, sorted by lambda
    std::vector<double> lambda;    // k |k|^alpha, increasing
    std::vector<double> gaps;      // lambda[i+1] - lambda[i]
    double gamma = 0.0;

    /// Min gap between consecutive lambda_n, lambda_{n'} with both |n|, |n'| > N.
    double gamma_inf(int N) const {
        double g = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < lambda.size(); ++i)
            if (std::abs(modes[i]) > N && std::abs(modes[i + 1]) > N && modes[i] * modes[i + 1] > 0)
                g = std::min(g, gaps[i]);
        return g;
    }
};

inline InghamReport ingham_gaps(double alpha, int K) {
    if (!(alpha > 0.0)) throw ArgumentError("ingham_gaps: alpha must be > 0");
    if (K < 1) throw ArgumentError("ingham_gaps: K must be >= 1");
    InghamReport r;
    r.alpha = alpha;
    r.K = K;
    for (int k = -K; k <= K; ++k) {
        r.modes.push_back(k);
        r.lambda.push_back(ModelParams::dispersion_relation(k, alpha));
    }
    r.gaps.resize(r.lambda.size() - 1);
    for (std::size_t i = 0; i + 1 < r.lambda.size(); ++i) r.gaps[i] = r.lambda[i + 1] - r.lambda[i];
    r.gamma = *std::min_element(r.gaps.begin(), r.gaps.end());
    return r;
}

namespace detail {

/// \int_0^T e^{i w t} dt = T sinc(wT/2) e^{iwT/2}.
inline cplx exp_integral(double w, double T) {
    return T * sinc(0.5 * w * T) * std::exp(cplx{0.0, 0.5 * w * T});
}

/// \int_a^b e^{i m x} dx.
inline cplx exp_integral(double m, double a, double b) { return exp_integral(m, b - a) * std::exp(cplx{0.0, m * a}); }

} // namespace detail

/// Gram matrix Gamma_jk = \int_0^T e^{i(lambda_j - lambda_k)t} dt over |k| <= K.
inline Eigen::MatrixXcd ingham_gram(double alpha, int K, double T) {
    const int n = 2 * K + 1;
    Eigen::MatrixXcd G(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            G(j, k) = detail::exp_integral(ModelParams::dispersion_relation(j - K, alpha) -
                                               ModelParams::dispersion_relation(k - K, alpha),
                                           T);
    return G;
}

struct BiorthogonalReport {
    double residual = 0.0;
    double condition = 0.0;
};

/// q_j = sum_l Q_jl e^{i lambda_l t} with Q = Gamma^{-1}; returns
/// max_{j != k} |<q_j, e_k>| + max_j |<q_j, e_j> - 1|.
inline BiorthogonalReport biorthogonal_residual(double alpha, int K, double T, double max_condition = 1e12) {
    const InghamReport ing = ingham_gaps(alpha, K);
    if (!(T > kPi / ing.gamma))
        throw ArgumentError("biorthogonal_residual: T = " + std::to_string(T) + " must exceed pi/gamma = " +
                            std::to_string(kPi / ing.gamma));
    const Eigen::MatrixXcd G = ingham_gram(alpha, K, T);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(G);
    const auto& s = svd.singularValues();
    BiorthogonalReport r;
    r.condition = s(0) / s(s.size() - 1);
    if (!(r.condition < max_condition))
        throw ConditioningError("biorthogonal_residual: Gram matrix condition number too large", r.condition);
    const Eigen::MatrixXcd Q = G.partialPivLu().inverse();
    const Eigen::MatrixXcd P = Q * G;
    double off = 0.0, diag = 0.0;
    for (int j = 0; j < P.rows(); ++j)
        for (int k = 0; k < P.cols(); ++k) {
            if (j == k) diag = std::max(diag, std::abs(P(j, k) - 1.0));
            else off = std::max(off, std::abs(P(j, k)));
        }
    r.residual = off + diag;
    return r;
}

/// Q_jk = \int_0^T e^{i(lambda_j - lambda_k)t} dt * \int_a^b e^{i(j-k)x} dx on |j|, |k| <= K.
inline Eigen::MatrixXcd ucp_matrix(double alpha, int K, double T, Interval window) {
    if (!(window.a < window.b)) throw ArgumentError("ucp_gramian: degenerate window");
    if (!(T > 0.0)) throw ArgumentError("ucp_gramian: T must be > 0");
    if (!(alpha > 0.0)) throw ArgumentError("ucp_gramian: alpha must be > 0");
    Eigen::MatrixXcd Q = ingham_gram(alpha, K, T);
    const int n = 2 * K + 1;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) Q(j, k) *= detail::exp_integral(static_cast<double>(j - k), window.a, window.b);
    return Q;
}

inline double ucp_gramian(double alpha, int K, double T, Interval window) {
    const Eigen::MatrixXcd Q = ucp_matrix(alpha, K, T, window);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (Q + Q.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

} // namespace dgbo

#endif

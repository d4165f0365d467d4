#ifndef DGBO_SOLVER_HPP
#define DGBO_SOLVER_HPP

// Pseudospectral integrator for the damped equation
//     v_t + D^alpha v_x + G D^beta G v = sigma (v^2)_x,
// written in the diagonal/off-diagonal split
//     v_t + (i L_k + c_k) v = -N1[v] - R[v] + sigma (v^2)_x.
// The diagonal symbol is propagated exactly (integrating factor); N1 + R is one
// dense matrix on the retained modes, and the product is dealiased.
//
// sigma = +1 is the damped equation as written; sigma = -1 flips the sign of the
// nonlinearity to match the undamped form; sigma = 0 gives the linear flow.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dgbo/damping.hpp"
#include "dgbo/fit.hpp"
#include "dgbo/integrator.hpp"
#include "dgbo/model.hpp"

namespace dgbo {

enum class InitialShape { zero, single_mode, packet, random };

inline std::string to_string(InitialShape s) {
    switch (s) {
    case InitialShape::zero: return "zero";
    case InitialShape::single_mode: return "single_mode";
    case InitialShape::packet: return "packet";
    case InitialShape::random: return "random";
    }
    return "?";
}

inline InitialShape initial_shape_from_string(const std::string& s) {
    if (s == "zero") return InitialShape::zero;
    if (s == "single_mode") return InitialShape::single_mode;
    if (s == "packet") return InitialShape::packet;
    if (s == "random") return InitialShape::random;
    throw ArgumentError("unknown initial shape '" + s + "'");
}

/// Initial data, scaled so that |v0|_{L^2} = amplitude.
struct InitialCondition {
    InitialShape shape = InitialShape::random;
    double amplitude = 1e-3;
    int mode = 1;          // single_mode: v0 ~ sin(mode x)
    double center = 4.0;   // packet: Gaussian envelope in |k|
    double width = 2.0;
    std::uint64_t seed = 0;  // random: <k>^{-2} complex Gaussian coefficients
};

inline SpectralField make_initial(const InitialCondition& ic, const TorusGrid& grid) {
    if (!(ic.amplitude >= 0.0)) throw ArgumentError("initial amplitude must be >= 0");
    Spectrum s(grid.K);
    switch (ic.shape) {
    case InitialShape::zero: return SpectralField::zero(grid);
    case InitialShape::single_mode:
        if (ic.mode < 1 || ic.mode > grid.K) throw ArgumentError("single_mode: mode must lie in 1..K");
        s[ic.mode] = cplx{0.0, -0.5};
        s[-ic.mode] = cplx{0.0, 0.5};
        break;
    case InitialShape::packet:
        if (!(ic.width > 0.0)) throw ArgumentError("packet: width must be > 0");
        for (int k = 1; k <= grid.K; ++k) {
            const double e = std::exp(-0.5 * (k - ic.center) * (k - ic.center) / (ic.width * ic.width));
            s[k] = e;
            s[-k] = e;
        }
        break;
    case InitialShape::random: {
        std::mt19937_64 rng(ic.seed);
        std::normal_distribution<double> n01;
        for (int k = 1; k <= grid.K; ++k) {
            const double w = 1.0 / (1.0 + static_cast<double>(k) * k);
            s[k] = w * cplx{n01(rng), n01(rng)};
            s[-k] = std::conj(s[k]);
        }
        break;
    }
    }
    const double n = l2_norm(s);
    if (n == 0.0) return SpectralField::zero(grid);
    s *= ic.amplitude / n;
    return SpectralField(grid, std::move(s));
}

struct SimConfig {
    ModelParams params;
    int K = 32;
    int N = 0;  // 0: smallest power of two >= 3K+1
    double dt = 1e-3;
    double T_final = 1.0;
    InitialCondition ic;
    int diagnostics_stride = 1;
    int snapshot_stride = 0;  // 0: initial and final state only
    double nonlinearity = 1.0;
    bool require_nonlinear_range = true;

    TorusGrid grid() const { return N == 0 ? TorusGrid::dealiased(K) : TorusGrid::make(K, N); }

    void validate() const {
        if (require_nonlinear_range && nonlinearity != 0.0) params.validate_nonlinear();
        else params.validate_linear();
        if (!(dt > 0.0)) throw ArgumentError("dt must be > 0");
        if (!(T_final >= dt)) throw ArgumentError("T_final must be >= dt");
        if (diagnostics_stride < 1) throw ArgumentError("diagnostics_stride must be >= 1");
        if (snapshot_stride < 0) throw ArgumentError("snapshot_stride must be >= 0");
        if (!grid().supports_products()) throw ArgumentError("N must be >= 3K+1 for dealiased products");
    }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> l2_norm;
    std::vector<double> mass_abs;
    std::vector<double> dissipation;  // |D^{beta/2} G v|^2
    std::vector<double> snapshot_times;
    std::vector<SpectralField> snapshots;
    double max_reality_defect = 0.0;
    std::size_t steps = 0;
};

/// Holds everything a run needs: the split operator and an FFT workspace.
class DampedFlow {
public:
    DampedFlow(const ModelParams& params, const DampingDecomposition& d, const TorusGrid& grid,
               double nonlinearity = 1.0)
        : params_(params), grid_(grid), K_(grid.K), sigma_(nonlinearity) {
        if (d.kmax() < K_) throw ArgumentError("DampedFlow: decomposition does not cover K");
        if (!grid.supports_products()) throw ArgumentError("DampedFlow: N must be >= 3K+1");
        damping_ = gdg_matrix(d, K_);
        coupling_ = -damping_;
        lambda_.resize(2 * K_);
        for (int i = 0; i < 2 * K_; ++i) {
            const int k = mode_of_index(i, K_);
            coupling_(i, i) += d.c(k);
            lambda_(i) = cplx{-d.c(k), -params.L(k)};
        }
        coupling_norm_ = coupling_.operatorNorm();
    }

    int K() const { return K_; }
    const TorusGrid& grid() const { return grid_; }
    const Eigen::VectorXcd& lambda() const { return lambda_; }
    const Eigen::MatrixXcd& damping_matrix() const { return damping_; }
    /// -(N1 + R) as a matrix.
    const Eigen::MatrixXcd& coupling() const { return coupling_; }
    double nonlinearity() const { return sigma_; }

    /// (v^2)_x on the retained modes, dealiased.
    Eigen::VectorXcd dx_square(const Eigen::VectorXcd& v) const {
        const Spectrum s = from_modes(v, K_);
        auto f = detail::synthesize(s, grid_.N);
        for (auto& z : f) z = cplx{z.real() * z.real(), 0.0};
        const Spectrum sq = detail::analyze(f, K_);
        Eigen::VectorXcd out(2 * K_);
        for (int i = 0; i < 2 * K_; ++i) {
            const int k = mode_of_index(i, K_);
            out(i) = cplx{0.0, static_cast<double>(k)} * sq[k];
        }
        return out;
    }

    /// -N1[v] - R[v] + sigma (v^2)_x.
    Eigen::VectorXcd rhs(const Eigen::VectorXcd& v) const {
        Eigen::VectorXcd r = coupling_ * v;
        if (sigma_ != 0.0) r += sigma_ * dx_square(v);
        return r;
    }

    Eigen::VectorXcd step(const Eigen::VectorXcd& v, double dt) const {
        const detail::LawsonRK4 rk(lambda_, dt);
        return rk.step(v, [this](const Eigen::VectorXcd& u) { return rhs(u); });
    }

    /// |D^{beta/2} G v|^2 = <G D^beta G v, v>_{L^2}.
    double dissipation(const Eigen::VectorXcd& v) const { return kTwoPi * v.dot(damping_ * v).real(); }

    double l2(const Eigen::VectorXcd& v) const { return std::sqrt(kTwoPi) * v.norm(); }

    /// |(1/2pi) \int v| from the collocation values.
    double mass(const Eigen::VectorXcd& v) const {
        cplx s{};
        for (const auto& z : detail::synthesize(from_modes(v, K_), grid_.N)) s += z;
        return std::abs(s) / grid_.N;
    }

    /// Explicit-part stability number dt (|N1 + R| + K sup|v|); the dispersive
    /// and diagonal damping parts are exact.
    double cfl_number(const Eigen::VectorXcd& v, double dt) const {
        double sup = 0.0;
        for (const auto& z : detail::synthesize(from_modes(v, K_), grid_.N)) sup = std::max(sup, std::abs(z));
        return dt * (coupling_norm_ + 2.0 * std::abs(sigma_) * K_ * sup);
    }

private:
    ModelParams params_;
    TorusGrid grid_;
    int K_;
    double sigma_;
    Eigen::MatrixXcd damping_;
    Eigen::MatrixXcd coupling_;
    Eigen::VectorXcd lambda_;
    double coupling_norm_ = 0.0;
};

/// Non-diagonal right-hand side -N1[v] - R[v] + sigma (v^2)_x as a field.
inline SpectralField rhs(const ModelParams& params, const DampingDecomposition& d, const SpectralField& v,
                         double nonlinearity = 1.0) {
    const DampedFlow flow(params, d, v.grid(), nonlinearity);
    Eigen::VectorXcd r = flow.rhs(to_modes(v.coeffs(), v.K()));
    symmetrize_modes(r, v.K());
    return field_from_modes(v.grid(), r);
}

namespace detail {

inline void check_finite_state(const Eigen::VectorXcd& v, double t) {
    if (!v.allFinite()) throw BlowUpError("solution became non-finite at t = " + std::to_string(t), t);
}

} // namespace detail

/// One integrating-factor RK4 step of size dt.
inline SpectralField step(const SimConfig& config, const DampingDecomposition& d, const SpectralField& v, double dt) {
    if (!(dt > 0.0)) throw ArgumentError("step: dt must be > 0");
    const DampedFlow flow(config.params, d, v.grid(), config.nonlinearity);
    Eigen::VectorXcd u = flow.step(to_modes(v.coeffs(), v.K()), dt);
    detail::check_finite_state(u, dt);
    symmetrize_modes(u, v.K());
    return field_from_modes(v.grid(), u);
}

/// Integrate from v0 over [0, T_final] with the configured step and strides.
inline Trajectory simulate(const SimConfig& config, const DampingDecomposition& d, const SpectralField& v0) {
    config.validate();
    const TorusGrid grid = config.grid();
    require_same_grid(grid, v0.grid(), "simulate");
    const DampedFlow flow(config.params, d, grid, config.nonlinearity);
    const int K = grid.K;
    const long steps = std::lround(std::ceil(config.T_final / config.dt - 1e-9));
    const double dt = config.T_final / static_cast<double>(steps);
    const detail::LawsonRK4 rk(flow.lambda(), dt);
    const auto N = [&flow](const Eigen::VectorXcd& u) { return flow.rhs(u); };

    Trajectory tr;
    Eigen::VectorXcd v = to_modes(v0.coeffs(), K);
    const double n0 = flow.l2(v);
    auto record = [&](double t) {
        tr.times.push_back(t);
        tr.l2_norm.push_back(flow.l2(v));
        tr.mass_abs.push_back(flow.mass(v));
        tr.dissipation.push_back(flow.dissipation(v));
    };
    auto snapshot = [&](double t) {
        tr.snapshot_times.push_back(t);
        tr.snapshots.push_back(field_from_modes(grid, v));
    };
    record(0.0);
    snapshot(0.0);
    for (long n = 1; n <= steps; ++n) {
        const double t = n * dt;
        v = rk.step(v, N);
        detail::check_finite_state(v, t);
        tr.max_reality_defect = std::max(tr.max_reality_defect, symmetrize_modes(v, K));
        // The continuous flow never increases the L^2 norm.
        if (flow.l2(v) > 2.0 * n0 + 1e-300)
            throw BlowUpError("L2 norm doubled at t = " + std::to_string(t) + "; dt is above the stability bound", t);
        if (n % config.diagnostics_stride == 0 || n == steps) record(t);
        if ((config.snapshot_stride > 0 && n % config.snapshot_stride == 0) || n == steps) snapshot(t);
    }
    tr.steps = static_cast<std::size_t>(steps);
    return tr;
}

inline Trajectory simulate(const SimConfig& config) {
    config.validate();
    const TorusGrid grid = config.grid();
    const DampingDecomposition d = compute_ck(config.params.damping, config.params.beta, grid.K);
    return simulate(config, d, make_initial(config.ic, grid));
}

struct TrajectoryFit {
    double rate = 0.0;
    LineFit line;
    bool truncated = false;  // window shortened because the norm reached rounding level
};

/// Decay rate from the trailing window_fraction of the recorded l2 norms.
inline TrajectoryFit fit_decay_rate(std::span<const double> times, std::span<const double> norms,
                                    double window_fraction = 1.0 / 3.0) {
    if (times.size() != norms.size() || times.empty()) throw ArgumentError("fit_decay_rate: empty or ragged series");
    if (!(window_fraction > 0.0 && window_fraction <= 1.0))
        throw ArgumentError("fit_decay_rate: window_fraction must lie in (0, 1]");
    TrajectoryFit f;
    std::size_t end = times.size();
    const double floor = norms.front() * 1e-13;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (!(norms[i] > floor) || !(norms[i] > 0.0)) {
            end = i;
            f.truncated = true;
            break;
        }
    if (end == 0) throw PrecisionError("fit_decay_rate: norm is zero");
    const double t0 = times.front(), t1 = times[end - 1];
    const double start = t1 - window_fraction * (t1 - t0);
    std::vector<double> x, y;
    for (std::size_t i = 0; i < end; ++i)
        if (times[i] >= start) {
            x.push_back(times[i]);
            y.push_back(std::log(norms[i]));
        }
    if (x.size() < 10) throw PrecisionError("fit_decay_rate: fewer than 10 samples in the fitting window");
    f.line = fit_line(x, y);
    f.rate = -f.line.slope;
    return f;
}

inline TrajectoryFit fit_decay_rate(const Trajectory& tr, double window_fraction = 1.0 / 3.0) {
    return fit_decay_rate(tr.times, tr.l2_norm, window_fraction);
}

/// Largest relative increase between consecutive recorded norms (<= 0 for monotone decay).
inline double max_relative_increase(const Trajectory& tr) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < tr.l2_norm.size(); ++i)
        if (tr.l2_norm[i - 1] > 0.0) m = std::max(m, (tr.l2_norm[i] - tr.l2_norm[i - 1]) / tr.l2_norm[i - 1]);
    return std::isfinite(m) ? m : 0.0;  // identically zero data
}

struct EnergyResidual {
    double max_residual = 0.0;   // max over steps of |d/dt |v|^2 + 2 |D^{beta/2} G v|^2|, per unit time
    double mean_residual = 0.0;
    double max_mass = 0.0;       // max |v_0| seen along the run
    long steps = 0;
};

/// Per-step defect of the energy identity d/dt |v|^2 = -2 |D^{beta/2} G v|^2 along
/// the discrete flow. Each step v_n -> v_{n+1} is compared with a reference
/// path w(t) started from v_n and resolved with `substeps` inner steps, along
/// which \int diss is taken by Boole's rule:
///     r_n = (|v_{n+1}|^2 - |w|^2) + (|w|^2 - |v_n|^2 + 2 \int diss(w)),
/// both brackets formed from difference vectors so that rounding does not
/// swamp the O(dt^5) local defect.
inline EnergyResidual energy_step_residual(const DampedFlow& flow, const SpectralField& v0, double dt, double window,
                                           int substeps = 16) {
    if (substeps < 4 || substeps % 4 != 0) throw ArgumentError("energy_step_residual: substeps must be a multiple of 4");
    const long steps = std::max(1L, std::lround(window / dt));
    const detail::LawsonRK4 rk(flow.lambda(), dt), fine(flow.lambda(), dt / substeps);
    const auto N = [&flow](const Eigen::VectorXcd& u) { return flow.rhs(u); };
    const double h = dt / substeps;
    Eigen::VectorXcd v = to_modes(v0.coeffs(), flow.K());
    EnergyResidual r;
    r.steps = steps;
    std::vector<double> diss(static_cast<std::size_t>(substeps + 1));
    for (long n = 0; n < steps; ++n) {
        Eigen::VectorXcd w = v;
        diss[0] = flow.dissipation(w);
        for (int s = 1; s <= substeps; ++s) {
            w = fine.step(w, N);
            diss[static_cast<std::size_t>(s)] = flow.dissipation(w);
        }
        double integral = 0.0;
        for (int b = 0; b < substeps; b += 4) {
            const auto* f = &diss[static_cast<std::size_t>(b)];
            integral += 2.0 * h / 45.0 * (7.0 * f[0] + 32.0 * f[1] + 12.0 * f[2] + 32.0 * f[3] + 7.0 * f[4]);
        }
        Eigen::VectorXcd next = rk.step(v, N);
        detail::check_finite_state(next, (n + 1) * dt);
        symmetrize_modes(next, flow.K());
        const double scheme = kTwoPi * (next - w).dot(next + w).real();
        const double reference = kTwoPi * (w - v).dot(w + v).real() + 2.0 * integral;
        const double res = std::abs(scheme + reference) / dt;
        r.max_residual = std::max(r.max_residual, res);
        r.mean_residual += res / static_cast<double>(steps);
        r.max_mass = std::max(r.max_mass, flow.mass(next));
        v = std::move(next);
    }
    return r;
}

/// Default step: dt K^{alpha+1} = kStabilityConstant. The coupling N1 + R links
/// modes whose phases rotate at differences of L_k, up to about 2 K^{alpha+1};
/// the integrating-factor stages stay accurate while dt times that is O(1).
inline constexpr double kStabilityConstant = 1.0;

inline double default_dt(int K, double alpha) { return kStabilityConstant / std::pow(static_cast<double>(K), alpha + 1.0); }

struct ThresholdRow {
    double amplitude = 0.0;
    double rate = 0.0;
    double fit_residual = 0.0;
    double max_increase = 0.0;
    bool monotone = false;
};

/// Runs the template at each amplitude. Amplitude 0 means the linearized flow
/// (nonlinearity switched off) from unit-norm data of the same shape.
inline std::vector<ThresholdRow> delta_threshold_scan(const SimConfig& base, std::span<const double> amplitudes,
                                                      double window_fraction = 1.0 / 3.0,
                                                      double monotone_tol = 1e-12) {
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        if (amplitudes[i] < 0.0) throw ArgumentError("delta_threshold_scan: amplitudes must be >= 0");
        if (i > 0 && !(amplitudes[i] > amplitudes[i - 1]))
            throw ArgumentError("delta_threshold_scan: amplitudes must increase");
    }
    base.validate();
    const TorusGrid grid = base.grid();
    const DampingDecomposition d = compute_ck(base.params.damping, base.params.beta, grid.K);
    std::vector<ThresholdRow> rows;
    for (double a : amplitudes) {
        SimConfig c = base;
        if (a == 0.0) {
            c.nonlinearity = 0.0;
            c.ic.amplitude = 1.0;
        } else {
            c.ic.amplitude = a;
        }
        const Trajectory tr = simulate(c, d, make_initial(c.ic, grid));
        const TrajectoryFit f = fit_decay_rate(tr, window_fraction);
        ThresholdRow r;
        r.amplitude = a;
        r.rate = f.rate;
        r.fit_residual = f.line.rms_residual;
        r.max_increase = max_relative_increase(tr);
        r.monotone = r.max_increase <= monotone_tol;
        rows.push_back(r);
    }
    return rows;
}

// --- export ----------------------------------------------------------------------

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

inline void write_series_csv(const Trajectory& tr, std::ostream& os) {
    os << "t,l2_norm,mass_abs,dissipation\n";
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        os << format_double(tr.times[i]) << ',' << format_double(tr.l2_norm[i]) << ','
           << format_double(tr.mass_abs[i]) << ',' << format_double(tr.dissipation[i]) << '\n';
}

/// [[k, re, im], ...] over k = -K..K.
inline nlohmann::json snapshot_json(const SpectralField& v) {
    nlohmann::json a = nlohmann::json::array();
    for (int k = -v.K(); k <= v.K(); ++k) a.push_back({k, v[k].real(), v[k].imag()});
    return a;
}

} // namespace dgbo

#endif

#ifndef DGBO_CLI_RUN_HPP
#define DGBO_CLI_RUN_HPP

// Command dispatch for dgbo_lab. Every command returns a Report: the echoed
// configuration, a result payload and a list of checks (expected / actual /
// tolerance). The exit code is 0 when every check passes and 1 otherwise;
// errors are reported separately by the caller with exit code 2.

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dgbo/analysis/bands.hpp"
#include "dgbo/analysis/claims.hpp"
#include "dgbo/analysis/ratios.hpp"
#include "dgbo/analysis/zb.hpp"
#include "dgbo/cli/config.hpp"
#include "dgbo/semigroup.hpp"
#include "dgbo/solver.hpp"

namespace dgbo::cli {

struct Report {
    json doc = json::object();
    std::string csv;  // tabular artifact, if the command produces one
    int exit_code = 0;
};

namespace detail {

class Checks {
public:
    /// actual <= bound
    void at_most(const std::string& name, double actual, double bound) { add(name, "<=", bound, actual, 0.0, actual <= bound); }
    /// actual >= bound
    void at_least(const std::string& name, double actual, double bound) { add(name, ">=", bound, actual, 0.0, actual >= bound); }
    /// |actual - expected| <= tol
    void near(const std::string& name, double actual, double expected, double tol) {
        add(name, "~=", expected, actual, tol, std::abs(actual - expected) <= tol);
    }
    void truth(const std::string& name, bool ok) { add(name, "true", 1.0, ok ? 1.0 : 0.0, 0.0, ok); }

    json to_json() const { return list_; }
    bool all_pass() const { return pass_; }

private:
    void add(const std::string& name, const char* rel, double expected, double actual, double tol, bool ok) {
        list_.push_back({{"name", name}, {"relation", rel}, {"expected", expected}, {"actual", actual}, {"tolerance", tol}, {"pass", ok}});
        pass_ = pass_ && ok;
    }
    json list_ = json::array();
    bool pass_ = true;
};

inline Interval interval_of(const std::vector<double>& v) { return Interval{v[0], v[1]}; }

inline DampingProfile profile_of(const RunConfig& c, int K) {
    return DampingProfile::build(profile_kind_from_string(c.str("profile")), interval_of(c.list("support")),
                                 TorusGrid::dealiased(K));
}

inline ModelParams model_of(const RunConfig& c, int K) {
    ModelParams p = dgbo::cli::detail::model_from(c);
    p.damping = profile_of(c, K);
    return p;
}

inline SimConfig sim_config_of(const RunConfig& c) {
    SimConfig s;
    s.K = c.integer("K");
    s.N = c.integer("N");
    s.params = model_of(c, s.K);
    s.dt = c.num("dt") > 0.0 ? c.num("dt") : default_dt(s.K, s.params.alpha);
    s.T_final = c.num("T_final");
    s.ic.shape = initial_shape_from_string(c.str("ic"));
    s.ic.amplitude = c.num("amplitude");
    s.ic.mode = c.integer("mode");
    s.ic.center = c.num("center");
    s.ic.width = c.num("width");
    s.ic.seed = c.seed;
    s.diagnostics_stride = c.integer("diagnostics_stride");
    s.nonlinearity = c.num("nonlinearity");
    return s;
}

inline json complex_list(const std::vector<cplx>& z, std::size_t limit) {
    json a = json::array();
    for (std::size_t i = 0; i < z.size() && i < limit; ++i) a.push_back({z[i].real(), z[i].imag()});
    return a;
}

inline json triple_json(const FrequencyTriple& t) { return json::array({t.k[0], t.k[1], t.k[2]}); }

inline Eigen::VectorXcd random_mode_vector(int K, std::uint64_t seed) {
    const SpectralField f = make_initial(InitialCondition{InitialShape::random, 1.0, 1, 4.0, 2.0, seed}, TorusGrid::dealiased(K));
    return to_modes(f.coeffs(), K);
}

// --- commands -------------------------------------------------------------------

inline void run_simulate(const RunConfig& c, Report& r, Checks& checks) {
    SimConfig s = sim_config_of(c);
    const TorusGrid grid = s.grid();
    const DampingDecomposition d = compute_ck(s.params.damping, s.params.beta, grid.K);
    const SpectralField v0 = make_initial(s.ic, grid);
    const Trajectory tr = simulate(s, d, v0);
    std::ostringstream os;
    write_series_csv(tr, os);
    r.csv = os.str();
    double max_mass = 0.0;
    for (double m : tr.mass_abs) max_mass = std::max(max_mass, m);
    r.doc["result"] = {{"steps", tr.steps},
                       {"dt", s.T_final / static_cast<double>(tr.steps)},
                       {"N", grid.N},
                       {"initial_l2", tr.l2_norm.front()},
                       {"final_l2", tr.l2_norm.back()},
                       {"max_relative_increase", max_relative_increase(tr)},
                       {"max_mass_abs", max_mass},
                       {"max_reality_defect", tr.max_reality_defect}};
    const std::string snap = c.str("snapshot_out");
    if (!snap.empty()) {
        json js = json::array();
        for (std::size_t i = 0; i < tr.snapshots.size(); ++i) js.push_back({{"t", tr.snapshot_times[i]}, {"coeffs", snapshot_json(tr.snapshots[i])}});
        r.doc["snapshots"] = std::move(js);
    }
    checks.at_most("mass |v_0| stays at rounding level", max_mass, 1e-14);
    checks.at_most("L2 norm non-increasing (relative)", max_relative_increase(tr), 1e-10);
}

inline void run_scan(const RunConfig& c, Report& r, Checks& checks) {
    const SimConfig s = sim_config_of(c);
    const auto amps = c.list("amplitudes");
    const auto rows = delta_threshold_scan(s, amps, c.num("window_fraction"));
    json out = json::array();
    std::ostringstream os;
    os << "amplitude,rate,fit_residual,max_increase,monotone\n";
    for (const auto& row : rows) {
        out.push_back({{"amplitude", row.amplitude}, {"rate", row.rate}, {"fit_residual", row.fit_residual},
                       {"max_increase", row.max_increase}, {"monotone", row.monotone}});
        os << format_double(row.amplitude) << ',' << format_double(row.rate) << ',' << format_double(row.fit_residual) << ','
           << format_double(row.max_increase) << ',' << (row.monotone ? 1 : 0) << '\n';
        checks.truth("monotone L2 decay at amplitude " + format_double(row.amplitude), row.monotone);
    }
    r.csv = os.str();
    r.doc["result"] = {{"rows", out}, {"dt", s.dt}};
}

inline void run_linear_spectrum(const RunConfig& c, Report& r, Checks& checks) {
    const int K = c.integer("K");
    const ModelParams p = model_of(c, K);
    const DampingDecomposition d = compute_ck(p.damping, p.beta, K);
    const LinearOperatorMatrix m = build_linear_matrix(p, d, K);
    const SpectrumReport sr = spectral_abscissa(m);
    json res = {{"spectral_abscissa", sr.spectral_abscissa}, {"decay_rate", -sr.spectral_abscissa},
                {"leading_eigenvalues", complex_list(sr.eigenvalues, 8)}, {"c_min", d.c_min()}};
    checks.at_most("spectral abscissa is negative", sr.spectral_abscissa, 0.0);
    if (c.num("fit_T") > 0.0) {
        const DecayFit f = semigroup_decay_rate(m, random_mode_vector(K, c.seed), c.num("fit_T"), c.integer("samples"));
        res["fitted_rate"] = f.rate;
        res["fit_rms_residual"] = f.line.rms_residual;
        checks.near("fitted rate matches -abscissa (5%)", f.rate, -sr.spectral_abscissa, 0.05 * std::abs(sr.spectral_abscissa));
    }
    r.doc["result"] = std::move(res);
}

inline void run_gramian(const RunConfig& c, Report& r, Checks& checks) {
    const int K = c.integer("K");
    const ModelParams p = model_of(c, K);
    const DampingDecomposition d = compute_ck(p.damping, p.beta, K);
    const LinearOperatorMatrix m = build_linear_matrix(p, d, K);
    const double T = c.num("T");
    const GramianReport g = observability_gramian(m, T, c.integer("order"), c.num("tol"));
    // 2 M(T) = I - W(T)^* W(T), so |W(T) v|^2 <= (1 - mu) |v|^2 with mu = 2 lambda_min.
    const double mu = 2.0 * g.min_eigenvalue;
    const Eigen::MatrixXcd W = propagator(m, T);
    Eigen::VectorXcd v = random_mode_vector(K, c.seed);
    const double n0 = v.squaredNorm();
    json chain = json::array();
    bool chain_ok = true;
    for (int n = 1; n <= c.integer("chain_steps"); ++n) {
        v = W * v;
        const double lhs = v.squaredNorm() / n0, rhs = std::pow(1.0 - mu, n);
        chain.push_back({{"n", n}, {"ratio", lhs}, {"bound", rhs}});
        chain_ok = chain_ok && lhs <= rhs * (1.0 + 1e-10);
    }
    r.doc["result"] = {{"T", g.T}, {"min_eigenvalue", g.min_eigenvalue}, {"energy_residual", g.energy_residual},
                       {"panels", g.panels}, {"order", g.order}, {"mu", mu}, {"chain", chain}};
    checks.at_least("Gramian minimum eigenvalue positive", g.min_eigenvalue, 0.0);
    checks.at_most("Gramian energy-identity residual", g.energy_residual, c.num("tol"));
    checks.truth("observability-to-decay chain", chain_ok);
}

inline void run_ucp(const RunConfig& c, Report& r, Checks& checks) {
    const auto w = c.list("window");
    const double v = ucp_gramian(c.num("alpha"), c.integer("K"), c.num("T"), Interval{w[0], w[1]});
    r.doc["result"] = {{"min_eigenvalue", v}};
    checks.at_least("restricted-strip Gramian minimum eigenvalue positive", v, 0.0);
}

inline void run_ingham(const RunConfig& c, Report& r, Checks& checks) {
    const double alpha = c.num("alpha");
    const int K = c.integer("K");
    const InghamReport ing = ingham_gaps(alpha, K);
    const BiorthogonalReport b = biorthogonal_residual(alpha, K, c.num("T"), c.num("max_condition"));
    r.doc["result"] = {{"gamma", ing.gamma}, {"gamma_inf_1", ing.gamma_inf(1)}, {"pi_over_gamma", kPi / ing.gamma},
                       {"biorthogonal_residual", b.residual}, {"condition", b.condition}};
    checks.at_most("biorthogonal residual", b.residual, 1e-6);
}

inline void run_znorm(const RunConfig& c, Report& r, Checks& checks) {
    const int K = c.integer("K");
    const ModelParams p = model_of(c, K);
    const DampingDecomposition d = compute_ck(p.damping, p.beta, K);
    std::vector<cplx> f(static_cast<std::size_t>(K));
    if (c.str("field") == "free") {
        std::mt19937_64 rng(c.seed);
        f = dgbo::detail::random_coefficients(K, rng);
    } else {
        f[static_cast<std::size_t>(c.integer("mode") - 1)] = 1.0;
    }
    const double half = std::log(1e8) / d.c_min();
    const auto pw = dgbo::detail::padded_window(-half, half, c.num("dt"));
    const Window win = c.str("window") == "none" ? Window::none() : pw.window;
    const TorusGrid grid = TorusGrid::make(K, 2 * K + 2);
    const auto field = SpaceTimeField::from_profile(grid, p.alpha, pw.grid, free_profile(d, f));
    const auto ms = field.transform(win, c.integer("pad"));
    const ZbParams zb{c.num("b"), p.beta, p.alpha};
    const double z = znorm(ms, zb);
    // Plancherel: Z^0 equals the L^2(dt dx) norm of the windowed samples.
    const auto wv = win.values(pw.grid);
    double l2 = 0.0;
    for (int m = 0; m < pw.grid.M; ++m)
        for (int k = 1; k <= K; ++k) l2 += 2.0 * kTwoPi * std::norm(wv[static_cast<std::size_t>(m)] * field.profile(k, m));
    l2 = std::sqrt(l2 * pw.grid.dt);
    const double z0 = znorm(ms, ZbParams{0.0, p.beta, p.alpha});
    r.doc["result"] = {{"znorm", z}, {"znorm_b0", z0}, {"l2_space_time", l2}, {"samples", pw.grid.M}, {"dt", pw.grid.dt}};
    checks.near("Plancherel: Z^0 equals discrete L2 (relative)", z0 / l2, 1.0, 1e-10);
}

inline void run_decay_rate(const RunConfig& c, Report& r, Checks& checks) {
    std::ifstream in(c.str("input"));
    if (!in) throw ConfigError("input", "cannot open '" + c.str("input") + "'");
    std::string line;
    std::getline(in, line);
    if (line.rfind("t,l2_norm", 0) != 0) throw ConfigError("input", "expected a CSV with header t,l2_norm,...");
    std::vector<double> t, n;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b;
        std::getline(ls, a, ',');
        std::getline(ls, b, ',');
        try {
            t.push_back(std::stod(a));
            n.push_back(std::stod(b));
        } catch (const std::exception&) {
            throw ConfigError("input", "malformed row '" + line + "'");
        }
    }
    const TrajectoryFit f = fit_decay_rate(t, n, c.num("window_fraction"));
    r.doc["result"] = {{"rate", f.rate}, {"rms_residual", f.line.rms_residual}, {"points", f.line.points}, {"truncated", f.truncated}};
    checks.at_least("decay rate positive", f.rate, 0.0);
}

inline void run_claim(const RunConfig& c, Report& r, Checks& checks) {
    const std::string& claim = c.claim;
    json res;
    if (claim == "ck") {
        const int kmax = c.integer("kmax");
        const auto prof = DampingProfile::build(profile_kind_from_string(c.str("profile")), interval_of(c.list("support")),
                                                TorusGrid::dealiased(std::min(kmax, 64)));
        const DampingDecomposition d = compute_ck(prof, c.num("beta"), kmax);
        // Lower bound |k|^beta / (4 pi^2) and upper bound C(g)(1 + |k|^beta).
        double worst_low = std::numeric_limits<double>::infinity(), worst_high = std::numeric_limits<double>::infinity();
        for (int k = -kmax; k <= kmax; ++k) {
            if (k == 0) continue;
            const double ak = std::pow(std::abs(static_cast<double>(k)), c.num("beta"));
            worst_low = std::min(worst_low, d.c(k) / (ak / (4.0 * kPi * kPi)));
            worst_high = std::min(worst_high, d.upper_bound(k) / d.c(k));
        }
        res = {{"min_ck_over_lower", worst_low}, {"min_upper_over_ck", worst_high}, {"C_g", d.upper_constant()}, {"horizon", d.horizon()}};
        checks.at_least("c_k >= |k|^beta / (4 pi^2)", worst_low, 1.0);
        checks.at_least("c_k <= C(g)(1 + |k|^beta)", worst_high, 1.0);
    } else if (claim == "resonance") {
        const double alpha = c.num("alpha");
        const auto s = resonance_constant_scan(alpha, c.integer("K_max"));
        res = {{"min_ratio", s.min_ratio}, {"witness", triple_json(s.witness)}, {"triples", s.triples}};
        checks.at_least("min |Omega| / (N_max^alpha N_min) positive", s.min_ratio, 1e-12);
        if (alpha == 2.0) {
            const auto& k = s.witness.k;
            const double cubic = 3.0 * std::abs(static_cast<double>(k[0]) * k[1] * k[2]) /
                                 (std::pow(s.witness.n_max(), 2.0) * s.witness.n_min());
            res["cubic_identity"] = cubic;
            checks.near("alpha = 2 scan equals cubic identity", s.min_ratio, cubic, 0.0);
        }
    } else if (claim == "modulation") {
        const double alpha = c.num("alpha"), beta = c.num("beta");
        const auto s = modulation_scan(alpha, beta, c.integer("K_max"));
        const double closed = minmax_modulation(s.minmax_witness, alpha, beta);
        const double search = minmax_modulation_search(s.minmax_witness, alpha, beta);
        res = {{"min_normalized", s.min_minmax},        {"witness", triple_json(s.minmax_witness)},
               {"min_dominant_low", s.min_dominant},    {"dominant_witness", triple_json(s.dominant_witness)},
               {"min_raw", s.min_raw},                  {"closed_form_at_witness", closed},
               {"search_at_witness", search},           {"triples", s.triples}};
        checks.at_least("min-max modulation positive on every triple", s.min_raw, 1e-12);
        checks.at_least("min-max / (N_max^{alpha-beta} N_min) bounded below", s.min_minmax, 1e-12);
        checks.at_least("dominant-low modulation / (N_max^alpha N_min^{1-beta}) bounded below", s.min_dominant, 1e-12);
        checks.near("closed form matches numerical search (relative)", search / closed, 1.0, 1e-6);
    } else if (claim == "offdiag") {
        const auto s = offdiag_scan(c.num("alpha"), c.num("beta"), c.integer("K_max"));
        res = {{"min_normalized", s.min_normalized}, {"k", s.k}, {"n", s.n}, {"pairs", s.pairs}};
        checks.at_least("normalized off-diagonal gap bounded below", s.min_normalized, 1e-12);
    } else if (claim == "numerology") {
        const auto s = numerology_grid_check(c.integer("n"), c.num("band"));
        res = {{"points", s.points}, {"skipped", s.skipped}, {"violations", s.violations}};
        checks.at_most("nonempty iff alpha + beta > 2: violations", s.violations, 0.0);
    } else if (claim == "a2") {
        A2Sweep sw;
        sw.centers = c.integer("centers");
        sw.center_max = c.num("center_max");
        sw.lengths = c.integer("lengths");
        sw.length_min = c.num("length_min");
        sw.length_max = c.num("length_max");
        const auto a2 = a2_constant(c.num("a"), sw);
        res = {{"a2", a2.value}, {"center", a2.center}, {"length", a2.length}, {"intervals", a2.intervals}};
        checks.truth("A2 estimate finite", std::isfinite(a2.value));
        checks.at_least("A2 estimate >= 1", a2.value, 1.0 - 1e-12);
    } else if (claim == "bilinear") {
        BilinearOptions o;
        o.K = c.integer("K");
        o.trials = c.integer("trials");
        o.seed = c.seed;
        o.dissipation_weight = c.flag("dissipation_weight");
        const auto rep = bilinear_ratio(ZbParams{c.num("b"), c.num("beta"), c.num("alpha")}, o);
        res = {{"max", rep.max},   {"random_max", rep.random.max},         {"random_mean", rep.random.mean},
               {"adversarial_max", rep.adversarial_max}, {"adversarial_witness", rep.adversarial_witness}};
        checks.truth("max ratio finite", std::isfinite(rep.max));
    } else if (claim == "n1") {
        const int K = c.integer("K");
        const ModelParams p = model_of(c, K);
        const DampingDecomposition d = compute_ck(p.damping, p.beta, K);
        const auto s = n1_bound_ratio(ZbParams{c.num("b"), p.beta, p.alpha}, d, K, c.integer("trials"), c.seed);
        res = {{"max", s.max}, {"mean", s.mean}, {"min", s.min}};
        checks.truth("max ratio finite", std::isfinite(s.max));
    } else if (claim == "free") {
        const int K = c.integer("K");
        const ModelParams p = model_of(c, K);
        const DampingDecomposition d = compute_ck(p.damping, p.beta, K);
        FreeRatioOptions o;
        o.K = K;
        o.dt = c.num("dt");
        const auto s = free_solution_ratio(ZbParams{c.num("b"), p.beta, p.alpha}, d, c.integer("trials"), c.seed, o);
        res = {{"max", s.max}, {"mean", s.mean}, {"min", s.min}};
        checks.truth("max ratio finite", std::isfinite(s.max));
    } else if (claim == "cutoff") {
        const int K = c.integer("K");
        const ModelParams p = model_of(c, K);
        const DampingDecomposition d = compute_ck(p.damping, p.beta, K);
        std::vector<double> Ts;
        for (int i = 0; i < c.integer("T_count"); ++i) Ts.push_back(c.num("T_min") * std::pow(2.0, i));
        std::vector<cplx> f(static_cast<std::size_t>(K), cplx{});
        if (c.str("field") == "free") {
            std::mt19937_64 rng(c.seed);
            f = dgbo::detail::random_coefficients(K, rng);
        } else {
            f[0] = 1.0;
        }
        const double b = c.num("b"), bp = c.num("b_prime");
        const auto cs = cutoff_scaling(b, bp, ZbParams{0.0, p.beta, p.alpha}, K, free_profile(d, f), Ts);
        res = {{"slope", cs.fit.slope}, {"T", cs.T}, {"ratio", cs.ratio}, {"fit_rms_residual", cs.fit.rms_residual}};
        checks.at_most("fitted slope <= b - b' + 0.1", cs.fit.slope, b - bp + 0.1);
    } else if (claim == "duhamel") {
        const int K = c.integer("K");
        const ModelParams p = model_of(c, K);
        const DampingDecomposition d = compute_ck(p.damping, p.beta, K);
        DuhamelOptions o;
        o.dt = c.num("dt");
        const auto s = duhamel_smoothing_ratio(ZbParams{c.num("b"), p.beta, p.alpha}, d, K, c.integer("forcings"), c.seed, o);
        res = {{"max", s.max}, {"mean", s.mean}, {"min", s.min}};
        checks.truth("max ratio finite", std::isfinite(s.max));
    }
    r.doc["result"] = std::move(res);
}

} // namespace detail

/// Run a validated configuration. Module errors propagate as dgbo::Error.
inline Report run(const RunConfig& c, bool timing = false) {
    const auto t0 = std::chrono::steady_clock::now();
    Report r;
    r.doc["command"] = to_string(c.command);
    r.doc["config"] = c.echo();
    detail::Checks checks;
    switch (c.command) {
    case Command::simulate: detail::run_simulate(c, r, checks); break;
    case Command::scan: detail::run_scan(c, r, checks); break;
    case Command::linear_spectrum: detail::run_linear_spectrum(c, r, checks); break;
    case Command::gramian: detail::run_gramian(c, r, checks); break;
    case Command::ucp: detail::run_ucp(c, r, checks); break;
    case Command::ingham: detail::run_ingham(c, r, checks); break;
    case Command::znorm: detail::run_znorm(c, r, checks); break;
    case Command::decay_rate: detail::run_decay_rate(c, r, checks); break;
    case Command::verify_claims: detail::run_claim(c, r, checks); break;
    }
    r.doc["checks"] = checks.to_json();
    r.doc["status"] = checks.all_pass() ? "pass" : "fail";
    r.exit_code = checks.all_pass() ? 0 : 1;
    if (timing) r.doc["duration_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

/// Report for a failure before or during the run.
inline json error_report(const std::exception& e, const json& config = nullptr) {
    json j;
    if (!config.is_null()) j["config"] = config;
    json err = {{"message", e.what()}};
    if (const auto* de = dynamic_cast<const Error*>(&e)) {
        err["kind"] = de->kind();
        if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) err["key"] = ce->key;
        if (const auto* be = dynamic_cast<const BlowUpError*>(&e)) err["time_reached"] = be->time_reached;
    } else {
        err["kind"] = "internal";
    }
    j["error"] = std::move(err);
    j["status"] = "error";
    return j;
}

} // namespace dgbo::cli

#endif

#ifndef DGBO_CLI_CONFIG_HPP
#define DGBO_CLI_CONFIG_HPP

// Run configuration for dgbo_lab: a flat JSON object. Each command (and each
// claim of verify-claims) has a fixed key set with defaults; unknown keys and
// type mismatches are rejected with the offending key named, and the resolved
// configuration, defaults included, is echoed into every report.

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dgbo/damping.hpp"
#include "dgbo/errors.hpp"
#include "dgbo/model.hpp"
#include "dgbo/solver.hpp"

namespace dgbo::cli {

using nlohmann::json;

enum class Command { simulate, linear_spectrum, gramian, ucp, ingham, znorm, verify_claims, decay_rate, scan };

inline const std::vector<std::pair<Command, std::string>>& command_names() {
    static const std::vector<std::pair<Command, std::string>> names{
        {Command::simulate, "simulate"},   {Command::linear_spectrum, "linear-spectrum"},
        {Command::gramian, "gramian"},     {Command::ucp, "ucp"},
        {Command::ingham, "ingham"},       {Command::znorm, "znorm"},
        {Command::verify_claims, "verify-claims"}, {Command::decay_rate, "decay-rate"},
        {Command::scan, "scan"},
    };
    return names;
}

inline std::string to_string(Command c) {
    for (const auto& [k, n] : command_names())
        if (k == c) return n;
    return "?";
}

inline Command command_from_string(const std::string& s) {
    for (const auto& [k, n] : command_names())
        if (n == s) return k;
    throw ConfigError("command", "unknown command '" + s + "'");
}

inline const std::vector<std::string>& claim_names() {
    static const std::vector<std::string> names{"ck",    "resonance", "modulation", "offdiag", "numerology", "a2",
                                                "bilinear", "n1",     "free",       "cutoff",  "duhamel"};
    return names;
}

/// Ordered key -> default. The JSON type of the default fixes the accepted type.
using Schema = std::vector<std::pair<std::string, json>>;

namespace detail {

inline void append(Schema& s, const Schema& more) { s.insert(s.end(), more.begin(), more.end()); }

inline Schema model_keys(double alpha = 1.5, double beta = 0.8) {
    return {{"alpha", alpha}, {"beta", beta}, {"profile", "smooth_bump"}, {"support", json::array({0.0, kPi / 2})}};
}

inline Schema simulate_keys() {
    Schema s = model_keys();
    append(s, {{"K", 32},
               {"N", 0},
               {"dt", 0.0},
               {"T_final", 1.0},
               {"ic", "random"},
               {"amplitude", 1e-3},
               {"mode", 1},
               {"center", 4.0},
               {"width", 2.0},
               {"diagnostics_stride", 1},
               {"nonlinearity", 1.0},
               {"snapshot_out", ""}});
    return s;
}

} // namespace detail

inline Schema schema_for(Command c, const std::string& claim = "") {
    using detail::append;
    using detail::model_keys;
    Schema s;
    switch (c) {
    case Command::simulate: return detail::simulate_keys();
    case Command::scan:
        s = detail::simulate_keys();
        append(s, {{"amplitudes", json::array({0.0, 1e-3, 1e-2, 1e-1})}, {"window_fraction", 1.0 / 3.0}});
        return s;
    case Command::linear_spectrum:
        s = model_keys();
        append(s, {{"K", 32}, {"fit_T", 0.0}, {"samples", 300}});
        return s;
    case Command::gramian:
        s = model_keys();
        append(s, {{"K", 24}, {"T", 5.0}, {"order", 30}, {"tol", 1e-8}, {"chain_steps", 5}});
        return s;
    case Command::ucp: return {{"alpha", 1.5}, {"K", 16}, {"T", 1.0}, {"window", json::array({0.0, kPi / 2})}};
    case Command::ingham: return {{"alpha", 1.5}, {"K", 8}, {"T", 4.0}, {"max_condition", 1e12}};
    case Command::znorm:
        s = model_keys();
        append(s, {{"b", 0.0}, {"K", 16}, {"dt", 0.05}, {"field", "free"}, {"mode", 1}, {"window", "tukey"}, {"pad", 4}});
        return s;
    case Command::decay_rate: return {{"input", ""}, {"window_fraction", 1.0 / 3.0}};
    case Command::verify_claims:
        if (claim == "ck") return {{"beta", 0.8}, {"profile", "smooth_bump"}, {"support", json::array({0.0, kPi / 2})}, {"kmax", 1024}};
        if (claim == "resonance") return {{"alpha", 2.0}, {"K_max", 100}};
        if (claim == "modulation") return {{"alpha", 2.0}, {"beta", 1.0}, {"K_max", 100}};
        if (claim == "offdiag") return {{"alpha", 1.5}, {"beta", 0.8}, {"K_max", 500}};
        if (claim == "numerology") return {{"n", 50}, {"band", 1e-9}};
        if (claim == "a2")
            return {{"a", 0.5}, {"centers", 28}, {"center_max", 1e6}, {"lengths", 37}, {"length_min", 1e-3}, {"length_max", 1e6}};
        if (claim == "bilinear")
            return {{"alpha", 2.0}, {"beta", 0.5}, {"b", 0.55}, {"K", 16}, {"trials", 100}, {"dissipation_weight", true}};
        if (claim == "n1") {
            s = model_keys();
            append(s, {{"b", 0.55}, {"K", 32}, {"trials", 50}});
            return s;
        }
        if (claim == "free") {
            s = model_keys();
            append(s, {{"b", 1.0}, {"K", 16}, {"trials", 100}, {"dt", 0.05}});
            return s;
        }
        if (claim == "cutoff") {
            s = model_keys();
            append(s, {{"b", 0.4}, {"b_prime", 0.0}, {"K", 16}, {"T_min", 1e-3}, {"T_count", 6}, {"field", "free"}});
            return s;
        }
        if (claim == "duhamel") {
            s = model_keys();
            append(s, {{"b", 0.6}, {"K", 12}, {"forcings", 50}, {"dt", 0.05}});
            return s;
        }
        throw ConfigError("claim", "unknown claim '" + claim + "'");
    }
    return s;
}

struct RunConfig {
    Command command = Command::simulate;
    std::string claim;
    std::uint64_t seed = 0;
    std::string out;
    json params = json::object();

    /// The resolved configuration as a document parse_config accepts.
    json echo() const {
        json j = params;
        j["command"] = to_string(command);
        if (command == Command::verify_claims) j["claim"] = claim;
        j["seed"] = seed;
        j["out"] = out;
        return j;
    }

    double num(const std::string& k) const { return params.at(k).get<double>(); }
    int integer(const std::string& k) const { return params.at(k).get<int>(); }
    std::string str(const std::string& k) const { return params.at(k).get<std::string>(); }
    bool flag(const std::string& k) const { return params.at(k).get<bool>(); }
    std::vector<double> list(const std::string& k) const { return params.at(k).get<std::vector<double>>(); }
};

namespace detail {

inline bool integral_number(const json& v) {
    if (v.is_number_integer()) return true;
    if (!v.is_number_float()) return false;
    const double d = v.get<double>();
    return std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15;
}

/// Coerce v to the type of the default, or throw naming the key.
inline json coerce(const std::string& key, const json& def, const json& v) {
    if (def.is_boolean()) {
        if (!v.is_boolean()) throw ConfigError(key, "expected a boolean");
        return v;
    }
    if (def.is_number_integer()) {
        if (!integral_number(v)) throw ConfigError(key, "expected an integer");
        return json(static_cast<long long>(v.get<double>()));
    }
    if (def.is_number()) {
        if (!v.is_number()) throw ConfigError(key, "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(key, "must be finite");
        return json(d);
    }
    if (def.is_string()) {
        if (!v.is_string()) throw ConfigError(key, "expected a string");
        return v;
    }
    if (def.is_array()) {
        if (!v.is_array()) throw ConfigError(key, "expected an array of numbers");
        json out = json::array();
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError(key, "expected an array of numbers");
            out.push_back(e.get<double>());
        }
        if (def.size() == 2 && key != "amplitudes" && out.size() != 2) throw ConfigError(key, "expected two numbers [a, b]");
        return out;
    }
    return v;
}

inline ModelParams model_from(const RunConfig& c) {
    ModelParams p;
    p.alpha = c.num("alpha");
    p.beta = c.num("beta");
    return p;
}

inline void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError(key, what);
}

inline void validate_model(const RunConfig& c, bool nonlinear) {
    const double alpha = c.num("alpha"), beta = c.num("beta");
    if (nonlinear) {
        require(alpha > 1.0 && alpha <= 2.0, "alpha", "alpha = " + std::to_string(alpha) + " outside (1, 2] required by the nonlinear flow");
        require(beta > 2.0 - alpha && beta < alpha, "beta",
                "beta = " + std::to_string(beta) + " outside (2 - alpha, alpha) required by the nonlinear flow");
    } else {
        require(alpha > 0.0, "alpha", "alpha must be > 0");
        require(beta >= 0.0, "beta", "beta must be >= 0");
    }
    try {
        (void)profile_kind_from_string(c.str("profile"));
    } catch (const Error& e) {
        throw ConfigError("profile", e.what());
    }
    const auto s = c.list("support");
    require(s[0] < s[1] && s[0] >= -kPi - 1e-12 && s[1] <= kPi + 1e-12, "support", "support must be [a, b] with -pi <= a < b <= pi");
}

inline void validate(const RunConfig& c) {
    auto positive = [&](const std::string& k) { require(c.num(k) > 0.0, k, "must be > 0"); };
    auto at_least = [&](const std::string& k, int m) { require(c.integer(k) >= m, k, "must be >= " + std::to_string(m)); };
    switch (c.command) {
    case Command::simulate:
    case Command::scan: {
        const bool nonlinear = c.num("nonlinearity") != 0.0;
        validate_model(c, nonlinear);
        at_least("K", 1);
        require(c.integer("N") == 0 || c.integer("N") >= 3 * c.integer("K") + 1, "N", "must be 0 (automatic) or >= 3K+1");
        require(c.num("dt") >= 0.0, "dt", "must be >= 0 (0 selects the stability default)");
        positive("T_final");
        try {
            (void)initial_shape_from_string(c.str("ic"));
        } catch (const Error& e) {
            throw ConfigError("ic", e.what());
        }
        require(c.num("amplitude") >= 0.0, "amplitude", "must be >= 0");
        at_least("diagnostics_stride", 1);
        if (c.command == Command::scan) {
            const auto a = c.list("amplitudes");
            require(!a.empty(), "amplitudes", "must not be empty");
            for (std::size_t i = 0; i < a.size(); ++i) {
                require(a[i] >= 0.0, "amplitudes", "must be >= 0");
                if (i > 0) require(a[i] > a[i - 1], "amplitudes", "must be increasing");
            }
            require(c.num("window_fraction") > 0.0 && c.num("window_fraction") <= 1.0, "window_fraction", "must lie in (0, 1]");
        }
        break;
    }
    case Command::linear_spectrum:
        validate_model(c, false);
        at_least("K", 1);
        require(c.num("fit_T") >= 0.0, "fit_T", "must be >= 0");
        at_least("samples", 10);
        break;
    case Command::gramian:
        validate_model(c, false);
        at_least("K", 1);
        positive("T");
        positive("tol");
        at_least("chain_steps", 1);
        break;
    case Command::ucp: {
        positive("alpha");
        at_least("K", 1);
        positive("T");
        const auto w = c.list("window");
        require(w[0] < w[1], "window", "must be [a, b] with a < b");
        break;
    }
    case Command::ingham:
        require(c.num("alpha") > 1.0, "alpha", "must be > 1");
        at_least("K", 1);
        positive("T");
        positive("max_condition");
        break;
    case Command::znorm:
        validate_model(c, false);
        at_least("K", 1);
        positive("dt");
        require(c.str("field") == "free" || c.str("field") == "mode", "field", "must be 'free' or 'mode'");
        require(c.str("window") == "tukey" || c.str("window") == "none", "window", "must be 'tukey' or 'none'");
        require(c.integer("mode") >= 1 && c.integer("mode") <= c.integer("K"), "mode", "must lie in [1, K]");
        at_least("pad", 1);
        break;
    case Command::decay_rate:
        require(!c.str("input").empty(), "input", "a CSV path is required");
        require(c.num("window_fraction") > 0.0 && c.num("window_fraction") <= 1.0, "window_fraction", "must lie in (0, 1]");
        break;
    case Command::verify_claims: {
        const auto& p = c.params;
        if (p.contains("profile")) {
            const bool has_alpha = p.contains("alpha");
            if (has_alpha) validate_model(c, false);
            else {
                require(c.num("beta") >= 0.0, "beta", "must be >= 0");
                try {
                    (void)profile_kind_from_string(c.str("profile"));
                } catch (const Error& e) {
                    throw ConfigError("profile", e.what());
                }
            }
        }
        if (p.contains("alpha") && !p.contains("profile")) positive("alpha");
        for (const char* k : {"K", "K_max", "kmax", "trials", "forcings", "n", "T_count", "centers", "lengths"})
            if (p.contains(k)) at_least(k, 1);
        if (p.contains("K_max") && c.claim != "offdiag") at_least("K_max", 2);
        if (p.contains("T_count")) at_least("T_count", 2);
        for (const char* k : {"dt", "T_min", "center_max", "length_min", "length_max"})
            if (p.contains(k)) positive(k);
        if (c.claim == "modulation" || c.claim == "offdiag" || c.claim == "bilinear") require(c.num("beta") >= 0.0, "beta", "must be >= 0");
        if (c.claim == "cutoff") require(c.str("field") == "free" || c.str("field") == "mode", "field", "must be 'free' or 'mode'");
        break;
    }
    }
}

} // namespace detail

/// Validate a document (flags already merged into it) into a RunConfig.
inline RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("document", "configuration must be a JSON object");
    if (!doc.contains("command")) throw ConfigError("command", "missing");
    if (!doc.at("command").is_string()) throw ConfigError("command", "expected a string");
    RunConfig c;
    c.command = command_from_string(doc.at("command").get<std::string>());
    if (c.command == Command::verify_claims) {
        if (!doc.contains("claim")) throw ConfigError("claim", "verify-claims requires a claim");
        if (!doc.at("claim").is_string()) throw ConfigError("claim", "expected a string");
        c.claim = doc.at("claim").get<std::string>();
    }
    const Schema schema = schema_for(c.command, c.claim);
    c.params = json::object();
    for (const auto& [k, def] : schema) c.params[k] = def;
    for (const auto& [k, v] : doc.items()) {
        if (k == "command" || (k == "claim" && c.command == Command::verify_claims)) continue;
        if (k == "seed") {
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
                throw ConfigError("seed", "expected a non-negative integer");
            c.seed = v.get<std::uint64_t>();
            continue;
        }
        if (k == "out") {
            if (!v.is_string()) throw ConfigError("out", "expected a string");
            c.out = v.get<std::string>();
            continue;
        }
        bool known = false;
        for (const auto& [sk, def] : schema)
            if (sk == k) {
                c.params[k] = detail::coerce(k, def, v);
                known = true;
                break;
            }
        if (!known) throw ConfigError(k, "unknown key for command '" + to_string(c.command) + (c.claim.empty() ? "" : " --claim " + c.claim) + "'");
    }
    detail::validate(c);
    // Resolve the automatic step so the echo reproduces the run exactly.
    if ((c.command == Command::simulate || c.command == Command::scan) && c.num("dt") == 0.0)
        c.params["dt"] = default_dt(c.integer("K"), c.num("alpha"));
    return c;
}

inline RunConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("document", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

} // namespace dgbo::cli

#endif

// dgbo_lab: command-line front end.
//
//   dgbo_lab <command> [--config file.json] [--out path] [--seed n] [--timing] [--<key> value ...]
//
// Flags override values from the config file. The report (JSON) goes to
// stdout; simulate and scan write their CSV to --out (or to stdout, with the
// report moved to stderr, when no --out is given). Exit status: 0 when every
// check passes, 1 when a check fails, 2 on configuration or runtime errors.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dgbo/cli/config.hpp"
#include "dgbo/cli/run.hpp"

namespace {

using nlohmann::json;
namespace cli = dgbo::cli;

/// Every key any command accepts; each becomes a --key flag.
std::set<std::string> all_keys() {
    std::set<std::string> keys;
    for (const auto& [c, name] : cli::command_names()) {
        if (c == cli::Command::verify_claims) {
            for (const auto& claim : cli::claim_names())
                for (const auto& kv : cli::schema_for(c, claim)) keys.insert(kv.first);
        } else {
            for (const auto& kv : cli::schema_for(c)) keys.insert(kv.first);
        }
    }
    return keys;
}

/// Flag text to JSON: numbers, booleans and arrays parse as JSON, anything else is a string.
json flag_value(const std::string& text) {
    try {
        json v = json::parse(text);
        if (v.is_number() || v.is_boolean() || v.is_array()) return v;
    } catch (const json::parse_error&) {
    }
    return json(text);
}

/// Write-then-rename so a failed run never leaves a partial file.
void write_file(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw dgbo::ConfigError("out", "cannot write '" + path + "'");
        f << text;
        if (!f) throw dgbo::ConfigError("out", "cannot write '" + path + "'");
    }
    std::filesystem::rename(tmp, path);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Damped dispersion-generalized Benjamin-Ono laboratory"};
    std::string command, config_path, out, claim, input;
    std::uint64_t seed = 0;
    bool timing = false;
    app.add_option("command", command, "simulate | linear-spectrum | gramian | ucp | ingham | znorm | verify-claims | decay-rate | scan")
        ->required();
    app.add_option("--config", config_path, "JSON configuration file");
    auto* out_opt = app.add_option("--out", out, "output path");
    auto* seed_opt = app.add_option("--seed", seed, "random seed (default 0)");
    auto* claim_opt = app.add_option("--claim", claim, "claim id for verify-claims");
    auto* input_opt = app.add_option("--input", input, "input CSV for decay-rate");
    app.add_flag("--timing", timing, "include wall-clock duration in the report");
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> key_opts;
    for (const auto& k : all_keys()) {
        if (k == "input") continue;
        key_opts[k] = app.add_option("--" + k, values[k], "override config key '" + k + "'");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    json doc = json::object();
    json echoed = nullptr;
    try {
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw dgbo::ConfigError("config", "cannot open '" + config_path + "'");
            std::stringstream ss;
            ss << f.rdbuf();
            try {
                doc = json::parse(ss.str());
            } catch (const json::parse_error& e) {
                throw dgbo::ConfigError("document", std::string("malformed JSON: ") + e.what());
            }
            if (!doc.is_object()) throw dgbo::ConfigError("document", "configuration must be a JSON object");
            if (doc.contains("command") && doc["command"] != command)
                throw dgbo::ConfigError("command", "config file is for '" + doc["command"].dump() + "', not '" + command + "'");
        }
        doc["command"] = command;
        if (*out_opt) doc["out"] = out;
        if (*seed_opt) doc["seed"] = seed;
        if (*claim_opt) doc["claim"] = claim;
        if (*input_opt) doc["input"] = input;
        for (const auto& [k, opt] : key_opts)
            if (*opt) doc[k] = flag_value(values[k]);

        const cli::RunConfig cfg = cli::parse_config(doc);
        echoed = cfg.echo();
        const cli::Report rep = cli::run(cfg, timing);
        const std::string report_text = rep.doc.dump(2) + "\n";
        const bool tabular = cfg.command == cli::Command::simulate || cfg.command == cli::Command::scan;
        if (tabular) {
            if (cfg.out.empty()) {
                std::cout << rep.csv;
                std::cerr << report_text;
            } else {
                write_file(cfg.out, rep.csv);
                std::cout << report_text;
            }
        } else {
            if (!cfg.out.empty()) write_file(cfg.out, report_text);
            std::cout << report_text;
        }
        return rep.exit_code;
    } catch (const std::exception& e) {
        json err = cli::error_report(e, echoed);
        err["command"] = command;
        std::cout << err.dump(2) << "\n";
        return 2;
    }
}

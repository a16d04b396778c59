#pragma once

// `fisc` command line: report, simulate pool|chain|validators, attrib.
// Every run writes its outputs plus manifest.json into --out; nothing is
// written unless the whole run succeeds.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "fisc/attrib/scenario.hpp"
#include "fisc/cli/simulate.hpp"
#include "fisc/crypto/hash.hpp"
#include "fisc/tax/io.hpp"

namespace fisc::cli {

inline constexpr const char* kEngineVersion = "fisc 0.1.0";

enum ExitCode : int { exit_ok = 0, exit_internal = 1, exit_parse = 2, exit_violation = 3 };

/// Malformed input maps to 2, everything the input asks for but the rules
/// forbid maps to 3.
inline int exit_code_for(Errc code) {
    switch (code) {
        case Errc::parse_error:
        case Errc::schema_violation:
        case Errc::unknown_kind:
        case Errc::bad_encoding:
        case Errc::out_of_order: return exit_parse;
        default: return exit_violation;
    }
}

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(Errc::parse_error, path + ": cannot open");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline std::string sha256_hex(const std::string& content) { return to_hex(sha256(as_bytes(content))); }

struct Run {
    std::string command;
    nlohmann::ordered_json arguments = nlohmann::ordered_json::object();
    std::vector<std::string> inputs;
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    OutputFiles outputs;
};

inline nlohmann::ordered_json file_entry(const std::string& path, const std::string& content) {
    nlohmann::ordered_json e;
    e["path"] = path;
    e["sha256"] = sha256_hex(content);
    return e;
}

inline std::string manifest_json(const Run& run) {
    nlohmann::ordered_json m;
    m["command"] = run.command;
    m["arguments"] = run.arguments;
    m["inputs"] = nlohmann::ordered_json::array();
    for (const auto& p : run.inputs) m["inputs"].push_back(file_entry(p, read_file(p)));
    m["config"] = run.config_path ? file_entry(*run.config_path, read_file(*run.config_path)) : nlohmann::ordered_json();
    m["seed"] = run.seed ? nlohmann::ordered_json(*run.seed) : nlohmann::ordered_json();
    m["outputs"] = nlohmann::ordered_json::array();
    for (const auto& [name, content] : run.outputs) m["outputs"].push_back(file_entry(name, content));
    m["engine_version"] = kEngineVersion;
    return m.dump(2) + "\n";
}

inline void write_outputs(const std::string& out_dir, const Run& run) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    auto put = [&](const std::string& name, const std::string& content) {
        std::ofstream f(fs::path(out_dir) / name, std::ios::binary | std::ios::trunc);
        f << content;
        if (!f) throw std::runtime_error("cannot write " + (fs::path(out_dir) / name).string());
    };
    for (const auto& [name, content] : run.outputs) put(name, content);
    put("manifest.json", manifest_json(run));
}

/// --config wins; FISC_CONFIG is the fallback.
inline std::optional<std::string> config_path(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("FISC_CONFIG"); env && *env) return std::string(env);
    return std::nullopt;
}

struct Flags {
    std::string input;
    std::string out;
    std::string config;
    std::optional<std::uint64_t> seed;
};

inline void add_common(CLI::App* cmd, Flags& f, const std::string& input_name, const std::string& input_help) {
    cmd->add_option(input_name, f.input, input_help)->required();
    cmd->add_option("--out", f.out, "output directory")->required();
    cmd->add_option("--config", f.config, "key = value config file (default: $FISC_CONFIG)");
    cmd->add_option("--seed", f.seed, "seed for every random choice in the run");
}

inline Run run_report(const Flags& f, const std::string& method_name) {
    Run run{"report"};
    run.arguments["method"] = method_name;
    run.inputs = {f.input};
    run.config_path = config_path(f.config);
    run.seed = f.seed;
    tax::JurisdictionPolicy policy;
    if (run.config_path) {
        auto cfg = KeyValueConfig::load(*run.config_path);
        policy = tax::load_policy(cfg);
        cfg.reject_unknown();
    }
    const auto method = tax::parse_method(method_name);
    const auto events = tax::load_events(f.input);
    const auto rep = tax::compute_report(events.events, policy, method, events.asset_decimals);
    std::ostringstream csv;
    tax::write_report_csv(csv, rep);
    run.outputs = {{"report.csv", csv.str()}, {"totals.json", tax::report_totals_json(rep)}};
    return run;
}

inline Run run_simulate(const std::string& kind, const Flags& f) {
    Run run{"simulate " + kind};
    run.inputs = {f.input};
    run.config_path = config_path(f.config);
    std::optional<KeyValueConfig> cfg;
    if (kind == "pool") {
        // Pool runs take all their parameters from the scenario.
        if (!f.config.empty()) fail(Errc::schema_violation, f.config + ": pool simulation takes no config");
        run.config_path.reset();
    } else if (run.config_path) {
        cfg = KeyValueConfig::load(*run.config_path);
    }
    const KeyValueConfig none = KeyValueConfig::parse("", "<defaults>");
    const KeyValueConfig& c = cfg ? *cfg : none;
    const Json doc = load_json_file(f.input);
    if (kind == "pool") {
        run.seed = f.seed;
        run.outputs = simulate_pool(doc, f.input);
    } else if (kind == "chain") {
        auto schedule = econ::load_reward_schedule(c);
        auto rule = econ::load_retarget_rule(c);
        c.reject_unknown();
        run.seed = f.seed.value_or(0);
        run.outputs = simulate_chain(doc, f.input, schedule, rule, *run.seed);
    } else {
        auto params = econ::load_pos_params(c);
        c.reject_unknown();
        run.seed = f.seed;
        run.outputs = simulate_validators(doc, f.input, params);
    }
    return run;
}

inline Run run_attrib(const Flags& f) {
    Run run{"attrib"};
    run.inputs = {f.input};
    run.config_path = config_path(f.config);
    tax::JurisdictionPolicy base;
    if (run.config_path) {
        auto cfg = KeyValueConfig::load(*run.config_path);
        base = tax::load_policy(cfg);
        cfg.reject_unknown();
    }
    auto scenario = fisc::attrib::load_scenario(f.input, base);
    if (f.seed) scenario.seed = *f.seed;
    run.seed = scenario.seed;
    const auto result = fisc::attrib::run_scenario(scenario);
    std::ostringstream events;
    tax::write_events(events, result.events);
    run.outputs = {{"trace.txt", result.trace},
                   {"withholding.csv", fisc::attrib::withholding_ledger_csv(result)},
                   {"registrations.csv", fisc::attrib::registrations_csv(result)},
                   {"travel_records.jsonl", fisc::attrib::travel_records_jsonl(result)},
                   {"events.jsonl", events.str()}};
    return run;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Crypto-asset ledger, economics and tax toolkit", "fisc"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kEngineVersion);

    detail::Flags flags;
    std::string method = "FIFO";
    auto* report = app.add_subcommand("report", "cost-basis report from a JSONL event file");
    detail::add_common(report, flags, "events", "JSONL event file");
    report->add_option("--method", method, "accounting method")->capture_default_str();

    auto* sim = app.add_subcommand("simulate", "replay a scenario into chain events");
    sim->require_subcommand(1);
    std::map<std::string, CLI::App*> kinds;
    for (const char* k : {"pool", "chain", "validators"}) {
        kinds[k] = sim->add_subcommand(k, std::string(k) + " scenario");
        detail::add_common(kinds[k], flags, "scenario", "JSON scenario file");
    }

    auto* attrib = app.add_subcommand("attrib", "run an attribution network scenario");
    detail::add_common(attrib, flags, "scenario", "JSON scenario file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        err << "fisc: error: " << e.what() << "\n";
        return exit_parse;
    }

    try {
        detail::Run r;
        if (*report) {
            r = detail::run_report(flags, method);
        } else if (*attrib) {
            r = detail::run_attrib(flags);
        } else {
            for (const auto& [k, cmd] : kinds)
                if (*cmd) r = detail::run_simulate(k, flags);
        }
        detail::write_outputs(flags.out, r);
        return exit_ok;
    } catch (const Error& e) {
        err << "fisc: error: " << e.what() << " [" << to_string(e.code()) << "]\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "fisc: error: " << e.what() << "\n";
        return exit_internal;
    }
}

}  // namespace fisc::cli

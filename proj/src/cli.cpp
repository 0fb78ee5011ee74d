// Copyright 2026 The qmem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qmem/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include "qmem/bell_analysis.hpp"
#include "qmem/config.hpp"
#include "qmem/errors.hpp"
#include "qmem/output.hpp"
#include "qmem/protocol.hpp"

namespace qmem {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr const char* kArtifactVersion = QMEM_VERSION;

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> events;
    std::string out = ".";
    int workers = 0;
    // fringe
    double theta_s_deg = 0.0;
    int angles = 16;
    bool free_frequency = false;
    // memory
    double t_max_ms = 200.0;
    int points = 201;
    // reproduce-table
    std::string table;
};

struct RunContext {
    std::string command;
    Clock::time_point start = Clock::now();
    std::vector<std::string> outputs;
};

ParsedConfig load_config(const Options& opt, std::optional<TableId> table = std::nullopt) {
    ParsedConfig parsed;
    if (!opt.config.empty()) {
        parsed = parse_config(opt.config);
    } else if (table) {
        parsed.config = table_config(*table);
        parsed.explicit_keys = {"protocol.storage_time_ms", "chain.enabled", "protocol.target_events"};
    }
    if (opt.seed) {
        parsed.config.master_seed = *opt.seed;
        parsed.explicit_keys.insert("protocol.master_seed");
    }
    if (opt.events) {
        parsed.config.target_events = *opt.events;
        parsed.explicit_keys.insert("protocol.target_events");
    }
    try {
        parsed.config.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    return parsed;
}

void emit_file(RunContext& ctx, const fs::path& dir, const std::string& name, const std::string& content) {
    write_text_file(dir / name, content);
    ctx.outputs.push_back(name);
}

Json config_echo(const ParsedConfig& parsed) {
    // Section/key/value view of the canonical text, with provenance.
    Json echo = Json::object();
    std::istringstream in(emit_config(parsed.config));
    std::string line, section;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.front() == '[') {
            section = line.substr(1, line.size() - 2);
            echo[section] = Json::object();
            continue;
        }
        const auto eq = line.find(" = ");
        const std::string key = line.substr(0, eq);
        echo[section][key] = {{"value", line.substr(eq + 3)},
                              {"source", parsed.explicit_keys.count(section + "." + key) ? "config" : "default"}};
    }
    return echo;
}

void write_manifest(RunContext& ctx, const fs::path& dir, const ParsedConfig& parsed) {
    const ConversionChain& chain = parsed.config.chain;
    Json m;
    m["artifact_version"] = kArtifactVersion;
    m["config_hash"] = config_hash(parsed.config);
    m["master_seed"] = parsed.config.master_seed;
    m["command"] = ctx.command;
    m["outputs"] = ctx.outputs;
    m["chain"] = {{"enabled", parsed.config.chain_enabled},
                  {"passive_trans", chain.passive_trans},
                  {"coupling_telecom", chain.coupling_telecom},
                  {"coupling_nir", chain.coupling_nir},
                  {"passive_includes_coupling", chain.passive_includes_coupling},
                  {"eff_down", chain.eff_down},
                  {"eff_up", chain.eff_up},
                  {"residual_factor", chain.residual_factor},
                  {"total_transmission", total_transmission(chain)}};
    m["config"] = config_echo(parsed);
    m["wall_time"] = std::chrono::duration<double>(Clock::now() - ctx.start).count();
    write_text_file(dir / "manifest.json", m.dump(2) + "\n");
}

Json stats_json(const Dataset& data) {
    const DatasetStats& s = data.stats;
    return {{"heralds", data.heralds},
            {"attempts", data.attempts},
            {"coincidences", s.coincidences},
            {"discarded", s.discarded},
            {"herald_rate", s.herald_rate},
            {"idler_detection_prob", s.idler_detection_prob},
            {"eta", s.eta},
            {"memory_visibility", s.memory_visibility},
            {"total_visibility", s.total_visibility},
            {"chain_transmission", s.chain_transmission},
            {"expected_s", s.expected_s}};
}

Json bell_json(const BellResult& r, const Dataset& data) {
    Json rows = Json::array();
    for (const ERecord& e : r.e_values)
        rows.push_back({{"theta_s", e.theta_s}, {"theta_i", e.theta_i}, {"E", e.e}, {"sigma", e.sigma}, {"n", e.n}});
    Json j;
    j["e_values"] = rows;
    j["s_value"] = r.s_value;
    j["sigma_s"] = r.sigma_s;
    j["total_events"] = r.total_events;
    j["violation"] = r.violation;
    j["estimator"] = data.config.estimator == FlipEstimator::geometric ? "geometric" : "pooled";
    j["seed"] = data.seed;
    j["stats"] = stats_json(data);
    return j;
}

std::string counts_csv(const Dataset& data) {
    std::ostringstream out;
    write_counts_csv(out, data.count_matrices);
    return out.str();
}

void print_bell(const BellResult& r) {
    for (const ERecord& e : r.e_values)
        std::cout << "E(" << format_double(e.theta_s) << ", " << format_double(e.theta_i) << ") = " << e.e
                  << " +/- " << e.sigma << "  [" << e.n << "]\n";
    std::cout << "S = " << r.s_value << " +/- " << r.sigma_s << "  (" << r.total_events << " events)\n";
}

int cmd_simulate(const Options& opt, RunContext& ctx) {
    const ParsedConfig parsed = load_config(opt);
    const Dataset data = run_experiment(parsed.config);
    const BellResult bell = analyze_bell(data.count_matrices, parsed.config.estimator);

    const fs::path dir(opt.out);
    emit_file(ctx, dir, "counts.csv", counts_csv(data));
    emit_file(ctx, dir, "bell.json", bell_json(bell, data).dump(2) + "\n");
    emit_file(ctx, dir, "config.cfg", emit_config(parsed));
    write_manifest(ctx, dir, parsed);
    print_bell(bell);
    return 0;
}

int cmd_reproduce(const Options& opt, RunContext& ctx) {
    const std::optional<TableId> id = parse_table_id(opt.table);
    if (!id) throw ConfigError("unknown table '" + opt.table + "'");
    const ParsedConfig parsed = load_config(opt, id);
    const TableComparison cmp = reproduce_table(parsed.config, *id, parsed.config.master_seed);
    const PublishedTable& pub = published_table(*id);

    Json j = bell_json(cmp.result, cmp.dataset);
    Json rows = Json::array();
    for (std::size_t k = 0; k < 4; ++k)
        rows.push_back({{"E", pub.e[k]}, {"sigma", pub.sigma_e[k]}, {"within_2sigma", cmp.e_within_2sigma[k]}});
    j["reference"] = {{"table", table_name(*id)},
                      {"e_values", rows},
                      {"s_value", pub.s},
                      {"sigma_s", pub.sigma_s},
                      {"events", pub.events},
                      {"combined_sigma_s", cmp.s_combined_sigma},
                      {"s_within_2sigma", cmp.s_within_2sigma}};

    const fs::path dir(opt.out);
    emit_file(ctx, dir, "counts.csv", counts_csv(cmp.dataset));
    emit_file(ctx, dir, "bell.json", j.dump(2) + "\n");
    emit_file(ctx, dir, "config.cfg", emit_config(parsed));
    write_manifest(ctx, dir, parsed);
    print_bell(cmp.result);
    std::cout << "reference S = " << pub.s << " +/- " << pub.sigma_s << ": "
              << (cmp.s_within_2sigma ? "consistent" : "inconsistent") << " within 2 combined sigma\n";
    return 0;
}

int cmd_fringe(const Options& opt, RunContext& ctx) {
    if (opt.angles < 4) throw DomainError("fringe needs at least 4 angles");
    ParsedConfig parsed = load_config(opt);
    ExperimentConfig& c = parsed.config;
    const std::uint64_t per_angle = opt.events.value_or(4000);
    const double theta_s = opt.theta_s_deg / 180.0 * std::numbers::pi;

    c.settings.clear();
    for (int k = 0; k < opt.angles; ++k)
        c.settings.emplace_back(theta_s, (double(k) / opt.angles - 0.5) * std::numbers::pi);
    c.target_events = per_angle * static_cast<std::uint64_t>(opt.angles);
    parsed.explicit_keys.insert("protocol.settings_pi");
    parsed.explicit_keys.insert("protocol.target_events");

    const Dataset data = run_experiment(c);
    std::vector<FringePoint> points;
    for (const CountMatrix& m : data.count_matrices) {
        const CorrelationEstimate e = correlation_E(m, c.estimator);
        points.push_back({m.setting.theta_i(), e.e, e.sigma});
    }
    FringeOptions fo;
    fo.free_frequency = opt.free_frequency;
    const FringeFit fit = fit_fringe(c.settings.front().theta_s(), points, fo);

    std::string csv = "theta_i,E,sigma,fit_value\n";
    for (const FringePoint& p : points)
        csv += format_double(p.theta_i) + "," + format_double(p.e) + "," + format_double(p.sigma) + "," +
               format_double(fit.value(p.theta_i)) + "\n";

    Json j{{"theta_s", fit.theta_s},
           {"amplitude", fit.amplitude},
           {"sigma_amplitude", fit.sigma_amplitude},
           {"phase", fit.phase},
           {"sigma_phase", fit.sigma_phase},
           {"absolute_phase", fit.absolute_phase()},
           {"offset", fit.offset},
           {"sigma_offset", fit.sigma_offset},
           {"frequency", fit.frequency},
           {"sigma_frequency", fit.sigma_frequency},
           {"free_frequency", opt.free_frequency},
           {"residual_rms", fit.residual_rms},
           {"chi2", fit.chi2},
           {"stats", stats_json(data)}};

    const fs::path dir(opt.out);
    emit_file(ctx, dir, "fringe.csv", csv);
    emit_file(ctx, dir, "fringe_fit.json", j.dump(2) + "\n");
    emit_file(ctx, dir, "config.cfg", emit_config(parsed));
    write_manifest(ctx, dir, parsed);
    std::cout << "amplitude = " << fit.amplitude << " +/- " << fit.sigma_amplitude << ", phase = " << fit.phase
              << " +/- " << fit.sigma_phase << ", offset = " << fit.offset << "\n";
    return 0;
}

int cmd_memory(const Options& opt, RunContext& ctx) {
    if (opt.points < 2) throw DomainError("memory curve needs at least 2 points");
    ParsedConfig parsed = load_config(opt);
    if (opt.seed) {
        parsed.config.memory.ensemble_seed = *opt.seed;
        parsed.explicit_keys.insert("memory.ensemble_seed");
    }
    std::vector<double> times;
    for (int k = 0; k < opt.points; ++k) times.push_back(opt.t_max_ms * 1e-3 * k / (opt.points - 1));
    const CoherenceCurve curve = characterize_memory(parsed.config, times);

    std::string csv = "t,eta,visibility_factor\n";
    for (std::size_t k = 0; k < curve.times.size(); ++k)
        csv += format_double(curve.times[k]) + "," + format_double(curve.efficiency[k]) + "," +
               format_double(curve.visibility_factor[k]) + "\n";

    const fs::path dir(opt.out);
    emit_file(ctx, dir, "memory.csv", csv);
    emit_file(ctx, dir, "config.cfg", emit_config(parsed));
    write_manifest(ctx, dir, parsed);
    std::cout << "wrote " << curve.times.size() << " points to " << (dir / "memory.csv").string() << "\n";
    return 0;
}

int cmd_validate(const Options& opt) {
    if (opt.config.empty()) throw ConfigError("validate-config needs --config");
    const ParsedConfig parsed = load_config(opt);
    std::cout << emit_config(parsed) << "\nconfig_hash = " << config_hash(parsed.config) << "\n";
    return 0;
}

std::string command_line(const std::vector<std::string>& args) {
    // --workers does not change any output, so it stays out of the record.
    std::string out = "qmem";
    for (std::size_t k = 1; k < args.size(); ++k) {
        if (args[k] == "--workers") {
            ++k;
            continue;
        }
        if (args[k].rfind("--workers=", 0) == 0) continue;
        out += " " + args[k];
    }
    return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"qmem: heralded spin-wave memory entanglement simulator", "qmem"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kArtifactVersion);

    Options opt;
    auto common = [&opt](CLI::App* sub, bool simulation) {
        sub->add_option("--config", opt.config, "configuration file (INI)");
        sub->add_option("--seed", opt.seed, "master seed");
        sub->add_option("--out", opt.out, "output directory (created if missing)");
        sub->add_option("--workers", opt.workers, "OpenMP worker threads (0: runtime default)")
            ->check(CLI::NonNegativeNumber);
        if (simulation) sub->add_option("--events", opt.events, "coincidence events to collect");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run a CHSH measurement");
    common(simulate, true);

    CLI::App* fringe = app.add_subcommand("fringe", "scan theta_i at fixed theta_s and fit the fringe");
    common(fringe, true);
    fringe->add_option("--theta-s-deg", opt.theta_s_deg, "signal analyzer angle, degrees");
    fringe->add_option("--angles", opt.angles, "number of theta_i values across one period");
    fringe->add_flag("--free-frequency", opt.free_frequency, "fit the angular frequency as well");

    CLI::App* memory = app.add_subcommand("memory", "retrieval efficiency versus storage time");
    common(memory, false);
    memory->add_option("--t-max-ms", opt.t_max_ms, "last storage time, ms");
    memory->add_option("--points", opt.points, "grid points including t = 0");

    CLI::App* reproduce = app.add_subcommand("reproduce-table", "rerun one of the reference Bell tables");
    common(reproduce, true);
    reproduce->add_option("table", opt.table, "table1_1ms | table1_100ms | table2_1us | table2_10ms")->required();

    CLI::App* validate = app.add_subcommand("validate-config", "check a configuration and print its canonical form");
    validate->add_option("--config", opt.config, "configuration file (INI)")->required();

    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (opt.workers > 0) omp_set_num_threads(opt.workers);
        RunContext ctx;
        ctx.command = command_line(args);
        if (simulate->parsed()) return cmd_simulate(opt, ctx);
        if (fringe->parsed()) return cmd_fringe(opt, ctx);
        if (memory->parsed()) return cmd_memory(opt, ctx);
        if (reproduce->parsed()) return cmd_reproduce(opt, ctx);
        if (validate->parsed()) return cmd_validate(opt);
    } catch (const std::exception& e) {
        std::cerr << "qmem: error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return run_cli(args);
}

}  // namespace qmem

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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmem/bell_analysis.hpp"
#include "qmem/config.hpp"
#include "qmem/protocol.hpp"

namespace {

using namespace qmem;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

const std::string kConfigs = std::string(QMEM_SOURCE_DIR) + "/configs/";
constexpr double kPi = std::numbers::pi;
constexpr int kSeeds = 50;

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

ExperimentConfig shipped(const std::string& name) { return parse_config(kConfigs + name + ".cfg").config; }

Outcome tsirelson() {
    const auto t0 = Clock::now();
    ExperimentConfig c = shipped("ideal");
    c.target_events = 100000;
    c.master_seed = 1;
    const BellResult r = analyze_bell(run_experiment(c).count_matrices);
    const double dt = seconds_since(t0);
    const double err = std::abs(r.s_value - 2.0 * std::sqrt(2.0));
    return {err <= 0.01 && dt < 10.0, "S=" + fmt("%.4f", r.s_value) + " |S-2sqrt2|=" + fmt("%.4f", err) +
                                          " (<=0.01) sigma_S=" + fmt("%.4f", r.sigma_s) + " time=" + fmt("%.2fs", dt)};
}

Outcome table_pair(TableId a, TableId b) {
    std::string detail;
    bool pass = true;
    for (TableId id : {a, b}) {
        const ExperimentConfig base = shipped(std::string(table_name(id)));
        const SpinWaveMemory memory(base.memory);
        int ok = 0;
        double mean_s = 0.0;
        for (int seed = 1; seed <= kSeeds; ++seed) {
            ExperimentConfig c = base;
            c.master_seed = static_cast<std::uint64_t>(seed);
            const Dataset d = run_experiment(c, memory);
            const TableComparison cmp = compare_to_table(id, analyze_bell(d.count_matrices, c.estimator));
            ok += cmp.s_within_2sigma;
            mean_s += cmp.result.s_value / kSeeds;
        }
        const bool good = ok >= (9 * kSeeds + 9) / 10;
        pass = pass && good;
        detail += std::string(table_name(id)) + ": " + std::to_string(ok) + "/" + std::to_string(kSeeds) +
                  " within 2 sigma, mean S=" + fmt("%.3f", mean_s) + " ref " + fmt("%.2f", published_table(id).s) + "; ";
    }
    return {pass, detail + "need >=90%"};
}

Outcome error_bars() {
    const std::array<std::uint64_t, 4> counts{104, 21, 21, 104};  // n = 250, E = 0.664
    const CorrelationEstimate e = correlation_E(counts);
    const double boot = bootstrap_sigma(counts, 10000, 1);
    const bool closed_ok = std::abs(e.sigma - 0.047) <= 0.1 * 0.047;
    const bool boot_ok = std::abs(boot - e.sigma) <= 0.1 * e.sigma;
    return {closed_ok && boot_ok, "E=" + fmt("%.3f", e.e) + " sigma=" + fmt("%.4f", e.sigma) +
                                      " (0.047 +/-10%) bootstrap=" + fmt("%.4f", boot)};
}

Outcome memory_oracle() {
    const auto t0 = Clock::now();
    MemoryModel m = default_memory_model();
    m.trap.n_atoms_sim = 100000;
    m.light_shift.residual_shift = 0.0;
    m.light_shift.b_field = m.light_shift.b_magic;
    const SpinWaveMemory mem(m);
    double worst = 0.0;
    for (int k = 0; k <= 400; ++k) {
        const double t = 0.2 * k / 400;
        for (int sw : {1, 2}) {
            const Vec3& dk = sw == 1 ? m.geometry.deltak_1 : m.geometry.deltak_2;
            worst = std::max(worst, std::abs(std::abs(mem.coherence(sw, t)) - thermal_coherence_closed_form(m.trap, dk, t)));
        }
    }
    const double dt = seconds_since(t0);
    return {worst <= 0.01 && dt < 30.0, "max|MC-closed|=" + fmt("%.4f", worst) + " (<=0.01) over 401 times, time=" + fmt("%.2fs", dt)};
}

Outcome revival() {
    const SpinWaveMemory mem(shipped("default").memory);
    std::vector<double> grid;
    for (int k = 0; k <= 200; ++k) grid.push_back(1e-3 * k);
    const CoherenceCurve c = mem.curve(grid);
    // local minimum inside [30, 100] ms
    int arg = -1;
    for (int k = 30; k <= 100; ++k)
        if (c.efficiency[k] < c.efficiency[k - 1] && c.efficiency[k] <= c.efficiency[k + 1] &&
            (arg < 0 || c.efficiency[k] < c.efficiency[arg]))
            arg = k;
    if (arg < 0) return {false, "no local efficiency minimum in [30, 100] ms"};
    double best_after = 0.0;
    for (int k = arg + 1; k <= 110; ++k) best_after = std::max(best_after, c.efficiency[k]);
    const bool recovers = best_after > 1.1 * c.efficiency[arg] && best_after < c.efficiency[0];
    return {recovers, "minimum eta=" + fmt("%.4f", c.efficiency[arg]) + " at " + std::to_string(arg) +
                          " ms, recovers to " + fmt("%.4f", best_after) + " by 110 ms"};
}

Outcome efficiency_ratio() {
    const SpinWaveMemory mem(shipped("default").memory);
    const double ratio = mem.retrieval_efficiency(1e-3) / mem.retrieval_efficiency(0.1);
    const double target = 16.0 / 7.0;
    return {std::abs(ratio - target) <= 0.25 * target,
            "eta(1ms)/eta(0.1s)=" + fmt("%.3f", ratio) + " target " + fmt("%.3f", target) + " +/-25%"};
}

Outcome fringe_geometry() {
    ExperimentConfig base;
    base.source_visibility = 0.9;
    base.storage_time = 0.0;
    const SpinWaveMemory memory(base.memory);
    const double v = build_protocol_model(base, memory).total_visibility;
    constexpr int kRuns = 20, kAngles = 16;
    double sum_a = 0.0, var_a = 0.0, worst_period = 0.0;
    for (int run = 0; run < kRuns; ++run) {
        ExperimentConfig c = base;
        const double theta_s = run % 2 ? kPi / 4 : 0.0;
        c.settings.clear();
        for (int k = 0; k < kAngles; ++k) c.settings.emplace_back(theta_s, (double(k) / kAngles - 0.5) * kPi);
        c.target_events = 4000ull * kAngles;
        c.master_seed = 1000 + static_cast<std::uint64_t>(run);
        const Dataset d = run_experiment(c, memory);
        std::vector<FringePoint> pts;
        for (const CountMatrix& m : d.count_matrices) {
            const CorrelationEstimate e = correlation_E(m, c.estimator);
            pts.push_back({m.setting.theta_i(), e.e, e.sigma});
        }
        const FringeFit fixed = fit_fringe(theta_s, pts);
        FringeOptions free;
        free.free_frequency = true;
        const FringeFit diag = fit_fringe(theta_s, pts, free);
        sum_a += fixed.amplitude;
        var_a += fixed.sigma_amplitude * fixed.sigma_amplitude;
        worst_period = std::max(worst_period, std::abs(diag.period() - kPi) / kPi);
    }
    const double mean_a = sum_a / kRuns;
    const double sigma_mean = std::sqrt(var_a) / kRuns;
    const bool amp_ok = std::abs(mean_a - v) <= 2.0 * sigma_mean;
    return {amp_ok && worst_period <= 0.01,
            "worst period error=" + fmt("%.4f", 100 * worst_period) + "% (<=1%), mean amplitude=" + fmt("%.4f", mean_a) +
                " V=" + fmt("%.4f", v) + " 2sigma=" + fmt("%.4f", 2 * sigma_mean) + " over 20 runs"};
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(QMEM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("qmem_acceptance_" + name);
    fs::remove_all(p);
    return p;
}

Outcome chain_consistency() {
    const fs::path out = scratch("chain");
    if (run_cli("reproduce-table table2_10ms --seed 1 --out " + out.string()) != 0) return {false, "CLI run failed"};
    const nlohmann::json chain = nlohmann::json::parse(slurp(out / "manifest.json"))["chain"];
    fs::remove_all(out);
    const double total = chain["total_transmission"];
    const bool factors = chain["passive_trans"] == 0.25 && chain["coupling_telecom"] == 0.8 &&
                         chain["coupling_nir"] == 0.8 && chain["eff_down"] == 0.54 && chain["eff_up"] == 0.54;
    const bool recomputed = std::abs(total_transmission(shipped("table2_10ms").chain) - total) < 1e-15;
    return {factors && recomputed && std::abs(total - 0.075) <= 0.005,
            "total=" + fmt("%.5f", total) + " (0.075 +/- 0.005), residual factor " +
                fmt("%.4f", chain["residual_factor"].get<double>()) +
                (factors ? ", factors echoed unmodified" : ", factors altered")};
}

Outcome determinism() {
    std::string detail;
    bool pass = true;
    for (const std::string& cmd : {std::string("simulate --seed 7 --events 5000"),
                                   std::string("fringe --seed 7 --events 1000 --angles 8"),
                                   std::string("reproduce-table table2_1us --seed 7")}) {
        std::vector<std::string> blobs;
        for (int workers : {1, 4, 16}) {
            const fs::path out = scratch("det" + std::to_string(workers));
            if (run_cli(cmd + " --workers " + std::to_string(workers) + " --out " + out.string()) != 0)
                return {false, "'" + cmd + "' failed"};
            nlohmann::json manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
            std::string blob;
            for (const std::string& name : manifest["outputs"]) blob += name + "\n" + slurp(out / name);
            manifest.erase("wall_time");
            manifest.erase("command");  // names the output directory
            blob += manifest.dump();
            blobs.push_back(blob);
            fs::remove_all(out);
        }
        const bool same = blobs[0] == blobs[1] && blobs[1] == blobs[2];
        pass = pass && same;
        detail += cmd.substr(0, cmd.find(' ')) + (same ? " identical; " : " DIFFERS; ");
    }
    return {pass, detail + "workers 1/4/16, manifest compared without wall_time"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"tsirelson saturation", tsirelson},
        {"table 1 reproduction", [] { return table_pair(TableId::table1_1ms, TableId::table1_100ms); }},
        {"table 2 reproduction", [] { return table_pair(TableId::table2_1us, TableId::table2_10ms); }},
        {"error-bar fidelity", error_bars},
        {"memory oracle", memory_oracle},
        {"revival signature", revival},
        {"efficiency ratio", efficiency_ratio},
        {"fringe geometry", fringe_geometry},
        {"chain consistency", chain_consistency},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
    return failures ? 1 : 0;
}

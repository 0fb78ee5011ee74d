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

#include "qmem/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qmem/errors.hpp"
#include "qmem/output.hpp"

namespace qmem {

namespace {

namespace pt = boost::property_tree;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDeg = std::numbers::pi / 180.0;

struct Field {
    const char* section;
    const char* key;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;

    std::string name() const { return std::string(section) + "." + key; }
};

std::string fmt15(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

[[noreturn]] void bad_value(const char* section, const char* key, const std::string& value, const char* want) {
    throw ConfigError(std::string("key ") + section + "." + key + ": expected " + want + ", got '" + value + "'");
}

double to_real(const char* section, const char* key, const std::string& value) {
    try {
        return parse_double(value);
    } catch (const DomainError&) {
        bad_value(section, key, value, "a number");
    }
}

std::uint64_t to_uint(const char* section, const char* key, const std::string& value) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size() || value.empty())
        bad_value(section, key, value, "a non-negative integer");
    return out;
}

bool to_bool(const char* section, const char* key, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    bad_value(section, key, value, "true or false");
}

template <class Acc>
Field real(const char* section, const char* key, double scale, Acc acc) {
    return {section, key,
            [=](const ExperimentConfig& c) { return fmt15(acc(c) / scale); },
            [=](ExperimentConfig& c, const std::string& v) { acc(c) = to_real(section, key, v) * scale; }};
}

template <class Acc>
Field integer(const char* section, const char* key, Acc acc) {
    return {section, key,
            [=](const ExperimentConfig& c) { return std::to_string(acc(c)); },
            [=](ExperimentConfig& c, const std::string& v) {
                acc(c) = static_cast<std::remove_reference_t<decltype(acc(c))>>(to_uint(section, key, v));
            }};
}

template <class Acc>
Field boolean(const char* section, const char* key, Acc acc) {
    return {section, key,
            [=](const ExperimentConfig& c) { return std::string(acc(c) ? "true" : "false"); },
            [=](ExperimentConfig& c, const std::string& v) { acc(c) = to_bool(section, key, v); }};
}

std::string settings_text(const ExperimentConfig& c) {
    std::string out;
    for (const MeasurementSetting& s : c.settings) {
        if (!out.empty()) out += ", ";
        out += fmt15(s.theta_s() / std::numbers::pi) + ":" + fmt15(s.theta_i() / std::numbers::pi);
    }
    return out;
}

void set_settings(ExperimentConfig& c, const std::string& value) {
    std::vector<MeasurementSetting> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        if (first == std::string::npos) bad_value("protocol", "settings_pi", value, "pairs theta_s:theta_i");
        item = item.substr(first, last - first + 1);
        const auto colon = item.find(':');
        if (colon == std::string::npos) bad_value("protocol", "settings_pi", value, "pairs theta_s:theta_i");
        const double ts = to_real("protocol", "settings_pi", item.substr(0, colon));
        const double ti = to_real("protocol", "settings_pi", item.substr(colon + 1));
        out.emplace_back(ts * std::numbers::pi, ti * std::numbers::pi);
    }
    c.settings = std::move(out);
}

const std::vector<Field>& schema() {
    static const std::vector<Field> fields = [] {
        std::vector<Field> f;
        f.push_back(real("source", "visibility", 1.0, [](auto& c) -> auto& { return c.source_visibility; }));
        f.push_back(real("source", "p_herald", 1.0, [](auto& c) -> auto& { return c.p_herald; }));

        f.push_back(real("memory", "temperature_uK", 1e-6, [](auto& c) -> auto& { return c.memory.trap.temperature; }));
        f.push_back(real("memory", "trap_freq_x_hz", kTwoPi, [](auto& c) -> auto& { return c.memory.trap.omega[0]; }));
        f.push_back(real("memory", "trap_freq_y_hz", kTwoPi, [](auto& c) -> auto& { return c.memory.trap.omega[1]; }));
        f.push_back(real("memory", "trap_freq_z_hz", kTwoPi, [](auto& c) -> auto& { return c.memory.trap.omega[2]; }));
        f.push_back(real("memory", "trap_depth_uK", 1e-6, [](auto& c) -> auto& { return c.memory.trap.depth_u0; }));
        f.push_back(integer("memory", "n_atoms", [](auto& c) -> auto& { return c.memory.trap.n_atoms_sim; }));
        f.push_back(real("memory", "wavelength_write_nm", 1e-9, [](auto& c) -> auto& { return c.memory.geometry.wavelength_write; }));
        f.push_back(real("memory", "signal_angle_deg", kDeg, [](auto& c) -> auto& { return c.memory.geometry.signal_angle; }));
        f.push_back(real("memory", "tilt_phi_deg", kDeg, [](auto& c) -> auto& { return c.memory.geometry.tilt_phi; }));
        f.push_back(real("memory", "b_field_G", 1.0, [](auto& c) -> auto& { return c.memory.light_shift.b_field; }));
        f.push_back(real("memory", "b_magic_G", 1.0, [](auto& c) -> auto& { return c.memory.light_shift.b_magic; }));
        f.push_back(real("memory", "light_shift_linear_hz_per_G", 1.0, [](auto& c) -> auto& { return c.memory.light_shift.linear_coeff; }));
        f.push_back(real("memory", "residual_shift_hz", 1.0, [](auto& c) -> auto& { return c.memory.light_shift.residual_shift; }));
        f.push_back(real("memory", "intensity_inhomogeneity", 1.0, [](auto& c) -> auto& { return c.memory.light_shift.inhomogeneity; }));
        f.push_back(real("memory", "eta0", 1.0, [](auto& c) -> auto& { return c.memory.eta0; }));
        f.push_back(integer("memory", "ensemble_seed", [](auto& c) -> auto& { return c.memory.ensemble_seed; }));

        f.push_back(boolean("chain", "enabled", [](auto& c) -> auto& { return c.chain_enabled; }));
        f.push_back(real("chain", "passive_trans", 1.0, [](auto& c) -> auto& { return c.chain.passive_trans; }));
        f.push_back(real("chain", "coupling_telecom", 1.0, [](auto& c) -> auto& { return c.chain.coupling_telecom; }));
        f.push_back(real("chain", "coupling_nir", 1.0, [](auto& c) -> auto& { return c.chain.coupling_nir; }));
        f.push_back(boolean("chain", "passive_includes_coupling", [](auto& c) -> auto& { return c.chain.passive_includes_coupling; }));
        f.push_back(real("chain", "eff_down", 1.0, [](auto& c) -> auto& { return c.chain.eff_down; }));
        f.push_back(real("chain", "eff_up", 1.0, [](auto& c) -> auto& { return c.chain.eff_up; }));
        f.push_back(real("chain", "residual_factor", 1.0, [](auto& c) -> auto& { return c.chain.residual_factor; }));
        f.push_back(real("chain", "v_delay_ns", 1e-9, [](auto& c) -> auto& { return c.chain.v_delay_s; }));
        f.push_back(real("chain", "contrast", 1.0, [](auto& c) -> auto& { return c.chain.contrast; }));
        f.push_back(real("chain", "fiber_length_m", 1.0, [](auto& c) -> auto& { return c.chain.fiber_length_m; }));
        f.push_back(real("chain", "fiber_atten_db_per_km", 1.0, [](auto& c) -> auto& { return c.chain.fiber_atten_db_per_km; }));
        f.push_back(real("chain", "rel_phase_rad", 1.0, [](auto& c) -> auto& { return c.chain.rel_phase; }));
        f.push_back(real("chain", "noise_prob", 1.0, [](auto& c) -> auto& { return c.chain.noise_prob; }));

        f.push_back(real("detectors", "eff_d1", 1.0, [](auto& c) -> auto& { return c.detectors.eff[0]; }));
        f.push_back(real("detectors", "eff_d2", 1.0, [](auto& c) -> auto& { return c.detectors.eff[1]; }));
        f.push_back(real("detectors", "eff_d3", 1.0, [](auto& c) -> auto& { return c.detectors.eff[2]; }));
        f.push_back(real("detectors", "eff_d4", 1.0, [](auto& c) -> auto& { return c.detectors.eff[3]; }));
        f.push_back(real("detectors", "dark_prob", 1.0, [](auto& c) -> auto& { return c.detectors.dark_prob; }));
        f.push_back(real("detectors", "idler_transmission", 1.0, [](auto& c) -> auto& { return c.idler_transmission; }));

        f.push_back(real("protocol", "storage_time_ms", 1e-3, [](auto& c) -> auto& { return c.storage_time; }));
        f.push_back(integer("protocol", "target_events", [](auto& c) -> auto& { return c.target_events; }));
        f.push_back(integer("protocol", "master_seed", [](auto& c) -> auto& { return c.master_seed; }));
        f.push_back(integer("protocol", "max_heralds", [](auto& c) -> auto& { return c.max_heralds; }));
        f.push_back({"protocol", "estimator",
                     [](const ExperimentConfig& c) {
                         return std::string(c.estimator == FlipEstimator::geometric ? "geometric" : "pooled");
                     },
                     [](ExperimentConfig& c, const std::string& v) {
                         if (v == "pooled") c.estimator = FlipEstimator::pooled;
                         else if (v == "geometric") c.estimator = FlipEstimator::geometric;
                         else bad_value("protocol", "estimator", v, "pooled or geometric");
                     }});
        f.push_back({"protocol", "settings_pi", settings_text, set_settings});
        return f;
    }();
    return fields;
}

std::string strip_value(const std::string& raw) {
    std::string v = raw;
    for (std::size_t k = 1; k < v.size(); ++k) {
        if ((v[k] == ';' || v[k] == '#') && (v[k - 1] == ' ' || v[k - 1] == '\t')) {
            v.resize(k);
            break;
        }
    }
    const auto first = v.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = v.find_last_not_of(" \t");
    return v.substr(first, last - first + 1);
}

const Field* find_field(const std::string& section, const std::string& key) {
    for (const Field& f : schema())
        if (section == f.section && key == f.key) return &f;
    return nullptr;
}

std::string emit(const ExperimentConfig& config, const std::set<std::string>* explicit_keys) {
    std::string out;
    const char* section = "";
    for (const Field& f : schema()) {
        if (std::string_view(section) != f.section) {
            if (!out.empty()) out += '\n';
            out += std::string("[") + f.section + "]\n";
            section = f.section;
        }
        out += std::string(f.key) + " = " + f.get(config);
        if (explicit_keys && !explicit_keys->count(f.name())) out += "  ; default";
        out += '\n';
    }
    return out;
}

}  // namespace

ParsedConfig parse_config_text(std::string_view text) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }

    ParsedConfig parsed;
    ExperimentConfig& c = parsed.config;
    for (const auto& [section, body] : tree) {
        if (body.empty())
            throw ConfigError("unknown key '" + section + "': keys must live in a section");
        for (const auto& [key, node] : body) {
            const Field* f = find_field(section, key);
            if (!f) throw ConfigError("unknown key '" + section + "." + key + "'");
            f->set(c, strip_value(node.data()));
            parsed.explicit_keys.insert(f->name());
        }
    }

    try {
        c.memory.geometry = spinwave_wavevectors(c.memory.geometry.wavelength_write,
                                                 c.memory.geometry.signal_angle, c.memory.geometry.tilt_phi);
        c.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    return parsed;
}

ParsedConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string emit_config(const ExperimentConfig& config) { return emit(config, nullptr); }

std::string emit_config(const ParsedConfig& parsed) { return emit(parsed.config, &parsed.explicit_keys); }

std::string config_hash(const ExperimentConfig& config) { return sha256_hex(emit_config(config)); }

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const Field& f : schema()) out.push_back(f.name());
    return out;
}

}  // namespace qmem

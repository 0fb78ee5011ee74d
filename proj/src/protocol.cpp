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

#include "qmem/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qmem/errors.hpp"
#include "qmem/kernels.hpp"
#include "qmem/rng.hpp"

namespace qmem {

namespace {

constexpr std::uint64_t kSlotStream = 0x5107;
constexpr std::size_t kMinChunk = 256;
constexpr std::size_t kMaxChunk = std::size_t{1} << 22;

const std::array<PublishedTable, 4> kPublished{{
    {{-0.78, 0.71, 0.75, 0.66}, {0.05, 0.07, 0.05, 0.06}, 2.90, 0.12, 582, 1e-3, false},
    {{-0.65, 0.67, 0.66, 0.68}, {0.05, 0.05, 0.05, 0.05}, 2.66, 0.09, 1001, 0.1, false},
    {{-0.54, 0.65, 0.78, 0.58}, {0.05, 0.05, 0.04, 0.05}, 2.55, 0.10, 986, 1e-6, true},
    {{-0.61, 0.72, 0.75, 0.56}, {0.06, 0.06, 0.05, 0.07}, 2.64, 0.12, 667, 1e-2, true},
}};

struct SlotResult {
    std::array<std::uint64_t, 4> counts{};
    std::uint64_t heralds = 0;
    std::uint64_t attempts = 0;
    std::uint64_t discarded = 0;
};

SlotResult run_slot(const kernels::TrialSpec& spec, std::uint64_t quota, std::uint64_t max_heralds) {
    SlotResult slot;
    if (quota == 0) return slot;

    double p_event = 0.0;
    for (double p : spec.pair_probs) p_event += p;
    p_event *= spec.idler_survival;

    std::uint64_t found = 0;
    std::vector<kernels::TrialRecord> buffer;
    while (found < quota) {
        if (slot.heralds >= max_heralds)
            throw ProgressError("coincidence target unreachable: " + std::to_string(found) + " of " +
                                std::to_string(quota) + " events after " + std::to_string(slot.heralds) +
                                " heralds");
        const double want = p_event > 0.0 ? 1.2 * double(quota - found) / p_event : double(kMaxChunk);
        std::size_t chunk = static_cast<std::size_t>(std::clamp(want, double(kMinChunk), double(kMaxChunk)));
        chunk = static_cast<std::size_t>(std::min<std::uint64_t>(chunk, max_heralds - slot.heralds));
        buffer.resize(chunk);
        kernels::simulate_trials_parallel(spec, slot.heralds, buffer);

        // Sequential fold: stops at the exact trial that fills the quota, so
        // the result does not depend on how trials were chunked.
        for (const kernels::TrialRecord& rec : buffer) {
            ++slot.heralds;
            slot.attempts += rec.attempts;
            if (is_coincidence(rec.outcome)) {
                ++slot.counts[static_cast<std::size_t>(rec.outcome)];
                if (++found == quota) break;
            } else if (rec.outcome == Coincidence::discarded) {
                ++slot.discarded;
            }
        }
    }
    return slot;
}

}  // namespace

std::vector<MeasurementSetting> canonical_settings() {
    std::vector<MeasurementSetting> out;
    for (const ChshTerm& term : kChshTerms) out.emplace_back(term.theta_s, term.theta_i);
    return out;
}

void ExperimentConfig::validate() const {
    if (!(source_visibility >= 0.0 && source_visibility <= 1.0))
        throw DomainError("source_visibility must lie in [0, 1]");
    if (!(p_herald >= 1e-5 && p_herald <= 0.1)) throw DomainError("p_herald must lie in [1e-5, 0.1]");
    if (!(storage_time >= 0.0) || !std::isfinite(storage_time))
        throw DomainError("storage_time must be finite and non-negative");
    if (!(idler_transmission > 0.0 && idler_transmission <= 1.0))
        throw DomainError("idler_transmission must lie in (0, 1]");
    if (target_events < 1) throw DomainError("target_events must be >= 1");
    if (max_heralds < 1) throw DomainError("max_heralds must be >= 1");
    if (settings.empty()) throw DomainError("settings schedule is empty");
    for (std::size_t a = 0; a < settings.size(); ++a) {
        if (settings[a].flipped()) throw DomainError("schedule settings must be unflipped; flips are added");
        for (std::size_t b = a + 1; b < settings.size(); ++b)
            if (settings[a] == settings[b]) throw DomainError("duplicate setting in schedule");
    }
    memory.validate();
    chain.validate();
    detectors.validate();
}

ProtocolModel build_protocol_model(const ExperimentConfig& config, const SpinWaveMemory& memory) {
    config.validate();
    ProtocolModel m;
    m.eta = memory.retrieval_efficiency(config.storage_time);
    m.memory_visibility = memory.memory_visibility(config.storage_time);
    m.state = apply_werner(make_bell_phi_plus(), config.source_visibility * m.memory_visibility);
    if (config.chain_enabled) {
        const ChannelSpec channel = chain_to_channel(config.chain);
        const ArmChannelResult r = apply_arm_channel(m.state, Arm::signal, channel);
        m.state = r.state;
        m.chain_transmission = r.survival;
        m.channel_visibility = channel.visibility_factor();
    }
    m.total_visibility = config.source_visibility * m.memory_visibility * m.channel_visibility;
    m.herald_prob = config.p_herald * m.chain_transmission;
    m.idler_survival = m.eta * config.idler_transmission;
    m.expected_s = chsh_expected(m.state);
    return m;
}

ProtocolModel build_protocol_model(const ExperimentConfig& config) {
    config.validate();
    return build_protocol_model(config, SpinWaveMemory(config.memory));
}

Dataset run_experiment(const ExperimentConfig& config) {
    config.validate();
    return run_experiment(config, SpinWaveMemory(config.memory));
}

Dataset run_experiment(const ExperimentConfig& config, const SpinWaveMemory& memory) {
    const ProtocolModel model = build_protocol_model(config, memory);
    if (!(model.herald_prob > 0.0)) throw ProgressError("signal arm transmits nothing; no herald possible");

    const std::size_t n_settings = config.settings.size();
    const std::size_t n_slots = 2 * n_settings;
    const std::uint64_t base = config.target_events / n_slots;
    const std::uint64_t extra = config.target_events % n_slots;

    Dataset data;
    data.seed = config.master_seed;
    data.config = config;
    data.count_matrices.resize(n_settings);
    for (std::size_t k = 0; k < n_settings; ++k) data.count_matrices[k].setting = config.settings[k];

    for (std::size_t s = 0; s < n_slots; ++s) {
        const std::size_t setting_index = s % n_settings;
        const bool flipped = s >= n_settings;
        kernels::TrialSpec spec;
        spec.pair_probs = click_probabilities(model.state, config.settings[setting_index].with_flip(flipped));
        spec.idler_survival = model.idler_survival;
        spec.herald_prob = model.herald_prob;
        spec.detectors = config.detectors;
        spec.stream_seed = derive_seed(config.master_seed, kSlotStream, s);

        const std::uint64_t quota = base + (s < extra ? 1 : 0);
        const SlotResult slot = run_slot(spec, quota, config.max_heralds);

        CountMatrix& m = data.count_matrices[setting_index];
        (flipped ? m.counts_flipped : m.counts) = slot.counts;
        (flipped ? m.trials_flipped : m.trials) = slot.heralds;
        m.discarded += slot.discarded;
        data.heralds += slot.heralds;
        data.attempts += slot.attempts;
    }

    DatasetStats& st = data.stats;
    for (const CountMatrix& m : data.count_matrices) {
        st.coincidences += m.coincidences();
        st.discarded += m.discarded;
    }
    st.herald_rate = data.attempts ? double(data.heralds) / double(data.attempts) : 0.0;
    st.idler_detection_prob = data.heralds ? double(st.coincidences) / double(data.heralds) : 0.0;
    st.eta = model.eta;
    st.memory_visibility = model.memory_visibility;
    st.total_visibility = model.total_visibility;
    st.chain_transmission = model.chain_transmission;
    st.expected_s = model.expected_s;
    return data;
}

CoherenceCurve characterize_memory(const ExperimentConfig& config, std::span<const double> times) {
    config.memory.validate();
    return SpinWaveMemory(config.memory).curve(times);
}

std::string_view table_name(TableId id) {
    switch (id) {
        case TableId::table1_1ms: return "table1_1ms";
        case TableId::table1_100ms: return "table1_100ms";
        case TableId::table2_1us: return "table2_1us";
        case TableId::table2_10ms: return "table2_10ms";
    }
    return "unknown";
}

std::optional<TableId> parse_table_id(std::string_view name) {
    for (TableId id : {TableId::table1_1ms, TableId::table1_100ms, TableId::table2_1us, TableId::table2_10ms})
        if (table_name(id) == name) return id;
    return std::nullopt;
}

const PublishedTable& published_table(TableId id) { return kPublished[static_cast<std::size_t>(id)]; }

ExperimentConfig table_config(TableId id) {
    const PublishedTable& t = published_table(id);
    ExperimentConfig c;
    c.storage_time = t.storage_time;
    c.chain_enabled = t.chain_enabled;
    c.target_events = t.events;
    return c;
}

TableComparison compare_to_table(TableId id, const BellResult& result) {
    const PublishedTable& t = published_table(id);
    TableComparison cmp;
    cmp.id = id;
    cmp.result = result;
    for (std::size_t k = 0; k < 4; ++k) {
        const double combined = std::hypot(result.e_values[k].sigma, t.sigma_e[k]);
        cmp.e_within_2sigma[k] = std::abs(result.e_values[k].e - t.e[k]) <= 2.0 * combined;
    }
    cmp.s_combined_sigma = std::hypot(result.sigma_s, t.sigma_s);
    cmp.s_within_2sigma = std::abs(result.s_value - t.s) <= 2.0 * cmp.s_combined_sigma;
    return cmp;
}

TableComparison reproduce_table(const ExperimentConfig& config, TableId id, std::uint64_t seed) {
    ExperimentConfig c = config;
    c.master_seed = seed;
    Dataset data = run_experiment(c);
    TableComparison cmp = compare_to_table(id, analyze_bell(data.count_matrices, c.estimator));
    cmp.dataset = std::move(data);
    return cmp;
}

TableComparison reproduce_table(TableId id, std::uint64_t seed) {
    return reproduce_table(table_config(id), id, seed);
}

}  // namespace qmem

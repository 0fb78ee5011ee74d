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

#ifndef QMEM_PROTOCOL_HPP
#define QMEM_PROTOCOL_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmem/bell_analysis.hpp"
#include "qmem/conversion_channel.hpp"
#include "qmem/detection.hpp"
#include "qmem/spinwave_memory.hpp"

namespace qmem {

/// The four CHSH settings, in table order.
std::vector<MeasurementSetting> canonical_settings();

struct ExperimentConfig {
    double source_visibility = 0.97;
    double p_herald = 5e-4;  // signal detection probability per write attempt
    MemoryModel memory = default_memory_model();
    double storage_time = 1e-3;  // s
    bool chain_enabled = false;
    ConversionChain chain;
    DetectorBank detectors;
    /// Passive transmission and detection efficiency of the idler path.
    double idler_transmission = 0.25;
    std::vector<MeasurementSetting> settings = canonical_settings();
    std::uint64_t target_events = 1000;
    std::uint64_t master_seed = 1;
    FlipEstimator estimator = FlipEstimator::pooled;
    /// Heralds allowed per schedule slot before giving up.
    std::uint64_t max_heralds = 100'000'000;

    void validate() const;
};

/// Everything fixed by the configuration alone.
struct ProtocolModel {
    double eta = 0.0;                // retrieval efficiency at the storage time
    double memory_visibility = 1.0;  // relative spin-wave coherence
    double channel_visibility = 1.0; // 1 - depol of the signal-arm channel
    double chain_transmission = 1.0; // signal survival through the chain, or 1
    double total_visibility = 0.0;
    double herald_prob = 0.0;        // effective, after the chain
    double idler_survival = 0.0;     // eta * idler_transmission
    TwoQubitState state = make_bell_phi_plus();
    double expected_s = 0.0;
};

ProtocolModel build_protocol_model(const ExperimentConfig& config);
ProtocolModel build_protocol_model(const ExperimentConfig& config, const SpinWaveMemory& memory);

struct DatasetStats {
    std::uint64_t coincidences = 0;
    std::uint64_t discarded = 0;
    double herald_rate = 0.0;           // heralds / attempts
    double idler_detection_prob = 0.0;  // coincidences / heralds
    double eta = 0.0;
    double memory_visibility = 1.0;
    double total_visibility = 0.0;
    double chain_transmission = 1.0;
    double expected_s = 0.0;
};

struct Dataset {
    std::vector<CountMatrix> count_matrices;
    std::uint64_t heralds = 0;
    std::uint64_t attempts = 0;
    std::uint64_t seed = 0;
    ExperimentConfig config;
    DatasetStats stats;
};

Dataset run_experiment(const ExperimentConfig& config);
Dataset run_experiment(const ExperimentConfig& config, const SpinWaveMemory& memory);

CoherenceCurve characterize_memory(const ExperimentConfig& config, std::span<const double> times);

enum class TableId { table1_1ms, table1_100ms, table2_1us, table2_10ms };

std::string_view table_name(TableId id);
std::optional<TableId> parse_table_id(std::string_view name);

struct PublishedTable {
    std::array<double, 4> e{};
    std::array<double, 4> sigma_e{};
    double s = 0.0;
    double sigma_s = 0.0;
    std::uint64_t events = 0;
    double storage_time = 0.0;
    bool chain_enabled = false;
};

const PublishedTable& published_table(TableId id);

/// Default calibration with the table's storage time, chain and event count.
ExperimentConfig table_config(TableId id);

struct TableComparison {
    TableId id{};
    BellResult result;
    Dataset dataset;
    std::array<bool, 4> e_within_2sigma{};
    double s_combined_sigma = 0.0;
    bool s_within_2sigma = false;
};

TableComparison compare_to_table(TableId id, const BellResult& result);
TableComparison reproduce_table(TableId id, std::uint64_t seed);
TableComparison reproduce_table(const ExperimentConfig& config, TableId id, std::uint64_t seed);

}  // namespace qmem

#endif  // QMEM_PROTOCOL_HPP

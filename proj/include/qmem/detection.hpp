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

#ifndef QMEM_DETECTION_HPP
#define QMEM_DETECTION_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qmem/qubit_state.hpp"
#include "qmem/rng.hpp"

namespace qmem {

/// D1, D2 on the signal beamsplitter (H, V ports); D3, D4 on the idler side.
struct DetectorBank {
    std::array<double, 4> eff{1.0, 1.0, 1.0, 1.0};
    double dark_prob = 0.0;  // per detector per gate

    void validate() const;
};

enum class Coincidence : std::uint8_t { c13 = 0, c14 = 1, c23 = 2, c24 = 3, none = 4, discarded = 5 };

constexpr bool is_coincidence(Coincidence c) { return static_cast<std::uint8_t>(c) < 4; }

/// One gate. `pair_probs` are the probabilities that the photon pair exits
/// through each port combination (the remainder is vacuum). Per-detector
/// efficiencies are applied, dark counts superimposed, and a coincidence is
/// registered only when exactly one detector fires on each side. Gates with
/// two clicks on one side are reported as `discarded`.
Coincidence simulate_clicks(const ClickProbabilities& pair_probs, const DetectorBank& bank, Rng& rng);

/// Counts for one waveplate setting, with the pi/2-flipped partner data.
struct CountMatrix {
    MeasurementSetting setting;  // unflipped angles
    std::array<std::uint64_t, 4> counts{};
    std::array<std::uint64_t, 4> counts_flipped{};
    std::uint64_t trials = 0;
    std::uint64_t trials_flipped = 0;
    std::uint64_t discarded = 0;

    std::uint64_t coincidences() const;
    void merge(const CountMatrix& other);
};

struct TaggedOutcome {
    std::size_t setting_index;
    bool flipped;
    Coincidence outcome;
};

/// Bins outcomes per setting. Throws ConsistencyError on an unknown index.
std::vector<CountMatrix> accumulate(std::span<const MeasurementSetting> settings,
                                    std::span<const TaggedOutcome> outcomes);

/// CSV with header theta_s,theta_i,flipped,c13,c14,c23,c24,trials; one row per
/// (setting, flip).
void write_counts_csv(std::ostream& out, std::span<const CountMatrix> matrices);
std::vector<CountMatrix> read_counts_csv(std::istream& in);

}  // namespace qmem

#endif  // QMEM_DETECTION_HPP

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

#include "qmem/detection.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "qmem/errors.hpp"
#include "qmem/output.hpp"

namespace qmem {

void DetectorBank::validate() const {
    for (double e : eff)
        if (!(e >= 0.0 && e <= 1.0)) throw DomainError("detector efficiency must lie in [0, 1]");
    if (!(dark_prob >= 0.0 && dark_prob <= 1.0)) throw DomainError("dark-count probability must lie in [0, 1]");
}

Coincidence simulate_clicks(const ClickProbabilities& pair_probs, const DetectorBank& bank, Rng& rng) {
    std::array<bool, 4> fired{};

    const double u = rng.uniform();
    double cumulative = 0.0;
    for (int port = 0; port < 4; ++port) {
        cumulative += pair_probs[port];
        if (u < cumulative) {
            const int signal_det = (port == kC13 || port == kC14) ? 0 : 1;
            const int idler_det = (port == kC13 || port == kC23) ? 2 : 3;
            fired[signal_det] = rng.uniform() < bank.eff[signal_det];
            fired[idler_det] = rng.uniform() < bank.eff[idler_det];
            break;
        }
    }
    if (bank.dark_prob > 0.0)
        for (bool& f : fired)
            if (rng.uniform() < bank.dark_prob) f = true;

    const int signal_clicks = int(fired[0]) + int(fired[1]);
    const int idler_clicks = int(fired[2]) + int(fired[3]);
    if (signal_clicks == 1 && idler_clicks == 1) {
        if (fired[0]) return fired[2] ? Coincidence::c13 : Coincidence::c14;
        return fired[2] ? Coincidence::c23 : Coincidence::c24;
    }
    if (signal_clicks == 2 || idler_clicks == 2) return Coincidence::discarded;
    return Coincidence::none;
}

std::uint64_t CountMatrix::coincidences() const {
    std::uint64_t n = 0;
    for (int k = 0; k < 4; ++k) n += counts[k] + counts_flipped[k];
    return n;
}

void CountMatrix::merge(const CountMatrix& other) {
    if (!(other.setting == setting)) throw ConsistencyError("cannot merge count matrices of different settings");
    for (int k = 0; k < 4; ++k) {
        counts[k] += other.counts[k];
        counts_flipped[k] += other.counts_flipped[k];
    }
    trials += other.trials;
    trials_flipped += other.trials_flipped;
    discarded += other.discarded;
}

std::vector<CountMatrix> accumulate(std::span<const MeasurementSetting> settings,
                                    std::span<const TaggedOutcome> outcomes) {
    std::vector<CountMatrix> out(settings.size());
    for (std::size_t k = 0; k < settings.size(); ++k) out[k].setting = settings[k].with_flip(false);
    for (const TaggedOutcome& o : outcomes) {
        if (o.setting_index >= settings.size())
            throw ConsistencyError("outcome references unknown setting " + std::to_string(o.setting_index));
        CountMatrix& m = out[o.setting_index];
        (o.flipped ? m.trials_flipped : m.trials) += 1;
        if (is_coincidence(o.outcome)) {
            auto& bins = o.flipped ? m.counts_flipped : m.counts;
            bins[static_cast<std::size_t>(o.outcome)] += 1;
        } else if (o.outcome == Coincidence::discarded) {
            m.discarded += 1;
        }
    }
    return out;
}

void write_counts_csv(std::ostream& out, std::span<const CountMatrix> matrices) {
    out << "theta_s,theta_i,flipped,c13,c14,c23,c24,trials\n";
    for (const CountMatrix& m : matrices) {
        for (int flip = 0; flip < 2; ++flip) {
            const auto& c = flip ? m.counts_flipped : m.counts;
            out << format_double(m.setting.theta_s()) << ',' << format_double(m.setting.theta_i()) << ','
                << flip << ',' << c[0] << ',' << c[1] << ',' << c[2] << ',' << c[3] << ','
                << (flip ? m.trials_flipped : m.trials) << '\n';
        }
    }
}

std::vector<CountMatrix> read_counts_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "theta_s,theta_i,flipped,c13,c14,c23,c24,trials")
        throw ConsistencyError("counts CSV has an unexpected header");
    std::vector<CountMatrix> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 8) throw ConsistencyError("counts CSV row has " + std::to_string(cells.size()) + " cells");
        const MeasurementSetting setting(parse_double(cells[0]), parse_double(cells[1]));
        const bool flipped = cells[2] == "1";
        auto it = std::find_if(out.begin(), out.end(), [&](const CountMatrix& m) { return m.setting == setting; });
        if (it == out.end()) {
            out.emplace_back();
            out.back().setting = setting;
            it = out.end() - 1;
        }
        auto& bins = flipped ? it->counts_flipped : it->counts;
        for (int k = 0; k < 4; ++k) bins[k] = std::stoull(cells[3 + k]);
        (flipped ? it->trials_flipped : it->trials) = std::stoull(cells[7]);
    }
    return out;
}

}  // namespace qmem

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

#ifndef QMEM_KERNELS_HPP
#define QMEM_KERNELS_HPP

// Hot loops of the simulator. Each kernel has a serial reference and an
// OpenMP version; the two must agree (trials exactly, coherence sums to
// rounding), and the OpenMP version must be bit-identical for any thread
// count.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>

#include "qmem/detection.hpp"
#include "qmem/spinwave_memory.hpp"

namespace qmem::kernels {

/// Atoms per reduction block. Partial sums are combined in block order.
inline constexpr std::size_t kReductionBlock = 4096;

std::complex<double> coherence_serial(const AtomEnsemble& ensemble, const TrapParams& trap,
                                      const Vec3& deltak, const LightShiftModel& light_shift, double t);
std::complex<double> coherence_parallel(const AtomEnsemble& ensemble, const TrapParams& trap,
                                        const Vec3& deltak, const LightShiftModel& light_shift, double t);

/// Everything one heralded trial needs.
struct TrialSpec {
    ClickProbabilities pair_probs{};  // port probabilities given both photons arrive
    double idler_survival = 1.0;      // P(idler reaches the detectors | herald)
    double herald_prob = 1.0;         // per write attempt
    DetectorBank detectors;
    std::uint64_t stream_seed = 0;
};

struct TrialRecord {
    std::uint64_t attempts = 0;
    Coincidence outcome = Coincidence::none;

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// Trial `index` of the stream: geometric number of write attempts up to
/// the herald, then one detection gate.
TrialRecord simulate_trial(const TrialSpec& spec, std::uint64_t index);

void simulate_trials_serial(const TrialSpec& spec, std::uint64_t first, std::span<TrialRecord> out);
void simulate_trials_parallel(const TrialSpec& spec, std::uint64_t first, std::span<TrialRecord> out);

}  // namespace qmem::kernels

#endif  // QMEM_KERNELS_HPP

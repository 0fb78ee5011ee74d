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

#include <cmath>

#include "kernel_detail.hpp"
#include "qmem/kernels.hpp"

namespace qmem::kernels {

std::complex<double> coherence_serial(const AtomEnsemble& ensemble, const TrapParams& trap,
                                      const Vec3& deltak, const LightShiftModel& light_shift, double t) {
    const std::size_t n = ensemble.size();
    if (n == 0) return {0.0, 0.0};
    const detail::PhaseFactors f = detail::phase_factors(trap, deltak, t);
    std::complex<double> sum{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) sum += detail::atom_phasor(ensemble, light_shift, f, i);
    return sum / static_cast<double>(n);
}

TrialRecord simulate_trial(const TrialSpec& spec, std::uint64_t index) {
    Rng rng(derive_seed(spec.stream_seed, index));
    TrialRecord rec;

    // Inverse-CDF geometric draw: attempts until (and including) the herald.
    const double u = 1.0 - rng.uniform();
    if (spec.herald_prob >= 1.0) {
        rec.attempts = 1;
    } else {
        rec.attempts = 1 + static_cast<std::uint64_t>(std::floor(std::log(u) / std::log1p(-spec.herald_prob)));
    }

    ClickProbabilities probs = spec.pair_probs;
    for (double& p : probs) p *= spec.idler_survival;
    rec.outcome = simulate_clicks(probs, spec.detectors, rng);
    return rec;
}

void simulate_trials_serial(const TrialSpec& spec, std::uint64_t first, std::span<TrialRecord> out) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = simulate_trial(spec, first + k);
}

}  // namespace qmem::kernels

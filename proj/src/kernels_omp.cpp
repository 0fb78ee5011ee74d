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

#include <algorithm>
#include <vector>

#include <omp.h>

#include "kernel_detail.hpp"
#include "qmem/kernels.hpp"

namespace qmem::kernels {

std::complex<double> coherence_parallel(const AtomEnsemble& ensemble, const TrapParams& trap,
                                        const Vec3& deltak, const LightShiftModel& light_shift, double t) {
    const std::size_t n = ensemble.size();
    if (n == 0) return {0.0, 0.0};
    const detail::PhaseFactors f = detail::phase_factors(trap, deltak, t);

    const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
    std::vector<std::complex<double>> partial(blocks);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
        const std::size_t hi = std::min(n, lo + kReductionBlock);
        std::complex<double> s{0.0, 0.0};
        for (std::size_t i = lo; i < hi; ++i) s += detail::atom_phasor(ensemble, light_shift, f, i);
        partial[static_cast<std::size_t>(b)] = s;
    }
    std::complex<double> sum{0.0, 0.0};
    for (const auto& s : partial) sum += s;
    return sum / static_cast<double>(n);
}

void simulate_trials_parallel(const TrialSpec& spec, std::uint64_t first, std::span<TrialRecord> out) {
    const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k)
        out[static_cast<std::size_t>(k)] = simulate_trial(spec, first + static_cast<std::uint64_t>(k));
}

}  // namespace qmem::kernels

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

#ifndef QMEM_SRC_KERNEL_DETAIL_HPP
#define QMEM_SRC_KERNEL_DETAIL_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>

#include "qmem/spinwave_memory.hpp"

namespace qmem::kernels::detail {

/// Time-dependent factors shared by all atoms at one storage time.
struct PhaseFactors {
    std::array<double, 3> cos_minus_one{};
    std::array<double, 3> sin_over_omega{};
    Vec3 deltak = Vec3::Zero();
    double two_pi_t = 0.0;
};

inline PhaseFactors phase_factors(const TrapParams& trap, const Vec3& deltak, double t) {
    PhaseFactors f;
    for (int a = 0; a < 3; ++a) {
        const double wt = trap.omega[a] * t;
        f.cos_minus_one[a] = std::cos(wt) - 1.0;
        f.sin_over_omega[a] = std::sin(wt) / trap.omega[a];
    }
    f.deltak = deltak;
    f.two_pi_t = 2.0 * std::numbers::pi * t;
    return f;
}

inline std::complex<double> atom_phasor(const AtomEnsemble& e, const LightShiftModel& ls,
                                        const PhaseFactors& f, std::size_t i) {
    const Vec3& r0 = e.positions0[i];
    const Vec3& v0 = e.velocities0[i];
    double phase = 0.0;
    for (int a = 0; a < 3; ++a) {
        const double displacement =
            (r0[a] - e.center[a]) * f.cos_minus_one[a] + v0[a] * f.sin_over_omega[a];
        phase += f.deltak[a] * displacement;
    }
    phase += f.two_pi_t * ls.frequency_offset(e.relative_intensity[i]);
    return {std::cos(phase), std::sin(phase)};
}

}  // namespace qmem::kernels::detail

#endif  // QMEM_SRC_KERNEL_DETAIL_HPP

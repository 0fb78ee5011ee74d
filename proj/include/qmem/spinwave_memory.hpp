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

#ifndef QMEM_SPINWAVE_MEMORY_HPP
#define QMEM_SPINWAVE_MEMORY_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qmem {

using Vec3 = Eigen::Vector3d;

inline constexpr double kBoltzmann = 1.380649e-23;         // J/K
inline constexpr double kRb87Mass = 86.909180527 * 1.66053906660e-27;  // kg

/// Harmonic trap holding the atoms. Axis 0 is the lattice axis (x), axis 2
/// the weak axis along the signal direction (z).
struct TrapParams {
    std::array<double, 3> omega{};  // rad/s
    double temperature = 0.0;       // K
    double atom_mass = kRb87Mass;   // kg
    double depth_u0 = 0.0;          // K, informational
    std::size_t n_atoms_sim = 100000;

    /// Frequencies and mass strictly positive, temperature non-negative
    /// (zero gives a motionless sample), at least 100 atoms.
    void validate() const;
    /// Thermal position spread sqrt(kT/m)/omega along `axis`.
    double position_sigma(int axis) const;
    /// Thermal velocity spread sqrt(kT/m), identical on every axis.
    double velocity_sigma() const;
};

/// Write/signal geometry of the two qubit spin waves. The magnitude of the
/// grating vector comes from the exact difference k_w - k_s; the two
/// vectors are tilted by +/- tilt_phi from the lattice axis in the x-z plane.
struct SpinWaveGeometry {
    double wavelength_write = 0.0;  // m
    double signal_angle = 0.0;      // rad, angle between write and signal modes
    double tilt_phi = 0.0;          // rad
    Vec3 deltak_1 = Vec3::Zero();   // rad/m
    Vec3 deltak_2 = Vec3::Zero();

    double magnitude() const { return deltak_1.norm(); }
    /// Grating period 2 pi / |dk|; infinite for collinear write and signal.
    double period() const;
    bool degenerate() const { return magnitude() == 0.0; }
};

SpinWaveGeometry spinwave_wavevectors(double wavelength, double signal_angle, double tilt_phi);

/// Residual differential light shift after magic-field compensation:
///   f(u) = linear_coeff * (B - B_magic) * u + residual_shift * u^2
/// where u is the local relative lattice intensity.
struct LightShiftModel {
    double b_field = 4.2;           // G
    double b_magic = 4.2;           // G
    double linear_coeff = 20.0;     // Hz/G at peak intensity
    double residual_shift = 0.0;    // Hz at peak intensity
    double inhomogeneity = 0.1;     // relative intensity spread across the cloud

    double frequency_offset(double relative_intensity) const {
        return linear_coeff * (b_field - b_magic) * relative_intensity +
               residual_shift * relative_intensity * relative_intensity;
    }
};

/// Thermal sample of the cloud at t = 0. `center` is the trap center the
/// sample oscillates about.
struct AtomEnsemble {
    std::vector<Vec3> positions0;
    std::vector<Vec3> velocities0;
    std::vector<double> relative_intensity;
    Vec3 center = Vec3::Zero();

    std::size_t size() const { return positions0.size(); }
    /// Rigid translation of the whole sample together with its trap.
    AtomEnsemble translated(const Vec3& offset) const;
};

/// Per-atom sampling with seeds derived from the atom index, so the sample
/// is identical for any number of workers.
AtomEnsemble sample_ensemble(const TrapParams& trap, double inhomogeneity, std::uint64_t seed);

/// Classical harmonic motion about the trap center.
std::vector<Vec3> evolve_positions(const AtomEnsemble& ensemble, const TrapParams& trap, double t);

/// c(t) = (1/N) sum exp(i dk . (r(t) - r(0))) exp(i 2 pi f_LS t).
std::complex<double> coherence_factor(const AtomEnsemble& ensemble, const TrapParams& trap,
                                      const Vec3& deltak, const LightShiftModel& light_shift, double t);

/// Closed-form |c(t)| for a Gaussian thermal cloud, single grating vector,
/// no light shift: exp(-sum_a dk_a^2 sigma_a^2 (1 - cos w_a t)).
double thermal_coherence_closed_form(const TrapParams& trap, const Vec3& deltak, double t);

struct MemoryModel {
    TrapParams trap;
    SpinWaveGeometry geometry;
    LightShiftModel light_shift;
    double eta0 = 0.16;  // intrinsic retrieval efficiency at short storage
    std::uint64_t ensemble_seed = 20100;

    void validate() const;
};

struct CoherenceCurve {
    std::vector<double> times;
    std::vector<double> efficiency;
    std::vector<double> visibility_factor;
    double eta0 = 0.0;
};

/// A memory model bound to one sampled ensemble. Repeated evaluations at
/// different storage times share the same atoms.
class SpinWaveMemory {
  public:
    explicit SpinWaveMemory(MemoryModel model);

    const MemoryModel& model() const { return model_; }
    const AtomEnsemble& ensemble() const { return *ensemble_; }
    /// Same atoms, different light-shift parameters.
    SpinWaveMemory with_light_shift(const LightShiftModel& light_shift) const;

    /// Coherence of qubit spin wave 1 or 2.
    std::complex<double> coherence(int spin_wave, double t) const;
    /// eta0 * (|c1|^2 + |c2|^2) / 2.
    double retrieval_efficiency(double t) const;
    /// 2 |c1| |c2| / (|c1|^2 + |c2|^2): relative coherence of the two spin
    /// waves, 1 at t = 0 and whenever both dephase alike.
    double memory_visibility(double t) const;
    /// Throws DomainError unless `times` is non-empty and strictly increasing.
    CoherenceCurve curve(std::span<const double> times) const;

    /// Swaps the grating vectors of the two spin waves.
    SpinWaveMemory swapped() const;

  private:
    SpinWaveMemory(MemoryModel model, std::shared_ptr<const AtomEnsemble> ensemble);

    MemoryModel model_;
    std::shared_ptr<const AtomEnsemble> ensemble_;
};

double retrieval_efficiency(const MemoryModel& model, double t);
double memory_visibility(const MemoryModel& model, double t);

/// Residual light shift (Hz) that makes eta(t_long) / eta(t_short) equal
/// `target_ratio`, all other parameters fixed. Used to produce the shipped
/// default; see configs/README.
double fit_residual_shift(const MemoryModel& model, double target_ratio, double t_short, double t_long);

/// Temperature whose thermal cloud has the given 1/e^2 radius along `axis`.
double temperature_from_cloud_waist(const TrapParams& trap, int axis, double waist);

/// Defaults: (8100, 116, 10) Hz trap, 56 uK depth, 795 nm write light at
/// 0.9 deg to the signal, gratings tilted by 0.5 deg, B at the 4.2 G magic
/// value, temperature from the 1 mm cloud waist, residual shift fitted to
/// the 16 % -> 7 % retrieval drop between 1 ms and 100 ms.
MemoryModel default_memory_model();

}  // namespace qmem

#endif  // QMEM_SPINWAVE_MEMORY_HPP

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

#include "qmem/spinwave_memory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "qmem/errors.hpp"
#include "qmem/kernels.hpp"
#include "qmem/rng.hpp"

namespace qmem {

namespace {

constexpr std::uint64_t kAtomStream = 0xa70;

constexpr double deg(double d) { return d * std::numbers::pi / 180.0; }

}  // namespace

void TrapParams::validate() const {
    for (int a = 0; a < 3; ++a)
        if (!(omega[a] > 0.0) || !std::isfinite(omega[a]))
            throw DomainError("trap frequency on axis " + std::to_string(a) + " must be positive");
    if (!(temperature >= 0.0) || !std::isfinite(temperature))
        throw DomainError("temperature must be non-negative");
    if (!(atom_mass > 0.0)) throw DomainError("atom mass must be positive");
    if (n_atoms_sim < 100)
        throw DomainError("n_atoms_sim must be at least 100, got " + std::to_string(n_atoms_sim));
}

double TrapParams::velocity_sigma() const { return std::sqrt(kBoltzmann * temperature / atom_mass); }

double TrapParams::position_sigma(int axis) const { return velocity_sigma() / omega[axis]; }

double SpinWaveGeometry::period() const {
    const double k = magnitude();
    return k == 0.0 ? std::numeric_limits<double>::infinity() : 2.0 * std::numbers::pi / k;
}

SpinWaveGeometry spinwave_wavevectors(double wavelength, double signal_angle, double tilt_phi) {
    if (!(wavelength > 0.0)) throw DomainError("write wavelength must be positive");
    if (!(signal_angle >= 0.0 && signal_angle < std::numbers::pi / 2))
        throw DomainError("signal angle must lie in [0, pi/2)");

    const double k = 2.0 * std::numbers::pi / wavelength;
    const Vec3 k_write(0.0, 0.0, k);
    const Vec3 k_signal(k * std::sin(signal_angle), 0.0, k * std::cos(signal_angle));
    const double magnitude = (k_write - k_signal).norm();

    SpinWaveGeometry g;
    g.wavelength_write = wavelength;
    g.signal_angle = signal_angle;
    g.tilt_phi = tilt_phi;
    g.deltak_1 = magnitude * Vec3(std::cos(tilt_phi), 0.0, std::sin(tilt_phi));
    g.deltak_2 = magnitude * Vec3(std::cos(tilt_phi), 0.0, -std::sin(tilt_phi));
    return g;
}

AtomEnsemble AtomEnsemble::translated(const Vec3& offset) const {
    AtomEnsemble out = *this;
    for (Vec3& r : out.positions0) r += offset;
    out.center += offset;
    return out;
}

AtomEnsemble sample_ensemble(const TrapParams& trap, double inhomogeneity, std::uint64_t seed) {
    trap.validate();
    if (!(inhomogeneity >= 0.0)) throw DomainError("intensity inhomogeneity must be non-negative");

    const std::size_t n = trap.n_atoms_sim;
    AtomEnsemble e;
    e.positions0.resize(n);
    e.velocities0.resize(n);
    e.relative_intensity.resize(n);

    const double sv = trap.velocity_sigma();
    const std::array<double, 3> sx{trap.position_sigma(0), trap.position_sigma(1), trap.position_sigma(2)};

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        Rng rng(derive_seed(seed, kAtomStream, static_cast<std::uint64_t>(i)));
        std::normal_distribution<double> normal;
        const auto idx = static_cast<std::size_t>(i);
        for (int a = 0; a < 3; ++a) e.positions0[idx][a] = sx[a] * normal(rng);
        for (int a = 0; a < 3; ++a) e.velocities0[idx][a] = sv * normal(rng);
        e.relative_intensity[idx] = std::max(0.0, 1.0 + inhomogeneity * normal(rng));
    }
    return e;
}

std::vector<Vec3> evolve_positions(const AtomEnsemble& ensemble, const TrapParams& trap, double t) {
    if (!(t >= 0.0)) throw DomainError("evolution time must be non-negative");
    std::array<double, 3> c{}, s{};
    for (int a = 0; a < 3; ++a) {
        c[a] = std::cos(trap.omega[a] * t);
        s[a] = std::sin(trap.omega[a] * t) / trap.omega[a];
    }
    std::vector<Vec3> out(ensemble.size());
    for (std::size_t i = 0; i < ensemble.size(); ++i)
        for (int a = 0; a < 3; ++a)
            out[i][a] = ensemble.center[a] + (ensemble.positions0[i][a] - ensemble.center[a]) * c[a] +
                        ensemble.velocities0[i][a] * s[a];
    return out;
}

std::complex<double> coherence_factor(const AtomEnsemble& ensemble, const TrapParams& trap,
                                      const Vec3& deltak, const LightShiftModel& light_shift, double t) {
    if (!(t >= 0.0)) throw DomainError("storage time must be non-negative");
    return kernels::coherence_parallel(ensemble, trap, deltak, light_shift, t);
}

double thermal_coherence_closed_form(const TrapParams& trap, const Vec3& deltak, double t) {
    double exponent = 0.0;
    for (int a = 0; a < 3; ++a) {
        const double ks = deltak[a] * trap.position_sigma(a);
        exponent += ks * ks * (1.0 - std::cos(trap.omega[a] * t));
    }
    return std::exp(-exponent);
}

void MemoryModel::validate() const {
    trap.validate();
    if (!(eta0 >= 0.0 && eta0 <= 1.0)) throw DomainError("eta0 must lie in [0, 1]");
    if (!(light_shift.inhomogeneity >= 0.0)) throw DomainError("intensity inhomogeneity must be non-negative");
}

SpinWaveMemory::SpinWaveMemory(MemoryModel model) : model_(std::move(model)) {
    model_.validate();
    ensemble_ = std::make_shared<const AtomEnsemble>(
        sample_ensemble(model_.trap, model_.light_shift.inhomogeneity, model_.ensemble_seed));
}

SpinWaveMemory::SpinWaveMemory(MemoryModel model, std::shared_ptr<const AtomEnsemble> ensemble)
    : model_(std::move(model)), ensemble_(std::move(ensemble)) {}

SpinWaveMemory SpinWaveMemory::with_light_shift(const LightShiftModel& light_shift) const {
    MemoryModel m = model_;
    m.light_shift = light_shift;
    return SpinWaveMemory(std::move(m), ensemble_);
}

SpinWaveMemory SpinWaveMemory::swapped() const {
    MemoryModel m = model_;
    std::swap(m.geometry.deltak_1, m.geometry.deltak_2);
    return SpinWaveMemory(std::move(m), ensemble_);
}

std::complex<double> SpinWaveMemory::coherence(int spin_wave, double t) const {
    if (spin_wave != 1 && spin_wave != 2) throw DomainError("spin wave index must be 1 or 2");
    const Vec3& dk = spin_wave == 1 ? model_.geometry.deltak_1 : model_.geometry.deltak_2;
    return coherence_factor(*ensemble_, model_.trap, dk, model_.light_shift, t);
}

double SpinWaveMemory::retrieval_efficiency(double t) const {
    const double a = std::norm(coherence(1, t));
    const double b = std::norm(coherence(2, t));
    return model_.eta0 * 0.5 * (a + b);
}

double SpinWaveMemory::memory_visibility(double t) const {
    const double a = std::abs(coherence(1, t));
    const double b = std::abs(coherence(2, t));
    const double denom = a * a + b * b;
    if (denom == 0.0) return 0.0;
    return std::min(1.0, 2.0 * a * b / denom);
}

CoherenceCurve SpinWaveMemory::curve(std::span<const double> times) const {
    if (times.empty()) throw DomainError("time grid is empty");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] >= 0.0)) throw DomainError("time grid contains a negative time");
        if (k > 0 && !(times[k] > times[k - 1])) throw DomainError("time grid must be strictly increasing");
    }
    CoherenceCurve c;
    c.eta0 = model_.eta0;
    c.times.assign(times.begin(), times.end());
    for (double t : times) {
        const double a = std::abs(coherence(1, t));
        const double b = std::abs(coherence(2, t));
        const double denom = a * a + b * b;
        c.efficiency.push_back(model_.eta0 * 0.5 * denom);
        c.visibility_factor.push_back(denom == 0.0 ? 0.0 : std::min(1.0, 2.0 * a * b / denom));
    }
    return c;
}

double retrieval_efficiency(const MemoryModel& model, double t) {
    return SpinWaveMemory(model).retrieval_efficiency(t);
}

double memory_visibility(const MemoryModel& model, double t) { return SpinWaveMemory(model).memory_visibility(t); }

double fit_residual_shift(const MemoryModel& model, double target_ratio, double t_short, double t_long) {
    if (!(target_ratio > 0.0 && target_ratio < 1.0)) throw DomainError("target ratio must lie in (0, 1)");
    if (!(t_long > t_short && t_short >= 0.0)) throw DomainError("need 0 <= t_short < t_long");

    const SpinWaveMemory base(model);
    auto mismatch = [&](double residual) {
        LightShiftModel ls = model.light_shift;
        ls.residual_shift = residual;
        const SpinWaveMemory mem = base.with_light_shift(ls);
        return mem.retrieval_efficiency(t_long) / mem.retrieval_efficiency(t_short) - target_ratio;
    };

    double lo = 0.0;
    if (mismatch(lo) <= 0.0) throw FitError("ratio is already below target without a residual shift");
    double hi = 0.5;
    while (mismatch(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e4) throw FitError("no residual shift below 10 kHz reaches the target ratio");
    }
    std::uintmax_t iterations = 100;
    const auto bracket = boost::math::tools::toms748_solve(
        mismatch, lo, hi, boost::math::tools::eps_tolerance<double>(40), iterations);
    return 0.5 * (bracket.first + bracket.second);
}

double temperature_from_cloud_waist(const TrapParams& trap, int axis, double waist) {
    const double sigma = waist / 2.0;
    const double v = sigma * trap.omega[axis];
    return trap.atom_mass * v * v / kBoltzmann;
}

MemoryModel default_memory_model() {
    MemoryModel m;
    const double two_pi = 2.0 * std::numbers::pi;
    m.trap.omega = {two_pi * 8100.0, two_pi * 116.0, two_pi * 10.0};
    m.trap.atom_mass = kRb87Mass;
    m.trap.depth_u0 = 56e-6;
    m.trap.n_atoms_sim = 100000;
    m.trap.temperature = 10.3e-6;  // temperature_from_cloud_waist(trap, 2, 1 mm), rounded
    m.geometry = spinwave_wavevectors(795e-9, deg(0.9), deg(0.5));
    m.light_shift.b_field = 4.2;
    m.light_shift.b_magic = 4.2;
    m.light_shift.linear_coeff = 20.0;
    m.light_shift.residual_shift = 7.28;  // fit_residual_shift: eta(0.1 s) / eta(1 ms) = 7 / 16
    m.light_shift.inhomogeneity = 0.1;
    m.eta0 = 0.16;
    m.ensemble_seed = 20100;
    return m;
}

}  // namespace qmem

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

#ifndef QMEM_QUBIT_STATE_HPP
#define QMEM_QUBIT_STATE_HPP

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "qmem/conversion_channel.hpp"

namespace qmem {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix<Complex, 2, 2>;
using Matrix4c = Eigen::Matrix<Complex, 4, 4>;

enum class Arm { signal, idler };

/// Basis index for the two-photon polarization state: signal is the high
/// bit, idler the low bit, H = 0 and V = 1 (HH, HV, VH, VV).
constexpr int basis_index(int signal_pol, int idler_pol) { return 2 * signal_pol + idler_pol; }

/// Joint signal/idler polarization density matrix. Construction validates
/// Hermiticity, unit trace and positivity; every operation returns a new value.
class TwoQubitState {
  public:
    static constexpr double kHermitianTol = 1e-12;
    static constexpr double kTraceTol = 1e-12;
    static constexpr double kPsdFloor = -1e-10;

    /// Throws DomainError when `rho` is not a valid density matrix.
    explicit TwoQubitState(const Matrix4c& rho);

    const Matrix4c& rho() const { return rho_; }
    double purity() const;
    double min_eigenvalue() const;
    /// Reduced state of `keep` after tracing out the other arm.
    Matrix2c reduced(Arm keep) const;

    static bool is_density_matrix(const Matrix4c& rho);

  private:
    Matrix4c rho_;
};

/// Waveplate setting: polarization rotation angles of each arm, plus the
/// pi/2 flip applied to both arms for detector balancing. Angles are
/// wrapped into [-pi/2, pi/2), which is lossless because R(theta + pi) = -R(theta).
class MeasurementSetting {
  public:
    MeasurementSetting() = default;
    MeasurementSetting(double theta_s, double theta_i, bool flipped = false);

    double theta_s() const { return theta_s_; }
    double theta_i() const { return theta_i_; }
    bool flipped() const { return flipped_; }
    MeasurementSetting with_flip(bool flipped) const;

    friend bool operator==(const MeasurementSetting&, const MeasurementSetting&) = default;

  private:
    double theta_s_ = 0.0;
    double theta_i_ = 0.0;
    bool flipped_ = false;
};

double wrap_angle(double theta);

/// Detector-pair outcomes in the order (D1 D3, D1 D4, D2 D3, D2 D4).
/// D1/D3 sit on the H ports of the signal/idler beamsplitters.
using ClickProbabilities = std::array<double, 4>;
inline constexpr int kC13 = 0;
inline constexpr int kC14 = 1;
inline constexpr int kC23 = 2;
inline constexpr int kC24 = 3;

TwoQubitState make_bell_phi_plus();

/// V * rho + (1 - V) * I/4.
TwoQubitState apply_werner(const TwoQubitState& state, double visibility);

/// Conjugates the chosen arm by R(theta) = [[cos, -sin], [sin, cos]].
TwoQubitState rotate_arm(const TwoQubitState& state, Arm arm, double theta);

struct ArmChannelResult {
    TwoQubitState state;
    double survival;
};

/// State conditioned on the photon in `arm` surviving `channel`, together
/// with the survival probability.
ArmChannelResult apply_arm_channel(const TwoQubitState& state, Arm arm, const ChannelSpec& channel);

ClickProbabilities click_probabilities(const TwoQubitState& state, const MeasurementSetting& setting);

/// p13 + p24 - p14 - p23. For the Phi+ state this is cos 2(theta_s - theta_i).
double correlation_expected(const TwoQubitState& state, const MeasurementSetting& setting);

/// One signed term of the CHSH combination.
struct ChshTerm {
    double theta_s;
    double theta_i;
    int sign;
};

/// Canonical CHSH settings, listed in the row order of the published tables.
inline constexpr std::array<ChshTerm, 4> kChshTerms{{
    {0.78539816339744831, -0.39269908169872414, -1},
    {0.78539816339744831, 0.39269908169872414, +1},
    {0.0, -0.39269908169872414, +1},
    {0.0, 0.39269908169872414, +1},
}};

/// S = E(pi/4, pi/8) + E(0, pi/8) + E(0, -pi/8) - E(pi/4, -pi/8).
double chsh_expected(const TwoQubitState& state);

}  // namespace qmem

#endif  // QMEM_QUBIT_STATE_HPP

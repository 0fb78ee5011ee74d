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
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "qmem/errors.hpp"
#include "qmem/qubit_state.hpp"

namespace qmem {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(QubitState, PhiPlusIsPureAndMaximallyEntangled) {
    const TwoQubitState phi = make_bell_phi_plus();
    EXPECT_NEAR(phi.purity(), 1.0, 1e-12);
    const Matrix2c rs = phi.reduced(Arm::signal);
    const Matrix2c ri = phi.reduced(Arm::idler);
    EXPECT_NEAR((rs - Matrix2c::Identity() * 0.5).norm(), 0.0, 1e-12);
    EXPECT_NEAR((ri - Matrix2c::Identity() * 0.5).norm(), 0.0, 1e-12);
}

TEST(QubitState, WernerCorrelationMatchesCosineLaw) {
    // Independent oracle: for Werner(Phi+, V) with these rotations,
    // E(ts, ti) = V cos 2(ts - ti).
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (double v : {1.0, 0.9, 0.5, 0.0}) {
        const TwoQubitState w = apply_werner(make_bell_phi_plus(), v);
        for (int k = 0; k < 50; ++k) {
            const double ts = angle(gen), ti = angle(gen);
            const double expected = v * std::cos(2.0 * (ts - ti));
            EXPECT_NEAR(correlation_expected(w, MeasurementSetting(ts, ti)), expected, 1e-12);
            EXPECT_NEAR(correlation_expected(w, MeasurementSetting(ts, ti, true)), expected, 1e-12);
        }
    }
}

TEST(QubitState, ChshExpectedScalesWithVisibility) {
    EXPECT_NEAR(chsh_expected(make_bell_phi_plus()), 2.0 * std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(chsh_expected(apply_werner(make_bell_phi_plus(), 0.97)), 0.97 * 2.0 * std::sqrt(2.0), 1e-12);
}

TEST(QubitState, ParallelAnalyzersGivePerfectCorrelation) {
    const TwoQubitState phi = make_bell_phi_plus();
    EXPECT_NEAR(correlation_expected(phi, MeasurementSetting(0.3, 0.3)), 1.0, 1e-12);
    EXPECT_NEAR(correlation_expected(phi, MeasurementSetting(0.0, kPi / 4)), 0.0, 1e-12);
}

TEST(QubitState, RejectsInvalidDensityMatrices) {
    Matrix4c rho = make_bell_phi_plus().rho();
    Matrix4c bad_trace = rho * 1.1;
    EXPECT_THROW(TwoQubitState{bad_trace}, DomainError);

    Matrix4c non_hermitian = rho;
    non_hermitian(0, 3) = Complex(0.5, 0.1);
    EXPECT_THROW(TwoQubitState{non_hermitian}, DomainError);

    Matrix4c negative = Matrix4c::Zero();
    negative(0, 0) = 1.2;
    negative(3, 3) = -0.2;
    EXPECT_THROW(TwoQubitState{negative}, DomainError);
    EXPECT_FALSE(TwoQubitState::is_density_matrix(negative));
}

TEST(QubitState, RotationIsUnitary) {
    const TwoQubitState w = apply_werner(make_bell_phi_plus(), 0.8);
    const TwoQubitState r = rotate_arm(w, Arm::idler, 0.37);
    EXPECT_NEAR(r.purity(), w.purity(), 1e-12);
    EXPECT_NEAR(r.rho().trace().real(), 1.0, 1e-12);
}

TEST(QubitState, ClickProbabilitiesFormADistribution) {
    const TwoQubitState w = apply_werner(make_bell_phi_plus(), 0.6);
    for (const ChshTerm& t : kChshTerms) {
        const ClickProbabilities p = click_probabilities(w, MeasurementSetting(t.theta_s, t.theta_i));
        double sum = 0.0;
        for (double x : p) {
            EXPECT_GE(x, -1e-15);
            sum += x;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
    }
}

TEST(QubitState, FlipExchangesPorts) {
    // A pi/2 flip on both arms maps H<->V, hence C13<->C24 and C14<->C23.
    Matrix4c rho = Matrix4c::Zero();
    rho(0, 0) = 0.7;  // HH
    rho(1, 1) = 0.2;  // HV
    rho(2, 2) = 0.1;  // VH
    const TwoQubitState s(rho);
    const ClickProbabilities p = click_probabilities(s, MeasurementSetting(0.0, 0.0));
    const ClickProbabilities q = click_probabilities(s, MeasurementSetting(0.0, 0.0, true));
    EXPECT_NEAR(p[kC13], q[kC24], 1e-12);
    EXPECT_NEAR(p[kC14], q[kC23], 1e-12);
    EXPECT_NEAR(p[kC23], q[kC14], 1e-12);
}

TEST(QubitState, AnglesWrapIntoHalfOpenRange) {
    for (double a : {-10.0, -kPi / 2, 0.0, 1.2, kPi / 2, 7.0}) {
        const double w = wrap_angle(a);
        EXPECT_GE(w, -kPi / 2);
        EXPECT_LT(w, kPi / 2);
        // Same analyzer up to a multiple of pi.
        EXPECT_NEAR(std::sin(2.0 * (w - a)), 0.0, 1e-12);
    }
}

TEST(ArmChannel, IdentityLeavesStateAlone) {
    const TwoQubitState w = apply_werner(make_bell_phi_plus(), 0.8);
    const ArmChannelResult r = apply_arm_channel(w, Arm::signal, identity_channel());
    EXPECT_DOUBLE_EQ(r.survival, 1.0);
    EXPECT_NEAR((r.state.rho() - w.rho()).norm(), 0.0, 1e-14);
}

TEST(ArmChannel, PolarizingFilterProjects) {
    ChannelSpec pol;
    pol.trans_h = 1.0;
    pol.trans_v = 0.0;
    pol.label = "polarizer";
    const ArmChannelResult r = apply_arm_channel(make_bell_phi_plus(), Arm::signal, pol);
    EXPECT_NEAR(r.survival, 0.5, 1e-12);
    EXPECT_NEAR(r.state.rho()(0, 0).real(), 1.0, 1e-12);
}

TEST(ArmChannel, BlockingBothPolarizationsIsDegenerate) {
    ChannelSpec dead;
    dead.trans_h = 0.0;
    dead.trans_v = 0.0;
    EXPECT_THROW(apply_arm_channel(make_bell_phi_plus(), Arm::idler, dead), DegenerateChannelError);
}

TEST(ArmChannel, DepolarizerScalesCorrelations) {
    ChannelSpec d;
    d.depol = 0.3;
    const ArmChannelResult r = apply_arm_channel(make_bell_phi_plus(), Arm::signal, d);
    EXPECT_NEAR(chsh_expected(r.state), 0.7 * 2.0 * std::sqrt(2.0), 1e-12);
    d.depol = 1.0;
    EXPECT_NEAR(chsh_expected(apply_arm_channel(make_bell_phi_plus(), Arm::signal, d).state), 0.0, 1e-12);
}

TEST(ArmChannel, RelativePhaseRemovesDiagonalCorrelation) {
    ChannelSpec ph;
    ph.rel_phase = kPi;
    const ArmChannelResult r = apply_arm_channel(make_bell_phi_plus(), Arm::signal, ph);
    // Phi+ becomes Phi-, for which E = cos 2(ts + ti).
    EXPECT_NEAR(correlation_expected(r.state, MeasurementSetting(kPi / 8, kPi / 8)), 0.0, 1e-12);
    EXPECT_NEAR(correlation_expected(r.state, MeasurementSetting(0.0, 0.0)), 1.0, 1e-12);
}

TEST(ArmChannel, RejectsOutOfRangeParameters) {
    ChannelSpec c;
    c.trans_h = 1.5;
    EXPECT_THROW(c.validate(), DomainError);
    c.trans_h = 1.0;
    c.depol = -0.1;
    EXPECT_THROW(c.validate(), DomainError);
}

}  // namespace
}  // namespace qmem

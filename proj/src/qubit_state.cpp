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

#include "qmem/qubit_state.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qmem/errors.hpp"

namespace qmem {

namespace {

Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
    Matrix4c out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
    return out;
}

Matrix4c on_arm(Arm arm, const Matrix2c& op) {
    const Matrix2c id = Matrix2c::Identity();
    return arm == Arm::signal ? kron(op, id) : kron(id, op);
}

Matrix2c rotation(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Matrix2c r;
    r << c, -s, s, c;
    return r;
}

double hermitian_defect(const Matrix4c& rho) { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }

double min_eig(const Matrix4c& rho) {
    const Eigen::SelfAdjointEigenSolver<Matrix4c> solver(rho, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

}  // namespace

TwoQubitState::TwoQubitState(const Matrix4c& rho) : rho_(rho) {
    const double herm = hermitian_defect(rho);
    if (!(herm <= kHermitianTol))
        throw DomainError("density matrix is not Hermitian (defect " + std::to_string(herm) + ")");
    const double trace_err = std::abs(rho.trace() - Complex(1.0, 0.0));
    if (!(trace_err < kTraceTol))
        throw DomainError("density matrix trace differs from 1 by " + std::to_string(trace_err));
    const double lowest = min_eig(rho);
    if (!(lowest >= kPsdFloor))
        throw DomainError("density matrix has negative eigenvalue " + std::to_string(lowest));
}

bool TwoQubitState::is_density_matrix(const Matrix4c& rho) {
    return hermitian_defect(rho) <= kHermitianTol &&
           std::abs(rho.trace() - Complex(1.0, 0.0)) < kTraceTol && min_eig(rho) >= kPsdFloor;
}

double TwoQubitState::purity() const { return (rho_ * rho_).trace().real(); }

double TwoQubitState::min_eigenvalue() const { return min_eig(rho_); }

Matrix2c TwoQubitState::reduced(Arm keep) const {
    Matrix2c out = Matrix2c::Zero();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int k = 0; k < 2; ++k) {
                if (keep == Arm::signal)
                    out(a, b) += rho_(basis_index(a, k), basis_index(b, k));
                else
                    out(a, b) += rho_(basis_index(k, a), basis_index(k, b));
            }
    return out;
}

double wrap_angle(double theta) {
    constexpr double pi = std::numbers::pi;
    double wrapped = theta - pi * std::floor((theta + pi / 2) / pi);
    // floor rounding can land exactly on +pi/2
    if (wrapped >= pi / 2) wrapped -= pi;
    return wrapped;
}

MeasurementSetting::MeasurementSetting(double theta_s, double theta_i, bool flipped)
    : theta_s_(wrap_angle(theta_s)), theta_i_(wrap_angle(theta_i)), flipped_(flipped) {}

MeasurementSetting MeasurementSetting::with_flip(bool flipped) const {
    MeasurementSetting out = *this;
    out.flipped_ = flipped;
    return out;
}

TwoQubitState make_bell_phi_plus() {
    Matrix4c rho = Matrix4c::Zero();
    const int hh = basis_index(0, 0);
    const int vv = basis_index(1, 1);
    rho(hh, hh) = rho(vv, vv) = rho(hh, vv) = rho(vv, hh) = 0.5;
    return TwoQubitState(rho);
}

TwoQubitState apply_werner(const TwoQubitState& state, double visibility) {
    if (!(visibility >= 0.0 && visibility <= 1.0))
        throw DomainError("Werner visibility must lie in [0, 1], got " + std::to_string(visibility));
    const Matrix4c mixed = Matrix4c::Identity() * 0.25;
    return TwoQubitState(visibility * state.rho() + (1.0 - visibility) * mixed);
}

TwoQubitState rotate_arm(const TwoQubitState& state, Arm arm, double theta) {
    const Matrix4c u = on_arm(arm, rotation(theta));
    return TwoQubitState(u * state.rho() * u.adjoint());
}

ArmChannelResult apply_arm_channel(const TwoQubitState& state, Arm arm, const ChannelSpec& channel) {
    channel.validate();
    if (channel.trans_h == 0.0 && channel.trans_v == 0.0)
        throw DegenerateChannelError("channel '" + channel.label + "' blocks both polarizations");

    Matrix2c filter = Matrix2c::Zero();
    filter(0, 0) = std::sqrt(channel.trans_h);
    filter(1, 1) = std::sqrt(channel.trans_v);
    const Matrix4c k = on_arm(arm, filter);
    Matrix4c rho = k * state.rho() * k.adjoint();
    const double survival = rho.trace().real();
    if (!(survival > 0.0))
        throw DegenerateChannelError("channel '" + channel.label + "' has zero survival for this input");
    rho /= survival;

    if (channel.depol > 0.0) {
        const TwoQubitState filtered(rho);
        const Arm other = arm == Arm::signal ? Arm::idler : Arm::signal;
        const Matrix2c half_id = Matrix2c::Identity() * 0.5;
        const Matrix2c rest = filtered.reduced(other);
        const Matrix4c replaced = arm == Arm::signal ? kron(half_id, rest) : kron(rest, half_id);
        rho = (1.0 - channel.depol) * rho + channel.depol * replaced;
    }
    if (channel.rel_phase != 0.0) {
        Matrix2c phase = Matrix2c::Zero();
        phase(0, 0) = 1.0;
        phase(1, 1) = std::polar(1.0, channel.rel_phase);
        const Matrix4c u = on_arm(arm, phase);
        rho = u * rho * u.adjoint();
    }
    return {TwoQubitState(rho), survival};
}

ClickProbabilities click_probabilities(const TwoQubitState& state, const MeasurementSetting& setting) {
    const double flip = setting.flipped() ? std::numbers::pi / 2 : 0.0;
    const Matrix4c u = kron(rotation(setting.theta_s() + flip), rotation(setting.theta_i() + flip));
    const Matrix4c rho = u * state.rho() * u.adjoint();
    ClickProbabilities p{};
    p[kC13] = rho(basis_index(0, 0), basis_index(0, 0)).real();
    p[kC14] = rho(basis_index(0, 1), basis_index(0, 1)).real();
    p[kC23] = rho(basis_index(1, 0), basis_index(1, 0)).real();
    p[kC24] = rho(basis_index(1, 1), basis_index(1, 1)).real();
    return p;
}

double correlation_expected(const TwoQubitState& state, const MeasurementSetting& setting) {
    const ClickProbabilities p = click_probabilities(state, setting);
    return p[kC13] + p[kC24] - p[kC14] - p[kC23];
}

double chsh_expected(const TwoQubitState& state) {
    double s = 0.0;
    for (const ChshTerm& term : kChshTerms)
        s += term.sign * correlation_expected(state, MeasurementSetting(term.theta_s, term.theta_i));
    return s;
}

}  // namespace qmem

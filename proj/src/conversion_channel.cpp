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

#include "qmem/conversion_channel.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "qmem/errors.hpp"

namespace qmem {

namespace {

void require_probability(double value, const char* name) {
    if (!(value >= 0.0 && value <= 1.0))
        throw DomainError(std::string(name) + " must lie in [0, 1], got " + std::to_string(value));
}

}  // namespace

void ChannelSpec::validate() const {
    require_probability(trans_h, "trans_h");
    require_probability(trans_v, "trans_v");
    require_probability(depol, "depol");
    if (!std::isfinite(rel_phase)) throw DomainError("rel_phase must be finite");
}

bool ChannelSpec::is_identity() const {
    return trans_h == 1.0 && trans_v == 1.0 && depol == 0.0 && rel_phase == 0.0;
}

ChannelSpec identity_channel() { return ChannelSpec{}; }

void ConversionChain::validate() const {
    require_probability(passive_trans, "passive_trans");
    require_probability(coupling_telecom, "coupling_telecom");
    require_probability(coupling_nir, "coupling_nir");
    require_probability(eff_down, "eff_down");
    require_probability(eff_up, "eff_up");
    require_probability(noise_prob, "noise_prob");
    if (!(residual_factor > 0.0)) throw DomainError("residual_factor must be positive");
    if (!(v_delay_s >= 0.0)) throw DomainError("v_delay must be non-negative");
    if (!(contrast >= 1.0)) throw DomainError("contrast must be >= 1, got " + std::to_string(contrast));
    if (!(fiber_length_m >= 0.0)) throw DomainError("fiber length must be non-negative");
    if (!(fiber_atten_db_per_km >= 0.0)) throw DomainError("fiber attenuation must be non-negative");
}

double total_transmission(const ConversionChain& chain) {
    chain.validate();
    const double coupling =
        chain.passive_includes_coupling ? 1.0 : chain.coupling_telecom * chain.coupling_nir;
    const double fiber = std::pow(10.0, -chain.fiber_atten_db_per_km * chain.fiber_length_m / 1e4);
    const double total = chain.passive_trans * coupling * chain.eff_down * chain.eff_up *
                         chain.residual_factor * fiber;
    if (total > 1.0)
        throw DomainError("composed chain transmission exceeds 1 (" + std::to_string(total) + ")");
    return total;
}

double residual_factor_for(const ConversionChain& chain, double target) {
    ConversionChain unit = chain;
    unit.residual_factor = 1.0;
    const double base = total_transmission(unit);
    if (!(base > 0.0)) throw DomainError("chain has zero transmission before calibration");
    return target / base;
}

double depol_from_contrast(double contrast) {
    if (!(contrast >= 1.0))
        throw DomainError("contrast must be >= 1, got " + std::to_string(contrast));
    if (std::isinf(contrast)) return 0.0;
    return 2.0 / (contrast + 1.0);
}

ChannelSpec chain_to_channel(const ConversionChain& chain) {
    const double transmission = total_transmission(chain);
    const double contrast_depol = depol_from_contrast(chain.contrast);

    // A noise photon arriving in place of a lost signal photon heralds an
    // unpolarized click; conditioned on a click this is extra depolarization.
    const double noise_clicks = (1.0 - transmission) * chain.noise_prob;
    const double survival = transmission + noise_clicks;
    const double genuine = survival > 0.0 ? transmission / survival : 0.0;

    ChannelSpec spec;
    spec.trans_h = survival;
    spec.trans_v = survival;
    spec.depol = 1.0 - (1.0 - contrast_depol) * genuine;
    spec.rel_phase = chain.rel_phase;
    spec.label = "conversion chain";
    spec.validate();
    return spec;
}

double classical_contrast(const ChannelSpec& channel) {
    channel.validate();
    using Matrix2c = Eigen::Matrix<std::complex<double>, 2, 2>;
    Matrix2c rho;
    rho << 0.5, 0.5, 0.5, 0.5;  // 45-degree linear probe

    Matrix2c filter = Matrix2c::Zero();
    filter(0, 0) = std::sqrt(channel.trans_h);
    filter(1, 1) = std::sqrt(channel.trans_v);
    rho = filter * rho * filter.adjoint();
    const double power = rho.trace().real();
    if (!(power > 0.0)) throw DegenerateChannelError("channel transmits no light");
    rho = (1.0 - channel.depol) * rho + channel.depol * power * 0.5 * Matrix2c::Identity();

    Matrix2c phase = Matrix2c::Zero();
    phase(0, 0) = 1.0;
    phase(1, 1) = std::polar(1.0, channel.rel_phase);
    rho = phase * rho * phase.adjoint();

    // Power behind a linear analyzer at angle b is a^T Re(rho) a with a = (cos b, sin b).
    const Eigen::Matrix2d real_part = rho.real();
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(real_part);
    const double lo = solver.eigenvalues()(0);
    const double hi = solver.eigenvalues()(1);
    if (lo <= hi * 1e-15) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

bool delay_consistency(const ConversionChain& chain, double pump_switch_window_s) {
    if (!(pump_switch_window_s > 0.0)) throw DomainError("pump switching window must be positive");
    if (!(chain.v_delay_s >= 0.0)) throw DomainError("v_delay must be non-negative");
    return chain.v_delay_s <= pump_switch_window_s;
}

}  // namespace qmem

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

#include "qmem/bell_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "qmem/errors.hpp"
#include "qmem/rng.hpp"

namespace qmem {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kBootstrapStream = 0xb0075;

double wrap_pi(double phase) {
    // (-pi, pi]
    double w = std::remainder(phase, 2.0 * kPi);
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

CorrelationEstimate from_weights(double c13, double c14, double c23, double c24, std::uint64_t n) {
    const double total = c13 + c14 + c23 + c24;
    CorrelationEstimate est;
    est.n = n;
    est.e = (c13 + c24 - c14 - c23) / total;
    est.sigma = std::sqrt(std::max(0.0, 1.0 - est.e * est.e) / static_cast<double>(n));
    return est;
}

struct LinearFringe {
    Eigen::Vector3d coef;  // a, b, c in a cos x - b sin x + c
    Eigen::Matrix3d cov;
    double chi2 = 0.0;
};

LinearFringe solve_linear(double theta_s, double frequency, std::span<const FringePoint> points,
                          const std::vector<double>& weights) {
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const FringePoint& p = points[static_cast<std::size_t>(k)];
        const double x = frequency * (theta_s - p.theta_i);
        const double w = std::sqrt(weights[static_cast<std::size_t>(k)]);
        design(k, 0) = w * std::cos(x);
        design(k, 1) = -w * std::sin(x);
        design(k, 2) = w;
        rhs(k) = w * p.e;
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < 3) throw FitError("fringe design matrix is rank deficient");
    LinearFringe out;
    out.coef = qr.solve(rhs);
    out.cov = (design.transpose() * design).inverse();
    out.chi2 = (design * out.coef - rhs).squaredNorm();
    return out;
}

}  // namespace

CorrelationEstimate correlation_E(const std::array<std::uint64_t, 4>& counts) {
    const std::uint64_t n = counts[0] + counts[1] + counts[2] + counts[3];
    if (n == 0) throw InsufficientDataError("no coincidences recorded for this setting");
    return from_weights(double(counts[kC13]), double(counts[kC14]), double(counts[kC23]), double(counts[kC24]), n);
}

std::array<std::uint64_t, 4> pooled_counts(const CountMatrix& m) {
    // The pi/2 flip exchanges H and V on both arms: D1<->D2, D3<->D4.
    std::array<std::uint64_t, 4> c{};
    c[kC13] = m.counts[kC13] + m.counts_flipped[kC24];
    c[kC24] = m.counts[kC24] + m.counts_flipped[kC13];
    c[kC14] = m.counts[kC14] + m.counts_flipped[kC23];
    c[kC23] = m.counts[kC23] + m.counts_flipped[kC14];
    return c;
}

CorrelationEstimate correlation_E(const CountMatrix& m, FlipEstimator estimator) {
    const std::uint64_t n = m.coincidences();
    if (n == 0) throw InsufficientDataError("no coincidences recorded for this setting");

    std::uint64_t unflipped = 0, flipped = 0;
    for (int k = 0; k < 4; ++k) {
        unflipped += m.counts[k];
        flipped += m.counts_flipped[k];
    }
    if (estimator == FlipEstimator::geometric && unflipped > 0 && flipped > 0) {
        auto g = [](std::uint64_t a, std::uint64_t b) { return std::sqrt(double(a) * double(b)); };
        const double g13 = g(m.counts[kC13], m.counts_flipped[kC24]);
        const double g24 = g(m.counts[kC24], m.counts_flipped[kC13]);
        const double g14 = g(m.counts[kC14], m.counts_flipped[kC23]);
        const double g23 = g(m.counts[kC23], m.counts_flipped[kC14]);
        if (g13 + g24 + g14 + g23 > 0.0) return from_weights(g13, g14, g23, g24, n);
    }
    CorrelationEstimate est = correlation_E(pooled_counts(m));
    est.n = n;
    return est;
}

ChshResult chsh_S(std::span<const ERecord> records) {
    if (records.size() != kChshTerms.size())
        throw SettingsMismatchError("CHSH needs exactly 4 settings, got " + std::to_string(records.size()));
    std::array<bool, 4> used{};
    ChshResult out;
    double var = 0.0;
    for (const ChshTerm& term : kChshTerms) {
        std::size_t match = records.size();
        for (std::size_t k = 0; k < records.size(); ++k) {
            if (std::abs(wrap_angle(records[k].theta_s) - term.theta_s) <= 1e-9 &&
                std::abs(wrap_angle(records[k].theta_i) - term.theta_i) <= 1e-9) {
                if (used[k]) throw SettingsMismatchError("duplicate CHSH setting");
                match = k;
                break;
            }
        }
        if (match == records.size())
            throw SettingsMismatchError("missing CHSH setting (" + std::to_string(term.theta_s) + ", " +
                                        std::to_string(term.theta_i) + ")");
        used[match] = true;
        out.s += term.sign * records[match].e;
        var += records[match].sigma * records[match].sigma;
    }
    out.sigma = std::sqrt(var);
    out.violation = std::abs(out.s) > 2.0;
    return out;
}

BellResult analyze_bell(std::span<const CountMatrix> matrices, FlipEstimator estimator) {
    BellResult result;
    for (std::size_t row = 0; row < kChshTerms.size(); ++row) {
        const MeasurementSetting want(kChshTerms[row].theta_s, kChshTerms[row].theta_i);
        const auto it = std::find_if(matrices.begin(), matrices.end(), [&](const CountMatrix& m) {
            return std::abs(m.setting.theta_s() - want.theta_s()) <= 1e-9 &&
                   std::abs(m.setting.theta_i() - want.theta_i()) <= 1e-9;
        });
        if (it == matrices.end()) throw SettingsMismatchError("count data lacks a canonical CHSH setting");
        const CorrelationEstimate est = correlation_E(*it, estimator);
        result.e_values[row] = {want.theta_s(), want.theta_i(), est.e, est.sigma, est.n};
        result.total_events += est.n;
    }
    const ChshResult chsh = chsh_S(result.e_values);
    result.s_value = chsh.s;
    result.sigma_s = chsh.sigma;
    result.violation = chsh.violation;
    return result;
}

double bootstrap_sigma(const std::array<std::uint64_t, 4>& counts, int resamples, std::uint64_t seed) {
    if (resamples < 100) throw DomainError("bootstrap needs at least 100 resamples");
    const std::uint64_t n = counts[0] + counts[1] + counts[2] + counts[3];
    if (n == 0) throw InsufficientDataError("no coincidences to resample");

    std::vector<double> e(static_cast<std::size_t>(resamples));
#pragma omp parallel for schedule(static)
    for (int r = 0; r < resamples; ++r) {
        Rng rng(derive_seed(seed, kBootstrapStream, static_cast<std::uint64_t>(r)));
        // Multinomial draw as a chain of conditional binomials.
        std::array<std::uint64_t, 4> draw{};
        std::uint64_t remaining = n;
        std::uint64_t mass_left = n;
        for (int k = 0; k < 3; ++k) {
            if (remaining == 0 || mass_left == 0) break;
            const double p = std::min(1.0, double(counts[k]) / double(mass_left));
            std::binomial_distribution<std::uint64_t> binom(remaining, p);
            draw[k] = binom(rng);
            remaining -= draw[k];
            mass_left -= counts[k];
        }
        draw[3] = remaining;
        e[static_cast<std::size_t>(r)] =
            (double(draw[kC13]) + double(draw[kC24]) - double(draw[kC14]) - double(draw[kC23])) / double(n);
    }
    double mean = 0.0;
    for (double v : e) mean += v;
    mean /= resamples;
    double ss = 0.0;
    for (double v : e) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (resamples - 1));
}

double bootstrap_sigma(const CountMatrix& matrix, int resamples, std::uint64_t seed) {
    return bootstrap_sigma(pooled_counts(matrix), resamples, seed);
}

double FringeFit::absolute_phase() const { return wrap_pi(frequency * theta_s + phase); }

double FringeFit::period() const { return 2.0 * kPi / frequency; }

double FringeFit::value(double theta_i) const {
    return amplitude * std::cos(frequency * (theta_s - theta_i) + phase) + offset;
}

FringeFit fit_fringe(double theta_s, std::span<const FringePoint> points, const FringeOptions& options) {
    if (points.size() < 4) throw FitError("fringe fit needs at least 4 points");
    if (!(options.frequency > 0.0)) throw FitError("fringe frequency must be positive");

    const auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                              [](const FringePoint& a, const FringePoint& b) {
                                                  return a.theta_i < b.theta_i;
                                              });
    const double span = hi->theta_i - lo->theta_i;
    if (span == 0.0) throw FitError("all fringe points share one angle; design is rank deficient");
    if (span < 0.5 * kPi / options.frequency * (1.0 - 1e-12))
        throw FitError("fringe points must span at least half a fringe period");

    double floor_sigma = 0.0;
    for (const FringePoint& p : points)
        if (p.sigma > 0.0 && (floor_sigma == 0.0 || p.sigma < floor_sigma)) floor_sigma = p.sigma;
    if (floor_sigma == 0.0) floor_sigma = 1.0;
    std::vector<double> weights;
    weights.reserve(points.size());
    for (const FringePoint& p : points) {
        const double s = std::max(p.sigma, floor_sigma);
        weights.push_back(1.0 / (s * s));
    }

    double frequency = options.frequency;
    double sigma_frequency = 0.0;
    if (options.free_frequency) {
        auto chi2_at = [&](double k) { return solve_linear(theta_s, k, points, weights).chi2; };
        const double k_lo = 0.5 * options.frequency;
        const double k_hi = 1.5 * options.frequency;
        constexpr int kScan = 400;
        const double step = (k_hi - k_lo) / kScan;
        double best_k = k_lo;
        double best = chi2_at(k_lo);
        for (int i = 1; i <= kScan; ++i) {
            const double k = k_lo + i * step;
            const double c = chi2_at(k);
            if (c < best) {
                best = c;
                best_k = k;
            }
        }
        const auto refined = boost::math::tools::brent_find_minima(
            chi2_at, std::max(k_lo, best_k - step), std::min(k_hi, best_k + step), 40);
        frequency = refined.first;
        // Curvature of chi2 gives the 1-sigma width (delta chi2 = 1).
        const double h = 1e-4 * frequency;
        const double curvature = (chi2_at(frequency + h) - 2.0 * refined.second + chi2_at(frequency - h)) / (h * h);
        sigma_frequency = curvature > 0.0 ? std::sqrt(2.0 / curvature) : 0.0;
    }

    const LinearFringe lin = solve_linear(theta_s, frequency, points, weights);
    const double a = lin.coef(0);
    const double b = lin.coef(1);

    FringeFit fit;
    fit.theta_s = theta_s;
    fit.frequency = frequency;
    fit.sigma_frequency = sigma_frequency;
    fit.amplitude = std::hypot(a, b);
    fit.phase = fit.amplitude > 0.0 ? wrap_pi(std::atan2(b, a)) : 0.0;
    fit.offset = lin.coef(2);
    fit.chi2 = lin.chi2;
    fit.sigma_offset = std::sqrt(lin.cov(2, 2));
    if (fit.amplitude > 0.0) {
        const Eigen::Vector2d grad_amp(a / fit.amplitude, b / fit.amplitude);
        const double a2 = fit.amplitude * fit.amplitude;
        const Eigen::Vector2d grad_phase(-b / a2, a / a2);
        const Eigen::Matrix2d cov = lin.cov.topLeftCorner<2, 2>();
        fit.sigma_amplitude = std::sqrt(grad_amp.dot(cov * grad_amp));
        fit.sigma_phase = std::sqrt(grad_phase.dot(cov * grad_phase));
    } else {
        fit.sigma_amplitude = std::sqrt(0.5 * (lin.cov(0, 0) + lin.cov(1, 1)));
        fit.sigma_phase = kPi;
    }
    double ss = 0.0;
    for (const FringePoint& p : points) {
        const double r = p.e - fit.value(p.theta_i);
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / static_cast<double>(points.size()));
    return fit;
}

}  // namespace qmem

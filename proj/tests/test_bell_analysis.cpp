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
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "qmem/bell_analysis.hpp"
#include "qmem/errors.hpp"

namespace qmem {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<ERecord> table_records(const std::array<double, 4>& e) {
    std::vector<ERecord> out;
    for (std::size_t k = 0; k < 4; ++k) out.push_back({kChshTerms[k].theta_s, kChshTerms[k].theta_i, e[k], 0.05, 250});
    return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const double n = double(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = normal_cdf(xs[i]);
        d = std::max({d, f - i / n, (i + 1) / n - f});
    }
    return d;
}

TEST(CorrelationE, PerfectCorrelation) {
    const CorrelationEstimate e = correlation_E({100, 0, 0, 100});
    EXPECT_DOUBLE_EQ(e.e, 1.0);
    EXPECT_DOUBLE_EQ(e.sigma, 0.0);
    EXPECT_EQ(e.n, 200u);
}

TEST(CorrelationE, SymmetricCounts) {
    const CorrelationEstimate e = correlation_E({50, 50, 50, 50});
    EXPECT_DOUBLE_EQ(e.e, 0.0);
    EXPECT_NEAR(e.sigma, 1.0 / std::sqrt(200.0), 1e-15);
}

TEST(CorrelationE, TableSizedSample) {
    // 250 events per setting, E = 0.68
    const CorrelationEstimate e = correlation_E({105, 20, 20, 105});
    EXPECT_NEAR(e.e, 0.68, 1e-15);
    EXPECT_NEAR(e.sigma, 0.047, 0.001);
}

TEST(CorrelationE, EmptyIsAnError) {
    EXPECT_THROW(correlation_E({0, 0, 0, 0}), InsufficientDataError);
    CountMatrix m;
    EXPECT_THROW(correlation_E(m), InsufficientDataError);
}

TEST(CorrelationE, RateIndependent) {
    const CorrelationEstimate a = correlation_E({37, 11, 9, 41});
    const CorrelationEstimate b = correlation_E({370, 110, 90, 410});
    EXPECT_DOUBLE_EQ(a.e, b.e);
}

TEST(CorrelationE, PooledCountsExchangePortsOfFlippedHalf) {
    CountMatrix m;
    m.counts = {10, 1, 2, 20};
    m.counts_flipped = {30, 3, 4, 40};
    const auto c = pooled_counts(m);
    EXPECT_EQ(c[kC13], 50u);
    EXPECT_EQ(c[kC24], 50u);
    EXPECT_EQ(c[kC14], 5u);
    EXPECT_EQ(c[kC23], 5u);
}

TEST(Chsh, ReferenceTables) {
    EXPECT_NEAR(chsh_S(table_records({-0.78, 0.71, 0.75, 0.66})).s, 2.90, 1e-12);
    EXPECT_NEAR(chsh_S(table_records({-0.65, 0.67, 0.66, 0.68})).s, 2.66, 1e-12);
    EXPECT_NEAR(chsh_S(table_records({-0.54, 0.65, 0.78, 0.58})).s, 2.55, 1e-12);
    EXPECT_NEAR(chsh_S(table_records({-0.61, 0.72, 0.75, 0.56})).s, 2.64, 1e-12);
}

TEST(Chsh, TsirelsonValues) {
    const double r = 1.0 / std::sqrt(2.0);
    const ChshResult c = chsh_S(table_records({-r, r, r, r}));
    EXPECT_NEAR(c.s, 2.8284, 1e-4);
    EXPECT_TRUE(c.violation);
    EXPECT_NEAR(c.sigma * c.sigma, 4 * 0.05 * 0.05, 1e-12);
}

TEST(Chsh, OrderDoesNotMatter) {
    auto rec = table_records({-0.65, 0.67, 0.66, 0.68});
    std::reverse(rec.begin(), rec.end());
    EXPECT_NEAR(chsh_S(rec).s, 2.66, 1e-12);
}

TEST(Chsh, SettingsMustBeCanonical) {
    auto rec = table_records({-0.65, 0.67, 0.66, 0.68});
    auto dup = rec;
    dup[1] = dup[0];
    EXPECT_THROW(chsh_S(dup), SettingsMismatchError);
    auto off = rec;
    off[2].theta_i += 1e-6;
    EXPECT_THROW(chsh_S(off), SettingsMismatchError);
    rec.pop_back();
    EXPECT_THROW(chsh_S(rec), SettingsMismatchError);
}

TEST(Chsh, SimulatedSNeverBeatsTsirelsonByMuch) {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> vis(0.0, 1.0);
    int excess = 0;
    for (int run = 0; run < 10000; ++run) {
        const TwoQubitState w = apply_werner(make_bell_phi_plus(), vis(gen));
        std::vector<ERecord> rec;
        Rng rng(derive_seed(17, 0, run));
        for (const ChshTerm& t : kChshTerms) {
            const MeasurementSetting s(t.theta_s, t.theta_i);
            const ClickProbabilities p = click_probabilities(w, s);
            std::array<std::uint64_t, 4> c{};
            for (int k = 0; k < 100; ++k) ++c[static_cast<std::size_t>(simulate_clicks(p, DetectorBank{}, rng))];
            const CorrelationEstimate e = correlation_E(c);
            rec.push_back({t.theta_s, t.theta_i, e.e, e.sigma, e.n});
        }
        const ChshResult r = chsh_S(rec);
        if (r.s > 2.0 * std::sqrt(2.0) + 4.0 * r.sigma) ++excess;
    }
    EXPECT_EQ(excess, 0);
}

TEST(AnalyzeBell, SigmaAddsInQuadrature) {
    std::vector<CountMatrix> ms;
    const std::array<std::array<std::uint64_t, 4>, 4> counts{{{20, 90, 85, 25}, {95, 30, 25, 100}, {100, 20, 30, 90}, {92, 25, 28, 99}}};
    for (std::size_t k = 0; k < 4; ++k) {
        CountMatrix m;
        m.setting = MeasurementSetting(kChshTerms[k].theta_s, kChshTerms[k].theta_i);
        m.counts = counts[k];
        ms.push_back(m);
    }
    const BellResult r = analyze_bell(ms);
    double var = 0.0;
    for (const ERecord& e : r.e_values) {
        var += e.sigma * e.sigma;
        EXPECT_LE(std::abs(e.e), 1.0);
    }
    EXPECT_NEAR(r.sigma_s * r.sigma_s, var, 1e-12);
    EXPECT_EQ(r.total_events, 20u + 90 + 85 + 25 + 95 + 30 + 25 + 100 + 100 + 20 + 30 + 90 + 92 + 25 + 28 + 99);
    ms.pop_back();
    EXPECT_THROW(analyze_bell(ms), SettingsMismatchError);
}

TEST(Bootstrap, AgreesWithClosedForm) {
    const std::array<std::uint64_t, 4> c{104, 21, 21, 104};
    const double closed = correlation_E(c).sigma;
    EXPECT_NEAR(bootstrap_sigma(c, 10000, 1), closed, 0.1 * closed);
    const std::array<std::uint64_t, 4> flat{50, 50, 50, 50};
    EXPECT_NEAR(bootstrap_sigma(flat, 10000, 2), 0.0707, 0.1 * 0.0707);
    EXPECT_NEAR(bootstrap_sigma({100, 0, 0, 100}, 1000, 3), 0.0, 1e-12);
}

TEST(Bootstrap, NeedsEnoughResamplesAndIsReproducible) {
    EXPECT_THROW(bootstrap_sigma({1, 2, 3, 4}, 50, 1), DomainError);
    EXPECT_EQ(bootstrap_sigma({10, 2, 3, 14}, 500, 9), bootstrap_sigma({10, 2, 3, 14}, 500, 9));
}

std::vector<FringePoint> sample_fringe(double theta_s, double a, double phi, double c, int n, double sigma = 0.0) {
    std::vector<FringePoint> pts;
    for (int k = 0; k < n; ++k) {
        const double ti = -kPi / 2 + k * kPi / n;
        pts.push_back({ti, a * std::cos(2 * (theta_s - ti) + phi) + c, sigma});
    }
    return pts;
}

TEST(FringeFit, NoiselessRecovery) {
    const auto pts = sample_fringe(0.0, 0.94, 0.0, 0.0, 8);
    const FringeFit f = fit_fringe(0.0, pts);
    EXPECT_NEAR(f.amplitude, 0.94, 1e-9);
    EXPECT_NEAR(f.phase, 0.0, 1e-9);
    EXPECT_NEAR(f.offset, 0.0, 1e-9);
    EXPECT_NEAR(f.residual_rms, 0.0, 1e-9);

    const FringeFit g = fit_fringe(kPi / 4, sample_fringe(kPi / 4, 0.7, -1.1, 0.05, 11));
    EXPECT_NEAR(g.amplitude, 0.7, 1e-9);
    EXPECT_NEAR(g.phase, -1.1, 1e-9);
    EXPECT_NEAR(g.offset, 0.05, 1e-9);
}

TEST(FringeFit, ConstantData) {
    std::vector<FringePoint> pts;
    for (int k = 0; k < 6; ++k) pts.push_back({-1.0 + 0.4 * k, 0.5, 0.01});
    const FringeFit f = fit_fringe(0.0, pts);
    EXPECT_NEAR(f.amplitude, 0.0, 1e-9);
    EXPECT_NEAR(f.offset, 0.5, 1e-9);
}

TEST(FringeFit, NegativeFringeCarriesSignInPhase) {
    std::vector<FringePoint> pts;
    for (int k = 0; k < 8; ++k) {
        const double ti = -kPi / 2 + k * kPi / 8;
        pts.push_back({ti, -std::cos(2 * ti), 0.0});
    }
    const FringeFit f = fit_fringe(0.0, pts);
    EXPECT_NEAR(f.amplitude, 1.0, 1e-9);
    EXPECT_NEAR(std::abs(f.phase), kPi, 1e-9);
}

TEST(FringeFit, FreeFrequencyFindsHalfWaveplatePeriod) {
    FringeOptions opt;
    opt.free_frequency = true;
    const FringeFit f = fit_fringe(0.0, sample_fringe(0.0, 0.9, 0.2, 0.0, 16, 0.01), opt);
    EXPECT_NEAR(f.frequency, 2.0, 1e-6);
    EXPECT_NEAR(f.period(), kPi, 1e-6);
}

TEST(FringeFit, RejectsDegenerateInput) {
    std::vector<FringePoint> same(5, FringePoint{0.3, 0.1, 0.02});
    EXPECT_THROW(fit_fringe(0.0, same), FitError);
    EXPECT_THROW(fit_fringe(0.0, sample_fringe(0.0, 1, 0, 0, 3)), FitError);
    std::vector<FringePoint> narrow;
    for (int k = 0; k < 6; ++k) narrow.push_back({0.05 * k, 0.1 * k, 0.01});
    EXPECT_THROW(fit_fringe(0.0, narrow), FitError);
}

TEST(FringeFit, PullsAreStandardNormal) {
    std::mt19937_64 gen(2024);
    const double sigma = 0.05, a = 0.8, phi = 0.3, c = 0.05;
    std::vector<double> pull_a, pull_phi, pull_c;
    for (int rep = 0; rep < 500; ++rep) {
        std::normal_distribution<double> noise(0.0, sigma);
        auto pts = sample_fringe(0.0, a, phi, c, 12, sigma);
        for (auto& p : pts) p.e += noise(gen);
        const FringeFit f = fit_fringe(0.0, pts);
        pull_a.push_back((f.amplitude - a) / f.sigma_amplitude);
        pull_phi.push_back((f.phase - phi) / f.sigma_phase);
        pull_c.push_back((f.offset - c) / f.sigma_offset);
        EXPECT_LE(std::abs(f.amplitude), 1.0 + 3.0 * f.residual_rms);
    }
    const double critical = 1.63 / std::sqrt(500.0);  // 1 % level
    EXPECT_LT(ks_statistic(pull_a), critical);
    EXPECT_LT(ks_statistic(pull_phi), critical);
    EXPECT_LT(ks_statistic(pull_c), critical);
}

}  // namespace
}  // namespace qmem

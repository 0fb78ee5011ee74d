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

#ifndef QMEM_BELL_ANALYSIS_HPP
#define QMEM_BELL_ANALYSIS_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "qmem/detection.hpp"

namespace qmem {

/// How unflipped and pi/2-flipped counts are combined into one E.
///
/// `pooled` adds the flipped counts with ports exchanged (C13 + C24', ...).
/// It cancels detector-efficiency imbalance to first order and is exact for
/// ideal detectors. `geometric` uses sqrt(C13 C24') etc.; every term then
/// carries the same efficiency product, so the imbalance cancels to all
/// orders at the price of a small-count bias.
enum class FlipEstimator { pooled, geometric };

struct CorrelationEstimate {
    double e = 0.0;
    double sigma = 0.0;
    std::uint64_t n = 0;
};

/// E = (C13 + C24 - C14 - C23) / n, sigma = sqrt((1 - E^2) / n).
/// Throws InsufficientDataError when n = 0.
CorrelationEstimate correlation_E(const std::array<std::uint64_t, 4>& counts);
CorrelationEstimate correlation_E(const CountMatrix& matrix, FlipEstimator estimator = FlipEstimator::pooled);

/// Port-exchanged sum of unflipped and flipped counts.
std::array<std::uint64_t, 4> pooled_counts(const CountMatrix& matrix);

struct ERecord {
    double theta_s = 0.0;
    double theta_i = 0.0;
    double e = 0.0;
    double sigma = 0.0;
    std::uint64_t n = 0;
};

struct ChshResult {
    double s = 0.0;
    double sigma = 0.0;
    bool violation = false;  // |S| > 2
};

/// Signed CHSH sum. The records must cover the four canonical settings
/// exactly once (angles matched to 1e-9), in any order.
ChshResult chsh_S(std::span<const ERecord> records);

struct BellResult {
    std::array<ERecord, 4> e_values{};  // table row order, see kChshTerms
    double s_value = 0.0;
    double sigma_s = 0.0;
    std::uint64_t total_events = 0;
    bool violation = false;
};

/// Picks the canonical settings out of `matrices` and evaluates E and S.
BellResult analyze_bell(std::span<const CountMatrix> matrices, FlipEstimator estimator = FlipEstimator::pooled);

/// Standard deviation of E over multinomial resamples of the counts.
/// Resamples run in parallel with sub-seeds derived from `seed`.
double bootstrap_sigma(const std::array<std::uint64_t, 4>& counts, int resamples, std::uint64_t seed);
double bootstrap_sigma(const CountMatrix& matrix, int resamples, std::uint64_t seed);

struct FringePoint {
    double theta_i = 0.0;
    double e = 0.0;
    double sigma = 0.0;
};

/// E(theta_i) = amplitude * cos(frequency * (theta_s - theta_i) + phase) + offset.
/// Amplitude is reported non-negative; the sign lives in the phase, which
/// is wrapped to (-pi, pi].
struct FringeFit {
    double theta_s = 0.0;
    double amplitude = 0.0;
    double phase = 0.0;
    double offset = 0.0;
    double frequency = 2.0;
    double residual_rms = 0.0;
    double chi2 = 0.0;
    double sigma_amplitude = 0.0;
    double sigma_phase = 0.0;
    double sigma_offset = 0.0;
    double sigma_frequency = 0.0;  // zero unless the frequency was fitted

    /// Fringe phase in theta_i alone: E = A cos(frequency * theta_i - absolute_phase) + offset.
    double absolute_phase() const;
    double period() const;
    double value(double theta_i) const;
};

struct FringeOptions {
    bool free_frequency = false;  // diagnostic mode
    double frequency = 2.0;       // fixed value, or starting guess when free
};

/// Weighted least squares. Points with zero sigma take the smallest nonzero
/// sigma in the set. Throws FitError on fewer than 4 points, on a set that
/// does not span half a fringe period, or on a rank-deficient design.
FringeFit fit_fringe(double theta_s, std::span<const FringePoint> points, const FringeOptions& options = {});

}  // namespace qmem

#endif  // QMEM_BELL_ANALYSIS_HPP

// SPDX-License-Identifier: Apache-2.0
//
// uwbnlos: UWB propagation-condition classification toolkit
// Copyright (C) 2026 The uwbnlos Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

#include "uwbnlos/cir.hpp"

namespace uwbnlos {

enum class IntegrationRule { left_riemann, trapezoid };

std::string_view to_string(IntegrationRule rule) noexcept;

// Window offsets are relative to the first path time. The pre-FP span
// tau_s covers [T_FP - tau_s, T_FP), clipped at the record start.
struct FeatureConfig {
    double tau_s = 20e-9;
    double window_start_s = -20e-9;
    double window_end_s = 100e-9;
    IntegrationRule rule = IntegrationRule::trapezoid;

    void validate() const;
};

inline constexpr std::size_t kFeatureCount = 10;

// The ten classification features, numbered 1..10 in this order.
struct FeatureVector {
    double rsl_dbm = 0.0;              // 1
    double rfpr_db = 0.0;              // 2
    double energy = 0.0;               // 3
    double mean_excess_delay_s = 0.0;  // 4
    double rms_delay_spread = 0.0;     // 5, second central moment (s^2)
    double mean_magnitude = 0.0;       // 6
    double variance_magnitude = 0.0;   // 7
    double kurtosis = 0.0;             // 8
    double amplitude = 0.0;            // 9
    double pre_fp_variance = 0.0;      // 10

    std::array<double, kFeatureCount> to_array() const noexcept;
    static FeatureVector from_array(const std::array<double, kFeatureCount>& values) noexcept;

    // 1-based; throws Errc::invalid_argument outside 1..10.
    double at(int feature_number) const;

    static const std::array<std::string_view, kFeatureCount>& names() noexcept;

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// ---------------------------------------------------------------------------
// Sampled-integral primitives. A span f with spacing dt stands for a
// piecewise signal; integrals use the selected rule, and T is the measure of
// the integration domain under that rule (n dt for left Riemann, (n-1) dt
// for the trapezoid).
namespace integrate {

double weight(std::size_t k, std::size_t n, IntegrationRule rule) noexcept;
double span_length(std::size_t n, double dt, IntegrationRule rule) noexcept;

// int f dt
double integral(std::span<const double> f, double dt, IntegrationRule rule);
// (1/T) int f dt
double mean(std::span<const double> f, double dt, IntegrationRule rule);
// (1/T) int (f - mean)^2 dt
double variance(std::span<const double> f, double dt, IntegrationRule rule);
// (1/(sigma^4 T)) int (f - mean)^4 dt, non-excess. Throws degenerate_signal
// when the variance is zero.
double kurtosis(std::span<const double> f, double dt, IntegrationRule rule);

} // namespace integrate

// Sample range [begin, begin + count) a feature operates on.
struct SampleWindow {
    std::size_t begin = 0;
    std::size_t count = 0;
};

// Eqs. 5-10 window: [T_FP + window_start_s, T_FP + window_end_s) clipped to
// the record. Throws Errc::empty_window when too short for the rule.
SampleWindow analysis_window(const Waveform& w, const FeatureConfig& cfg);

// [T_FP - tau_s, T_FP) clipped at sample 0.
SampleWindow pre_fp_window(const Waveform& w, const FeatureConfig& cfg);

// Feature 1: 10 log10(C 2^17 / N^2) - A
double compute_rsl(const ChannelDiagnostics& d);
// First path level: 10 log10((F1^2 + F2^2 + F3^2) / N^2) - A
double compute_fsl(const ChannelDiagnostics& d);
// Feature 2: RSL - FSL, evaluated as the single ratio so that A cancels
// exactly.
double compute_rfpr(const ChannelDiagnostics& d);
inline double rfpr_from_levels(double rsl_dbm, double fsl_dbm) noexcept { return rsl_dbm - fsl_dbm; }

double compute_energy(const Waveform& w, const FeatureConfig& cfg);
double compute_mean_excess_delay(const Waveform& w, const FeatureConfig& cfg);
// Literal second central moment of the power-delay profile, in s^2.
double compute_rms_delay_spread(const Waveform& w, const FeatureConfig& cfg);
// sqrt of the above, in seconds.
double rms_delay_spread_seconds(const Waveform& w, const FeatureConfig& cfg);
double compute_mean_magnitude(const Waveform& w, const FeatureConfig& cfg);
double compute_variance_magnitude(const Waveform& w, const FeatureConfig& cfg);
double compute_kurtosis(const Waveform& w, const FeatureConfig& cfg);
double compute_amplitude(const Waveform& w, const FeatureConfig& cfg);
// Normalized by the span actually integrated, which is tau_s unless the
// window was clipped at the record start.
double compute_pre_fp_variance(const Waveform& w, const FeatureConfig& cfg);

// Throws FeatureError carrying the 1-based number of the failing feature.
FeatureVector extract_features(const RangingRecord& rec, const FeatureConfig& cfg = {});

} // namespace uwbnlos

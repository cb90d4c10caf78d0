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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uwbnlos/cir.hpp"

namespace uwbnlos {

enum class PulseShape { gaussian_monocycle, raised_cosine_envelope };

// Unit-peak transmit pulse p(t), centred so that |p| peaks at t = 0.
//
// gaussian_monocycle is the second-derivative Gaussian commonly used for
// impulse radio, p(t) = (1 - 4 pi (t/w)^2) exp(-2 pi (t/w)^2), with energy
// 3w/8. raised_cosine_envelope is (1 + cos(pi t / w)) / 2 on |t| <= w, with
// energy 3w/4.
struct PulseSpec {
    PulseShape shape = PulseShape::gaussian_monocycle;
    double width_s = 1e-9;

    double operator()(double t) const noexcept;
    double energy() const noexcept;
    // |t| beyond which p(t) is exactly zero in double precision.
    double support_s() const noexcept;
};

struct PathComponent {
    double amplitude = 0.0;
    double delay_s = 0.0;
};

struct MultipathSpec {
    std::vector<PathComponent> components;
    PulseSpec pulse;
    double noise_sigma = 0.0;
    double duration_s = 0.0;
    double sample_period_s = 1e-9;
    std::uint64_t seed = 0;

    // Throws Errc::invalid_argument.
    void validate() const;
    std::size_t sample_count() const noexcept;
};

struct DetectorConfig {
    std::size_t noise_floor_window = 16;
    double k_threshold = 6.0;
};

// |sum_i a_i p(k dt - tau_i) + n_k| on the sample grid, without first-path
// detection. n_k is circular complex Gaussian with E|n_k|^2 = noise_sigma^2,
// matching a receiver that reports complex taps.
std::vector<double> render_samples(const MultipathSpec& spec);

// Renders and runs detect_first_path. When the detector finds no crossing
// (e.g. the signal starts at sample 0, leaving no noise-only lead-in) the
// first path falls back to the strongest sample.
Waveform render_cir(const MultipathSpec& spec, const DetectorConfig& detector = {});

// Leading-edge detector: first index whose magnitude exceeds
// mean + k * max(std, 1e-12) of the leading noise_floor_window samples.
// Throws Errc::invalid_argument on a bad window and Errc::no_path_detected
// when nothing crosses.
std::size_t detect_first_path(std::span<const double> samples, std::size_t noise_floor_window,
                              double k_threshold);

struct ValueRange {
    double min = 0.0;
    double max = 0.0;
};

// Parameter ranges for one propagation regime. Amplitudes are linear; the
// receiver "locks" onto the first component it can detect, which is the
// direct path for LOS and DP-NLOS and a reflection for NDP-NLOS.
struct ScenarioPreset {
    PropagationClass propagation_class = PropagationClass::LOS;
    PulseSpec pulse{PulseShape::raised_cosine_envelope, 1e-9};
    double sample_period_s = 1.0016e-9;
    double duration_s = 256 * 1.0016e-9;

    ValueRange noise_sigma;
    ValueRange lock_delay_s;
    ValueRange lock_amplitude;
    // Extra delay of the direct path through the obstacle.
    ValueRange obstacle_delay_s;

    // Weak components preceding the lock (NDP-NLOS only): the attenuated
    // direct path hidden_lead_s ahead of the lock, then hidden_paths - 1
    // scattered paths between them. Amplitudes are in units of noise_sigma.
    int hidden_paths = 0;
    ValueRange hidden_lead_s;
    ValueRange hidden_direct_sigma;
    ValueRange hidden_scatter_sigma;

    // Reflection cluster trailing the lock component. Amplitude of a
    // reflection at excess delay x is lock * 10^(rel_db/20) * exp(-x/decay).
    ValueRange reflection_count;
    ValueRange reflection_excess_s;
    ValueRange reflection_rel_db;
    ValueRange decay_s;

    // Per-pair ranging bias offset added to the geometric excess delay.
    ValueRange bias_offset_m;

    // Throws Errc::invalid_argument on min > max or out-of-domain values.
    void validate() const;
};

ScenarioPreset default_preset(PropagationClass c);

struct SyntheticWaveform {
    Waveform waveform;
    PropagationClass label;
    double true_direct_delay_s;  // arrival of the (possibly hidden) direct path
    double lock_delay_s;         // arrival of the component the receiver should lock onto
    double bias_m;
};

// n waveforms, each with independently drawn geometry.
std::vector<SyntheticWaveform> sample_scenario(const ScenarioPreset& preset, std::size_t n,
                                               std::uint64_t seed,
                                               const DetectorConfig& detector = {});

// Pair-structured data: geometry is drawn once per pair, while noise, small
// amplitude jitter and sub-sample timing jitter vary per waveform.
struct SyntheticPairs {
    std::vector<SyntheticWaveform> waveforms;
    std::vector<std::string> pair_ids;  // parallel to waveforms
};

SyntheticPairs sample_pairs(const ScenarioPreset& preset, std::size_t pair_count,
                            std::size_t waveforms_per_pair, std::uint64_t seed,
                            const std::string& pair_prefix, const DetectorConfig& detector = {});

// Radio register model used to attach diagnostics to synthetic CIRs:
// F1..F3 are the accumulator magnitudes at the first path index and the two
// following taps, C is the accumulated CIR power, both in units of
// gain * N per amplitude unit.
struct DiagnosticsModel {
    double preamble_count = 1024.0;
    double prf_constant_db = 121.74;
    double accumulator_gain = 64.0;
};

ChannelDiagnostics synthesize_diagnostics(const Waveform& w, const DiagnosticsModel& model = {});

std::vector<RangingRecord> to_records(const SyntheticPairs& pairs, const DiagnosticsModel& model = {});

} // namespace uwbnlos

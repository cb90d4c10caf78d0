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
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uwbnlos {

enum class PropagationClass : std::uint8_t { LOS = 0, DP_NLOS = 1, NDP_NLOS = 2 };

inline constexpr std::array<PropagationClass, 3> kAllClasses = {
    PropagationClass::LOS, PropagationClass::DP_NLOS, PropagationClass::NDP_NLOS};

// "LOS", "DP_NLOS", "NDP_NLOS"
std::string_view to_string(PropagationClass c) noexcept;

// Exact, case-sensitive match against to_string(); nullopt otherwise.
std::optional<PropagationClass> parse_propagation_class(std::string_view text) noexcept;

inline constexpr std::size_t class_index(PropagationClass c) noexcept
{
    return static_cast<std::size_t>(c);
}

// Smallest sample index k with k * period >= t. Quotients within 1e-9 of an
// integer snap to it, so windows expressed in seconds land on the intended
// sample even when t / period is not exactly representable.
std::int64_t ceil_sample_index(double t, double period) noexcept;

// Uniformly sampled CIR magnitude |r(t)|. Sample 0 is the start of the
// recorded window; the detected first path is carried explicitly.
class Waveform {
public:
    Waveform(std::vector<double> samples, double sample_period_s, std::size_t first_path_index);

    std::span<const double> samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    double sample_period() const noexcept { return sample_period_; }
    std::size_t first_path_index() const noexcept { return first_path_index_; }

    double time_at(std::size_t k) const noexcept { return static_cast<double>(k) * sample_period_; }
    double first_path_time() const noexcept { return time_at(first_path_index_); }
    double duration() const noexcept { return time_at(samples_.size()); }

    // Same samples, different first path index.
    Waveform with_first_path(std::size_t first_path_index) const;

    friend bool operator==(const Waveform&, const Waveform&) = default;

private:
    std::vector<double> samples_;
    double sample_period_;
    std::size_t first_path_index_;
};

// Adapter boundary for radios that report complex accumulator taps.
Waveform waveform_from_taps(std::span<const std::complex<double>> taps, double sample_period_s,
                            std::size_t first_path_index);

// Samples whose time k * period satisfies start_s <= t < end_s.
// Throws Errc::invalid_argument when start_s >= end_s and Errc::empty_window
// when nothing of the waveform falls inside.
std::span<const double> magnitude_window(const Waveform& w, double start_s, double end_s);

// Register-level quantities reported by the radio alongside each CIR.
struct ChannelDiagnostics {
    double cir_power = 0.0;                    // C
    double preamble_count = 0.0;               // N
    std::array<double, 3> first_path_amps{};   // F1, F2, F3
    double prf_constant_db = 0.0;              // A

    // Throws Errc::invalid_diagnostics on non-finite values, N <= 0, C < 0 or
    // negative amplitudes. A zero C or all-zero F is representable; the
    // power-level features reject those on use.
    void validate() const;

    friend bool operator==(const ChannelDiagnostics&, const ChannelDiagnostics&) = default;
};

class RangingRecord {
public:
    RangingRecord(Waveform waveform, ChannelDiagnostics diagnostics, std::string pair_id,
                  std::optional<double> bias_m = std::nullopt,
                  std::optional<PropagationClass> label = std::nullopt);

    const Waveform& waveform() const noexcept { return waveform_; }
    const ChannelDiagnostics& diagnostics() const noexcept { return diagnostics_; }
    const std::string& pair_id() const noexcept { return pair_id_; }
    const std::optional<double>& bias_m() const noexcept { return bias_m_; }
    const std::optional<PropagationClass>& label() const noexcept { return label_; }

    friend bool operator==(const RangingRecord&, const RangingRecord&) = default;

private:
    Waveform waveform_;
    ChannelDiagnostics diagnostics_;
    std::string pair_id_;
    std::optional<double> bias_m_;
    std::optional<PropagationClass> label_;
};

} // namespace uwbnlos

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

#include "uwbnlos/cir.hpp"

#include <algorithm>
#include <cmath>

#include "uwbnlos/error.hpp"

namespace uwbnlos {

std::string_view to_string(PropagationClass c) noexcept
{
    switch (c) {
    case PropagationClass::LOS: return "LOS";
    case PropagationClass::DP_NLOS: return "DP_NLOS";
    case PropagationClass::NDP_NLOS: return "NDP_NLOS";
    }
    return "?";
}

std::optional<PropagationClass> parse_propagation_class(std::string_view text) noexcept
{
    for (auto c : kAllClasses)
        if (to_string(c) == text)
            return c;
    return std::nullopt;
}

std::int64_t ceil_sample_index(double t, double period) noexcept
{
    const double x = t / period;
    const double nearest = std::round(x);
    if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x)))
        return static_cast<std::int64_t>(nearest);
    return static_cast<std::int64_t>(std::ceil(x));
}

Waveform::Waveform(std::vector<double> samples, double sample_period_s, std::size_t first_path_index)
    : samples_(std::move(samples)), sample_period_(sample_period_s), first_path_index_(first_path_index)
{
    if (samples_.size() < 2)
        throw Error(Errc::invalid_argument, "waveform needs at least 2 samples");
    if (!(sample_period_ > 0.0) || !std::isfinite(sample_period_))
        throw Error(Errc::invalid_argument, "sample period must be positive and finite");
    if (first_path_index_ >= samples_.size())
        throw Error(Errc::invalid_argument, "first path index outside waveform");
    for (double v : samples_)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw Error(Errc::invalid_argument, "waveform samples must be finite magnitudes >= 0");
}

Waveform Waveform::with_first_path(std::size_t first_path_index) const
{
    return Waveform(samples_, sample_period_, first_path_index);
}

Waveform waveform_from_taps(std::span<const std::complex<double>> taps, double sample_period_s,
                            std::size_t first_path_index)
{
    std::vector<double> mag(taps.size());
    std::transform(taps.begin(), taps.end(), mag.begin(),
                   [](const std::complex<double>& z) { return std::abs(z); });
    return Waveform(std::move(mag), sample_period_s, first_path_index);
}

std::span<const double> magnitude_window(const Waveform& w, double start_s, double end_s)
{
    if (!(start_s < end_s))
        throw Error(Errc::invalid_argument, "window start must precede window end");
    const auto n = static_cast<std::int64_t>(w.size());
    const auto lo = std::clamp<std::int64_t>(ceil_sample_index(start_s, w.sample_period()), 0, n);
    const auto hi = std::clamp<std::int64_t>(ceil_sample_index(end_s, w.sample_period()), 0, n);
    if (hi <= lo)
        throw Error(Errc::empty_window, "empty window");
    return w.samples().subspan(static_cast<std::size_t>(lo), static_cast<std::size_t>(hi - lo));
}

void ChannelDiagnostics::validate() const
{
    const bool finite = std::isfinite(cir_power) && std::isfinite(preamble_count) &&
                        std::isfinite(prf_constant_db) &&
                        std::all_of(first_path_amps.begin(), first_path_amps.end(),
                                    [](double f) { return std::isfinite(f); });
    if (!finite)
        throw Error(Errc::invalid_diagnostics, "diagnostics contain non-finite values");
    if (!(preamble_count > 0.0))
        throw Error(Errc::invalid_diagnostics, "preamble count must be positive");
    if (cir_power < 0.0)
        throw Error(Errc::invalid_diagnostics, "CIR power must be non-negative");
    for (double f : first_path_amps)
        if (f < 0.0)
            throw Error(Errc::invalid_diagnostics, "first path amplitudes must be non-negative");
}

RangingRecord::RangingRecord(Waveform waveform, ChannelDiagnostics diagnostics, std::string pair_id,
                             std::optional<double> bias_m, std::optional<PropagationClass> label)
    : waveform_(std::move(waveform)),
      diagnostics_(diagnostics),
      pair_id_(std::move(pair_id)),
      bias_m_(bias_m),
      label_(label)
{
    diagnostics_.validate();
    if (pair_id_.empty())
        throw Error(Errc::invalid_argument, "pair_id must be non-empty");
    if (bias_m_ && !std::isfinite(*bias_m_))
        throw Error(Errc::invalid_argument, "bias_m must be finite");
}

} // namespace uwbnlos

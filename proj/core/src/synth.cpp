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

#include "uwbnlos/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "random.hpp"
#include "uwbnlos/error.hpp"

namespace uwbnlos {

namespace {

constexpr double kSpeedOfLight = 299792458.0;
constexpr double kStdFloor = 1e-12;

// Per-waveform jitter applied on top of a pair's fixed geometry.
constexpr double kTimingJitter_s = 0.15e-9;
constexpr double kAmplitudeJitter = 0.1;
constexpr double kBiasJitter_m = 0.005;

double draw(detail::Rng& rng, const ValueRange& r)
{
    return r.min == r.max ? r.min : rng.uniform(r.min, r.max);
}

void check_range(const ValueRange& r, const char* name, double lower_bound)
{
    if (!std::isfinite(r.min) || !std::isfinite(r.max) || r.min > r.max)
        throw Error(Errc::invalid_argument, std::string("invalid range for ") + name);
    if (r.min < lower_bound)
        throw Error(Errc::invalid_argument, std::string("range below domain for ") + name);
}

struct Geometry {
    double noise_sigma;
    double lock_delay_s;
    double true_direct_offset_s;  // <= 0, relative to the lock component
    double excess_bias_m;         // geometric part of the ranging bias
    std::vector<PathComponent> relative;  // delays relative to the lock component
};

Geometry draw_geometry(const ScenarioPreset& p, detail::Rng& rng)
{
    Geometry g;
    g.noise_sigma = draw(rng, p.noise_sigma);
    g.lock_delay_s = draw(rng, p.lock_delay_s);
    const double lock_amp = draw(rng, p.lock_amplitude);
    const double obstacle = draw(rng, p.obstacle_delay_s);

    g.relative.push_back({lock_amp, 0.0});

    double lead = 0.0;
    if (p.hidden_paths > 0) {
        lead = draw(rng, p.hidden_lead_s);
        g.relative.push_back({draw(rng, p.hidden_direct_sigma) * g.noise_sigma, -lead});
        // Scattered weak paths between the hidden direct path and the lock,
        // clear of both pulses.
        const double clearance = 1.5 * p.pulse.width_s;
        const double lo = -lead + 2.0 * clearance;
        const double hi = std::max(lo, -clearance);
        // One path per slot with a random sign so neighbours do not pile up.
        const int scattered = p.hidden_paths - 1;
        for (int i = 0; i < scattered; ++i) {
            const double slot = (hi - lo) / scattered;
            const double t = lo + slot * (i + rng.uniform());
            const double sign = rng.below(2) == 0 ? 1.0 : -1.0;
            g.relative.push_back({sign * draw(rng, p.hidden_scatter_sigma) * g.noise_sigma, t});
        }
    }
    g.true_direct_offset_s = -lead;

    const auto count_lo = static_cast<int>(std::floor(p.reflection_count.min));
    const auto count_hi = static_cast<int>(std::floor(p.reflection_count.max));
    const int count = count_lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(count_hi - count_lo + 1)));
    const double decay = draw(rng, p.decay_s);
    for (int i = 0; i < count; ++i) {
        const double excess = draw(rng, p.reflection_excess_s);
        const double rel_db = draw(rng, p.reflection_rel_db);
        const double amp = lock_amp * std::pow(10.0, rel_db / 20.0) * std::exp(-excess / decay);
        g.relative.push_back({amp, excess});
    }

    g.excess_bias_m = kSpeedOfLight * (lead + obstacle) + draw(rng, p.bias_offset_m);
    return g;
}

SyntheticWaveform realize(const ScenarioPreset& p, const Geometry& g, detail::Rng& rng,
                          const DetectorConfig& detector)
{
    const double shift = rng.uniform(-kTimingJitter_s, kTimingJitter_s);
    MultipathSpec spec;
    spec.pulse = p.pulse;
    spec.noise_sigma = g.noise_sigma;
    spec.duration_s = p.duration_s;
    spec.sample_period_s = p.sample_period_s;
    spec.components.reserve(g.relative.size());
    for (const auto& c : g.relative) {
        const double jitter = 1.0 + rng.uniform(-kAmplitudeJitter, kAmplitudeJitter);
        spec.components.push_back({c.amplitude * jitter, g.lock_delay_s + shift + c.delay_s});
    }
    spec.seed = rng.next();

    const double bias = g.excess_bias_m + rng.uniform(-kBiasJitter_m, kBiasJitter_m);
    return SyntheticWaveform{render_cir(spec, detector), p.propagation_class,
                             g.lock_delay_s + shift + g.true_direct_offset_s, g.lock_delay_s + shift,
                             bias};
}

} // namespace

double PulseSpec::operator()(double t) const noexcept
{
    const double u = t / width_s;
    switch (shape) {
    case PulseShape::gaussian_monocycle: {
        const double a = 2.0 * std::numbers::pi * u * u;
        return (1.0 - 2.0 * a) * std::exp(-a);
    }
    case PulseShape::raised_cosine_envelope:
        return std::abs(u) <= 1.0 ? 0.5 * (1.0 + std::cos(std::numbers::pi * u)) : 0.0;
    }
    return 0.0;
}

double PulseSpec::energy() const noexcept
{
    switch (shape) {
    case PulseShape::gaussian_monocycle: return 3.0 * width_s / 8.0;
    case PulseShape::raised_cosine_envelope: return 3.0 * width_s / 4.0;
    }
    return 0.0;
}

double PulseSpec::support_s() const noexcept
{
    // exp(-2 pi 12^2) is below the smallest subnormal double.
    return shape == PulseShape::gaussian_monocycle ? 12.0 * width_s : width_s;
}

std::size_t MultipathSpec::sample_count() const noexcept
{
    const auto n = ceil_sample_index(duration_s, sample_period_s);
    return n > 0 ? static_cast<std::size_t>(n) : 0;
}

void MultipathSpec::validate() const
{
    if (!(sample_period_s > 0.0) || !std::isfinite(sample_period_s))
        throw Error(Errc::invalid_argument, "sample period must be positive");
    if (!(duration_s > 0.0) || !std::isfinite(duration_s))
        throw Error(Errc::invalid_argument, "duration must be positive");
    if (sample_count() < 2)
        throw Error(Errc::invalid_argument, "duration and sample period yield fewer than 2 samples");
    if (!(pulse.width_s > 0.0) || !std::isfinite(pulse.width_s))
        throw Error(Errc::invalid_argument, "pulse width must be positive");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
        throw Error(Errc::invalid_argument, "noise sigma must be >= 0");
    if (components.empty())
        throw Error(Errc::invalid_argument, "multipath spec needs at least one component");
    for (const auto& c : components) {
        if (!std::isfinite(c.amplitude))
            throw Error(Errc::invalid_argument, "component amplitude must be finite");
        if (!(c.delay_s >= 0.0 && c.delay_s < duration_s))
            throw Error(Errc::invalid_argument, "component delay outside [0, duration)");
    }
}

std::vector<double> render_samples(const MultipathSpec& spec)
{
    spec.validate();
    const std::size_t n = spec.sample_count();
    const double dt = spec.sample_period_s;
    const double support = spec.pulse.support_s();

    std::vector<double> field(n, 0.0);
    for (const auto& c : spec.components) {
        const auto lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((c.delay_s - support) / dt)));
        const auto hi = std::min<std::int64_t>(static_cast<std::int64_t>(n) - 1,
                                               static_cast<std::int64_t>(std::ceil((c.delay_s + support) / dt)));
        for (auto k = lo; k <= hi; ++k)
            field[static_cast<std::size_t>(k)] += c.amplitude * spec.pulse(static_cast<double>(k) * dt - c.delay_s);
    }

    if (spec.noise_sigma > 0.0) {
        // Circular complex noise with E|n|^2 = sigma^2; the pulse sum is real.
        detail::Rng rng(spec.seed);
        const double component_sigma = spec.noise_sigma / std::numbers::sqrt2;
        for (auto& v : field) {
            const double re = v + component_sigma * rng.normal();
            const double im = component_sigma * rng.normal();
            v = std::hypot(re, im);
        }
    } else {
        for (auto& v : field)
            v = std::abs(v);
    }
    return field;
}

Waveform render_cir(const MultipathSpec& spec, const DetectorConfig& detector)
{
    auto samples = render_samples(spec);
    std::size_t fp = 0;
    try {
        fp = detect_first_path(samples, detector.noise_floor_window, detector.k_threshold);
    } catch (const Error& e) {
        if (e.code() != Errc::no_path_detected && e.code() != Errc::invalid_argument)
            throw;
        fp = static_cast<std::size_t>(std::max_element(samples.begin(), samples.end()) - samples.begin());
    }
    return Waveform(std::move(samples), spec.sample_period_s, fp);
}

std::size_t detect_first_path(std::span<const double> samples, std::size_t noise_floor_window,
                              double k_threshold)
{
    if (noise_floor_window < 2 || noise_floor_window >= samples.size())
        throw Error(Errc::invalid_argument, "noise floor window must be >= 2 and shorter than the signal");
    const auto lead = samples.first(noise_floor_window);
    double mean = 0.0;
    for (double v : lead)
        mean += v;
    mean /= static_cast<double>(lead.size());
    double var = 0.0;
    for (double v : lead)
        var += (v - mean) * (v - mean);
    var /= static_cast<double>(lead.size());
    const double threshold = mean + k_threshold * std::max(std::sqrt(var), kStdFloor);

    const auto it = std::find_if(samples.begin(), samples.end(), [&](double v) { return v > threshold; });
    if (it == samples.end())
        throw Error(Errc::no_path_detected, "no path detected");
    return static_cast<std::size_t>(it - samples.begin());
}

void ScenarioPreset::validate() const
{
    if (!(sample_period_s > 0.0) || !(duration_s > sample_period_s))
        throw Error(Errc::invalid_argument, "preset sampling grid is invalid");
    if (!(pulse.width_s > 0.0))
        throw Error(Errc::invalid_argument, "preset pulse width must be positive");
    check_range(noise_sigma, "noise_sigma", 0.0);
    check_range(lock_delay_s, "lock_delay_s", 0.0);
    check_range(lock_amplitude, "lock_amplitude", 0.0);
    check_range(obstacle_delay_s, "obstacle_delay_s", 0.0);
    check_range(reflection_count, "reflection_count", 0.0);
    check_range(reflection_excess_s, "reflection_excess_s", 0.0);
    check_range(reflection_rel_db, "reflection_rel_db", -400.0);
    check_range(decay_s, "decay_s", 0.0);
    check_range(bias_offset_m, "bias_offset_m", -1e3);
    if (!(decay_s.min > 0.0))
        throw Error(Errc::invalid_argument, "decay must be positive");
    if (hidden_paths < 0)
        throw Error(Errc::invalid_argument, "hidden_paths must be >= 0");
    if (hidden_paths > 0) {
        check_range(hidden_lead_s, "hidden_lead_s", 0.0);
        check_range(hidden_direct_sigma, "hidden_direct_sigma", 0.0);
        check_range(hidden_scatter_sigma, "hidden_scatter_sigma", 0.0);
        if (hidden_lead_s.max >= lock_delay_s.min)
            throw Error(Errc::invalid_argument, "hidden lead exceeds the lock delay");
    }
    if (lock_delay_s.max + reflection_excess_s.max + kTimingJitter_s >= duration_s)
        throw Error(Errc::invalid_argument, "components would fall outside the record");
}

ScenarioPreset default_preset(PropagationClass c)
{
    ScenarioPreset p;
    p.propagation_class = c;
    p.noise_sigma = {0.009, 0.011};
    p.lock_delay_s = {38e-9, 40e-9};
    p.reflection_excess_s = {2.5e-9, 60e-9};

    switch (c) {
    case PropagationClass::LOS:
        p.lock_amplitude = {0.6, 1.0};
        p.obstacle_delay_s = {0.0, 0.0};
        p.reflection_count = {4, 8};
        p.reflection_rel_db = {-14.0, -8.0};
        p.decay_s = {6e-9, 12e-9};
        p.bias_offset_m = {-0.03, 0.03};
        break;
    case PropagationClass::DP_NLOS:
        p.lock_amplitude = {0.4, 0.65};
        p.obstacle_delay_s = {0.3e-9, 2.0e-9};
        p.reflection_count = {8, 12};
        p.reflection_rel_db = {-2.0, 3.0};
        p.decay_s = {10e-9, 16e-9};
        p.bias_offset_m = {-0.01, 0.01};
        break;
    case PropagationClass::NDP_NLOS:
        p.lock_amplitude = {0.08, 0.2};
        p.obstacle_delay_s = {0.3e-9, 2.0e-9};
        p.hidden_paths = 10;
        p.hidden_lead_s = {13e-9, 18e-9};
        p.hidden_direct_sigma = {0.8, 1.5};
        p.hidden_scatter_sigma = {1.7, 2.3};
        p.reflection_count = {10, 14};
        p.reflection_rel_db = {-2.0, 2.0};
        p.decay_s = {35e-9, 55e-9};
        p.bias_offset_m = {-0.01, 0.01};
        break;
    }
    return p;
}

std::vector<SyntheticWaveform> sample_scenario(const ScenarioPreset& preset, std::size_t n,
                                               std::uint64_t seed, const DetectorConfig& detector)
{
    if (n == 0)
        throw Error(Errc::invalid_argument, "scenario count must be >= 1");
    preset.validate();
    std::vector<SyntheticWaveform> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        detail::Rng geometry_rng(detail::derive_seed(seed, 2 * i));
        detail::Rng realize_rng(detail::derive_seed(seed, 2 * i + 1));
        const Geometry g = draw_geometry(preset, geometry_rng);
        out.push_back(realize(preset, g, realize_rng, detector));
    }
    return out;
}

SyntheticPairs sample_pairs(const ScenarioPreset& preset, std::size_t pair_count,
                            std::size_t waveforms_per_pair, std::uint64_t seed,
                            const std::string& pair_prefix, const DetectorConfig& detector)
{
    if (pair_count == 0 || waveforms_per_pair == 0)
        throw Error(Errc::invalid_argument, "pair count and waveforms per pair must be >= 1");
    preset.validate();
    SyntheticPairs out;
    out.waveforms.reserve(pair_count * waveforms_per_pair);
    out.pair_ids.reserve(pair_count * waveforms_per_pair);
    for (std::size_t p = 0; p < pair_count; ++p) {
        detail::Rng geometry_rng(detail::derive_seed(seed, 2 * p));
        const Geometry g = draw_geometry(preset, geometry_rng);
        const std::uint64_t pair_seed = detail::derive_seed(seed, 2 * p + 1);
        const std::string id = pair_prefix + std::to_string(p);
        for (std::size_t w = 0; w < waveforms_per_pair; ++w) {
            detail::Rng realize_rng(detail::derive_seed(pair_seed, w));
            out.waveforms.push_back(realize(preset, g, realize_rng, detector));
            out.pair_ids.push_back(id);
        }
    }
    return out;
}

ChannelDiagnostics synthesize_diagnostics(const Waveform& w, const DiagnosticsModel& model)
{
    const double scale = model.accumulator_gain * model.preamble_count;
    const auto s = w.samples();
    double power = 0.0;
    for (double v : s)
        power += v * v;

    ChannelDiagnostics d;
    d.preamble_count = model.preamble_count;
    d.prf_constant_db = model.prf_constant_db;
    d.cir_power = scale * scale * power / 131072.0;
    for (std::size_t i = 0; i < 3; ++i) {
        const std::size_t k = std::min(w.first_path_index() + i, s.size() - 1);
        d.first_path_amps[i] = scale * s[k];
    }
    return d;
}

std::vector<RangingRecord> to_records(const SyntheticPairs& pairs, const DiagnosticsModel& model)
{
    std::vector<RangingRecord> out;
    out.reserve(pairs.waveforms.size());
    for (std::size_t i = 0; i < pairs.waveforms.size(); ++i) {
        const auto& sw = pairs.waveforms[i];
        out.emplace_back(sw.waveform, synthesize_diagnostics(sw.waveform, model), pairs.pair_ids[i], sw.bias_m,
                         sw.label);
    }
    return out;
}

} // namespace uwbnlos

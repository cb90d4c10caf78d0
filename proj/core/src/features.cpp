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

#include "uwbnlos/features.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "uwbnlos/error.hpp"

namespace uwbnlos {

namespace {

constexpr double kTwoPow17 = 131072.0;

std::span<const double> slice(const Waveform& w, const SampleWindow& win)
{
    return w.samples().subspan(win.begin, win.count);
}

double window_energy(const Waveform& w, const SampleWindow& win, IntegrationRule rule)
{
    const auto s = slice(w, win);
    double sum = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k)
        sum += integrate::weight(k, s.size(), rule) * s[k] * s[k];
    return sum * w.sample_period();
}

double require_energy(const Waveform& w, const SampleWindow& win, IntegrationRule rule)
{
    const double e = window_energy(w, win, rule);
    if (!(e > 0.0))
        throw Error(Errc::degenerate_signal, "degenerate signal (zero energy in window)");
    return e;
}

double centroid(const Waveform& w, const SampleWindow& win, IntegrationRule rule, double energy)
{
    const auto s = slice(w, win);
    const double dt = w.sample_period();
    double sum = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k)
        sum += integrate::weight(k, s.size(), rule) * w.time_at(win.begin + k) * s[k] * s[k];
    return sum * dt / energy;
}

} // namespace

std::string_view to_string(IntegrationRule rule) noexcept
{
    return rule == IntegrationRule::left_riemann ? "left_riemann" : "trapezoid";
}

void FeatureConfig::validate() const
{
    if (!(tau_s > 0.0) || !std::isfinite(tau_s))
        throw Error(Errc::invalid_argument, "tau_s must be positive");
    if (!std::isfinite(window_start_s) || !std::isfinite(window_end_s) || !(window_end_s > window_start_s))
        throw Error(Errc::invalid_argument, "analysis window end must exceed its start");
}

std::array<double, kFeatureCount> FeatureVector::to_array() const noexcept
{
    return {rsl_dbm, rfpr_db, energy, mean_excess_delay_s, rms_delay_spread,
            mean_magnitude, variance_magnitude, kurtosis, amplitude, pre_fp_variance};
}

FeatureVector FeatureVector::from_array(const std::array<double, kFeatureCount>& v) noexcept
{
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]};
}

double FeatureVector::at(int feature_number) const
{
    if (feature_number < 1 || feature_number > static_cast<int>(kFeatureCount))
        throw Error(Errc::invalid_argument, "feature number must be in 1..10");
    return to_array()[static_cast<std::size_t>(feature_number - 1)];
}

const std::array<std::string_view, kFeatureCount>& FeatureVector::names() noexcept
{
    static constexpr std::array<std::string_view, kFeatureCount> kNames = {
        "rsl_dbm", "rfpr_db", "energy", "mean_excess_delay_s", "rms_delay_spread",
        "mean_magnitude", "variance_magnitude", "kurtosis", "amplitude", "pre_fp_variance"};
    return kNames;
}

namespace integrate {

double weight(std::size_t k, std::size_t n, IntegrationRule rule) noexcept
{
    if (rule == IntegrationRule::trapezoid && (k == 0 || k + 1 == n))
        return 0.5;
    return 1.0;
}

double span_length(std::size_t n, double dt, IntegrationRule rule) noexcept
{
    if (n == 0)
        return 0.0;
    return rule == IntegrationRule::trapezoid ? static_cast<double>(n - 1) * dt : static_cast<double>(n) * dt;
}

double integral(std::span<const double> f, double dt, IntegrationRule rule)
{
    double sum = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k)
        sum += weight(k, f.size(), rule) * f[k];
    return sum * dt;
}

double mean(std::span<const double> f, double dt, IntegrationRule rule)
{
    const double T = span_length(f.size(), dt, rule);
    if (!(T > 0.0))
        throw Error(Errc::empty_window, "empty window");
    return integral(f, dt, rule) / T;
}

namespace {

double central_moment(std::span<const double> f, double dt, IntegrationRule rule, double mu, int order)
{
    double sum = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double d = f[k] - mu;
        const double d2 = d * d;
        sum += weight(k, f.size(), rule) * (order == 2 ? d2 : d2 * d2);
    }
    return sum * dt / span_length(f.size(), dt, rule);
}

} // namespace

double variance(std::span<const double> f, double dt, IntegrationRule rule)
{
    const double mu = mean(f, dt, rule);
    return central_moment(f, dt, rule, mu, 2);
}

double kurtosis(std::span<const double> f, double dt, IntegrationRule rule)
{
    const double mu = mean(f, dt, rule);
    const double var = central_moment(f, dt, rule, mu, 2);
    const bool constant = std::adjacent_find(f.begin(), f.end(), std::not_equal_to<>()) == f.end();
    if (constant || !(var > 0.0))
        throw Error(Errc::degenerate_signal, "degenerate signal (zero variance)");
    return central_moment(f, dt, rule, mu, 4) / (var * var);
}

} // namespace integrate

SampleWindow analysis_window(const Waveform& w, const FeatureConfig& cfg)
{
    cfg.validate();
    const auto n = static_cast<std::int64_t>(w.size());
    const auto fp = static_cast<std::int64_t>(w.first_path_index());
    const auto lo = std::clamp<std::int64_t>(fp + ceil_sample_index(cfg.window_start_s, w.sample_period()), 0, n);
    const auto hi = std::clamp<std::int64_t>(fp + ceil_sample_index(cfg.window_end_s, w.sample_period()), 0, n);
    const std::int64_t min_count = cfg.rule == IntegrationRule::trapezoid ? 2 : 1;
    if (hi - lo < min_count)
        throw Error(Errc::empty_window, "empty window");
    return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi - lo)};
}

SampleWindow pre_fp_window(const Waveform& w, const FeatureConfig& cfg)
{
    cfg.validate();
    const auto fp = static_cast<std::int64_t>(w.first_path_index());
    const auto lo = std::max<std::int64_t>(0, fp - ceil_sample_index(cfg.tau_s, w.sample_period()));
    return {static_cast<std::size_t>(lo), static_cast<std::size_t>(fp - lo)};
}

double compute_rsl(const ChannelDiagnostics& d)
{
    d.validate();
    if (!(d.cir_power > 0.0))
        throw Error(Errc::invalid_diagnostics, "invalid diagnostics (C must be > 0)");
    const double n = d.preamble_count;
    return 10.0 * std::log10(d.cir_power * kTwoPow17 / (n * n)) - d.prf_constant_db;
}

namespace {

double first_path_power(const ChannelDiagnostics& d)
{
    const auto& f = d.first_path_amps;
    const double p = f[0] * f[0] + f[1] * f[1] + f[2] * f[2];
    if (!(p > 0.0))
        throw Error(Errc::no_first_path_amplitude, "no first path amplitude");
    return p;
}

} // namespace

double compute_fsl(const ChannelDiagnostics& d)
{
    d.validate();
    const double n = d.preamble_count;
    return 10.0 * std::log10(first_path_power(d) / (n * n)) - d.prf_constant_db;
}

double compute_rfpr(const ChannelDiagnostics& d)
{
    d.validate();
    if (!(d.cir_power > 0.0))
        throw Error(Errc::invalid_diagnostics, "invalid diagnostics (C must be > 0)");
    return 10.0 * std::log10(d.cir_power * kTwoPow17 / first_path_power(d));
}

double compute_energy(const Waveform& w, const FeatureConfig& cfg)
{
    return window_energy(w, analysis_window(w, cfg), cfg.rule);
}

double compute_mean_excess_delay(const Waveform& w, const FeatureConfig& cfg)
{
    const auto win = analysis_window(w, cfg);
    return centroid(w, win, cfg.rule, require_energy(w, win, cfg.rule));
}

double compute_rms_delay_spread(const Waveform& w, const FeatureConfig& cfg)
{
    const auto win = analysis_window(w, cfg);
    const double energy = require_energy(w, win, cfg.rule);
    const double tau_med = centroid(w, win, cfg.rule, energy);
    const auto s = slice(w, win);
    double sum = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double d = w.time_at(win.begin + k) - tau_med;
        sum += integrate::weight(k, s.size(), cfg.rule) * d * d * s[k] * s[k];
    }
    return sum * w.sample_period() / energy;
}

double rms_delay_spread_seconds(const Waveform& w, const FeatureConfig& cfg)
{
    return std::sqrt(compute_rms_delay_spread(w, cfg));
}

double compute_mean_magnitude(const Waveform& w, const FeatureConfig& cfg)
{
    return integrate::mean(slice(w, analysis_window(w, cfg)), w.sample_period(), cfg.rule);
}

double compute_variance_magnitude(const Waveform& w, const FeatureConfig& cfg)
{
    return integrate::variance(slice(w, analysis_window(w, cfg)), w.sample_period(), cfg.rule);
}

double compute_kurtosis(const Waveform& w, const FeatureConfig& cfg)
{
    return integrate::kurtosis(slice(w, analysis_window(w, cfg)), w.sample_period(), cfg.rule);
}

double compute_amplitude(const Waveform& w, const FeatureConfig& cfg)
{
    const auto s = slice(w, analysis_window(w, cfg));
    return *std::max_element(s.begin(), s.end());
}

double compute_pre_fp_variance(const Waveform& w, const FeatureConfig& cfg)
{
    const auto win = pre_fp_window(w, cfg);
    if (win.count < 2)
        throw Error(Errc::insufficient_pre_fp_samples, "insufficient pre-FP samples");
    return integrate::variance(slice(w, win), w.sample_period(), cfg.rule);
}

FeatureVector extract_features(const RangingRecord& rec, const FeatureConfig& cfg)
{
    cfg.validate();
    const auto& w = rec.waveform();
    const auto& d = rec.diagnostics();

    auto guarded = [](int index, auto&& fn) {
        try {
            return fn();
        } catch (const Error& e) {
            throw FeatureError(index, e.code(),
                               "feature " + std::to_string(index) + " (" +
                                   std::string(FeatureVector::names()[static_cast<std::size_t>(index - 1)]) +
                                   "): " + e.what());
        }
    };

    FeatureVector fv;
    fv.rsl_dbm = guarded(1, [&] { return compute_rsl(d); });
    fv.rfpr_db = guarded(2, [&] { return compute_rfpr(d); });
    fv.energy = guarded(3, [&] { return compute_energy(w, cfg); });
    fv.mean_excess_delay_s = guarded(4, [&] { return compute_mean_excess_delay(w, cfg); });
    fv.rms_delay_spread = guarded(5, [&] { return compute_rms_delay_spread(w, cfg); });
    fv.mean_magnitude = guarded(6, [&] { return compute_mean_magnitude(w, cfg); });
    fv.variance_magnitude = guarded(7, [&] { return compute_variance_magnitude(w, cfg); });
    fv.kurtosis = guarded(8, [&] { return compute_kurtosis(w, cfg); });
    fv.amplitude = guarded(9, [&] { return compute_amplitude(w, cfg); });
    fv.pre_fp_variance = guarded(10, [&] { return compute_pre_fp_variance(w, cfg); });
    return fv;
}

} // namespace uwbnlos

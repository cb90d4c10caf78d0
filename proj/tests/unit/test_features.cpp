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
#include <uwbnlos/features.hpp>
#include <uwbnlos/synth.hpp>

#include "oracles.hpp"
#include "test_helpers.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace uwbnlos;

namespace {

constexpr double kA = 113.77;

ChannelDiagnostics diag(double C, double N, std::array<double, 3> F, double A = kA)
{
    return {C, N, F, A};
}

FeatureConfig riemann_whole(double dt, std::size_t n, std::size_t fp)
{
    // Window covering the whole record, whatever the first path.
    FeatureConfig c;
    c.rule = IntegrationRule::left_riemann;
    c.window_start_s = -static_cast<double>(fp) * dt;
    c.window_end_s = static_cast<double>(n - fp) * dt;
    return c;
}

} // namespace

TEST(Rsl, UnitRatio)
{
    const double N = 1024;
    EXPECT_NEAR(compute_rsl(diag(N * N / 131072.0, N, {1, 1, 1})), -kA, 1e-12);
    EXPECT_NEAR(compute_rsl(diag(10 * N * N / 131072.0, N, {1, 1, 1})), 10 - kA, 1e-12);
}

TEST(Rsl, ExtendedPrecisionOracle)
{
    const double v = compute_rsl(diag(16000, 128, {1, 1, 1}));
    EXPECT_LE(oracle::rel_diff(v, oracle::rsl(16000, 128, kA)), 1e-12);
}

TEST(Rsl, RejectsZeroPower)
{
    EXPECT_ERRC(compute_rsl(diag(0, 128, {1, 1, 1})), Errc::invalid_diagnostics);
    EXPECT_ERRC(compute_rsl(diag(1, 0, {1, 1, 1})), Errc::invalid_diagnostics);
}

TEST(Fsl, Examples)
{
    EXPECT_NEAR(compute_fsl(diag(1, 128, {128, 0, 0})), -kA, 1e-12);
    const double s = 128.0 / std::sqrt(3.0);
    EXPECT_NEAR(compute_fsl(diag(1, 128, {s, s, s})), -kA, 1e-12);
    const double v = compute_fsl(diag(1, 128, {100, 80, 60}));
    EXPECT_LE(oracle::rel_diff(v, oracle::fsl(100, 80, 60, 128, kA)), 1e-12);
    EXPECT_ERRC(compute_fsl(diag(1, 128, {0, 0, 0})), Errc::no_first_path_amplitude);
}

TEST(Rfpr, Examples)
{
    EXPECT_NEAR(compute_rfpr(diag(20000.0 / 131072.0, 128, {100, 80, 60})), 0.0, 1e-12);
    EXPECT_NEAR(rfpr_from_levels(-62.7, -78.3), 15.6, 1e-12);
    const auto d = diag(16000, 128, {100, 80, 60});
    EXPECT_NEAR(compute_rfpr(d), compute_rsl(d) - compute_fsl(d), 1e-12);
}

TEST(Rfpr, IndependentOfPrfConstant)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(1.0, 1e5);
    for (int i = 0; i < 1000; ++i) {
        auto d = diag(u(rng), 1024, {u(rng), u(rng), u(rng)}, 0.0);
        const double a = compute_rfpr(d);
        d.prf_constant_db = 113.77;
        EXPECT_NEAR(compute_rfpr(d), a, 1e-12 * std::max(1.0, std::abs(a)));
    }
}

TEST(Energy, Examples)
{
    const double dt = 1e-9;
    const Waveform zero(std::vector<double>(50, 0.0), dt, 20);
    EXPECT_EQ(compute_energy(zero, riemann_whole(dt, 50, 20)), 0.0);
    const Waveform flat(std::vector<double>(50, 0.3), dt, 20);
    EXPECT_NEAR(compute_energy(flat, riemann_whole(dt, 50, 20)), 0.09 * 50 * dt, 1e-12 * 0.09 * 50 * dt);
}

TEST(Delay, PointMassAndSymmetricPair)
{
    const double dt = 1e-9;
    std::vector<double> s(40, 0.0);
    s[25] = 2.0;
    const Waveform one(s, dt, 10);
    const auto cfg = riemann_whole(dt, 40, 10);
    EXPECT_NEAR(compute_mean_excess_delay(one, cfg), 25e-9, 1e-21);
    EXPECT_NEAR(compute_rms_delay_spread(one, cfg), 0.0, 1e-30);

    s[25] = 0.0;
    s[18] = 1.5;
    s[30] = 1.5;
    const Waveform two(s, dt, 10);
    EXPECT_NEAR(compute_mean_excess_delay(two, cfg), 24e-9, 1e-21);
    EXPECT_NEAR(compute_rms_delay_spread(two, cfg), 36e-18, 1e-28);
    EXPECT_NEAR(rms_delay_spread_seconds(two, cfg), 6e-9, 1e-18);
}

TEST(Delay, ZeroSignalIsDegenerate)
{
    const Waveform zero(std::vector<double>(50, 0.0), 1e-9, 20);
    EXPECT_ERRC(compute_mean_excess_delay(zero, {}), Errc::degenerate_signal);
}

TEST(Moments, ConstantAndTwoLevel)
{
    const double dt = 1e-9;
    const auto cfg = riemann_whole(dt, 40, 5);
    const Waveform flat(std::vector<double>(40, 0.7), dt, 5);
    EXPECT_NEAR(compute_mean_magnitude(flat, cfg), 0.7, 1e-15);
    EXPECT_NEAR(compute_variance_magnitude(flat, cfg), 0.0, 1e-30);
    EXPECT_ERRC(compute_kurtosis(flat, cfg), Errc::degenerate_signal);

    const Waveform zero(std::vector<double>(40, 0.0), dt, 5);
    EXPECT_EQ(compute_mean_magnitude(zero, cfg), 0.0);

    std::vector<double> two(40);
    for (std::size_t i = 0; i < two.size(); ++i)
        two[i] = i % 2 ? 0.9 : 0.5;
    const Waveform w(two, dt, 5);
    EXPECT_NEAR(compute_mean_magnitude(w, cfg), 0.7, 1e-15);
    EXPECT_NEAR(compute_variance_magnitude(w, cfg), 0.04, 1e-15);
    EXPECT_NEAR(compute_kurtosis(w, cfg), 1.0, 1e-12);
}

TEST(Moments, RawGaussianKurtosisIsThree)
{
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> x(100000);
    for (auto& v : x)
        v = n(rng);
    EXPECT_NEAR(integrate::kurtosis(x, 1e-9, IntegrationRule::left_riemann), 3.0, 0.1);
    EXPECT_NEAR(integrate::kurtosis(x, 1e-9, IntegrationRule::trapezoid), 3.0, 0.1);
}

TEST(Amplitude, Examples)
{
    const double dt = 1e-9;
    const auto cfg = riemann_whole(dt, 30, 3);
    EXPECT_EQ(compute_amplitude(Waveform(std::vector<double>(30, 0.0), dt, 3), cfg), 0.0);
    std::vector<double> s(30, 0.0);
    s[12] = 7.5;
    EXPECT_EQ(compute_amplitude(Waveform(s, dt, 3), cfg), 7.5);
}

TEST(PreFp, Examples)
{
    const double dt = 1e-9;
    std::vector<double> s(60, 0.0);
    for (std::size_t i = 30; i < 60; ++i)
        s[i] = 1.0;
    EXPECT_EQ(compute_pre_fp_variance(Waveform(s, dt, 30), {}), 0.0);
    for (std::size_t i = 0; i < 30; ++i)
        s[i] = 0.4;
    EXPECT_NEAR(compute_pre_fp_variance(Waveform(s, dt, 30), {}), 0.0, 1e-30);
    EXPECT_ERRC(compute_pre_fp_variance(Waveform(s, dt, 1), {}), Errc::insufficient_pre_fp_samples);
}

TEST(PreFp, ClippedSpanIsNormalizedByWhatIsAvailable)
{
    // First path 6 samples in: only 6 of the 20 pre-FP samples exist.
    const double dt = 1e-9;
    std::vector<double> s = {0.1, 0.3, 0.1, 0.3, 0.1, 0.3, 1, 1, 1, 1};
    const Waveform w(s, dt, 6);
    FeatureConfig cfg;
    cfg.rule = IntegrationRule::left_riemann;
    EXPECT_NEAR(compute_pre_fp_variance(w, cfg), 0.01, 1e-15);
}

TEST(Windows, AnalysisWindowClipsToRecord)
{
    const Waveform w(std::vector<double>(100, 1.0), 1e-9, 10);
    const auto win = analysis_window(w, {});
    EXPECT_EQ(win.begin, 0u);
    EXPECT_EQ(win.count, 100u);
    const Waveform v(std::vector<double>(300, 1.0), 1e-9, 50);
    const auto win2 = analysis_window(v, {});
    EXPECT_EQ(win2.begin, 30u);
    EXPECT_EQ(win2.count, 120u);
    const auto pre = pre_fp_window(v, {});
    EXPECT_EQ(pre.begin, 30u);
    EXPECT_EQ(pre.count, 20u);
}

TEST(Oracle, RandomWaveformsBothRules)
{
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const auto w = oracle::random_waveform(rng);
        const std::vector<double> r(w.samples().begin(), w.samples().end());
        for (auto rule : {IntegrationRule::left_riemann, IntegrationRule::trapezoid}) {
            FeatureConfig cfg;
            cfg.rule = rule;
            const bool trap = rule == IntegrationRule::trapezoid;
            const double dt = w.sample_period();
            const auto aw = oracle::analysis_window(r.size(), w.first_path_index(), dt, cfg.window_start_s,
                                                    cfg.window_end_s);
            const auto pw = oracle::pre_fp_window(w.first_path_index(), dt, cfg.tau_s);
            ASSERT_GE(pw.hi - pw.lo, 2);

            EXPECT_LE(oracle::rel_diff(compute_energy(w, cfg), oracle::energy(r, dt, aw, trap)), 1e-12);
            EXPECT_LE(oracle::rel_diff(compute_mean_excess_delay(w, cfg), oracle::mean_excess_delay(r, dt, aw, trap)),
                      1e-12);
            EXPECT_LE(oracle::rel_diff(compute_rms_delay_spread(w, cfg), oracle::rms_delay_spread(r, dt, aw, trap)),
                      1e-12);
            EXPECT_LE(oracle::rel_diff(compute_mean_magnitude(w, cfg), oracle::mean(r, dt, aw, trap)), 1e-12);
            EXPECT_LE(oracle::rel_diff(compute_variance_magnitude(w, cfg), oracle::variance(r, dt, aw, trap)), 1e-12);
            EXPECT_LE(oracle::rel_diff(compute_kurtosis(w, cfg), oracle::kurtosis(r, dt, aw, trap)), 1e-12);
            EXPECT_EQ(compute_amplitude(w, cfg), oracle::amplitude(r, aw));
            EXPECT_LE(oracle::rel_diff(compute_pre_fp_variance(w, cfg), oracle::variance(r, dt, pw, trap)), 1e-12);
        }
    }
}

TEST(Extract, LosRecordHasSmallRfpr)
{
    auto pairs = sample_pairs(default_preset(PropagationClass::LOS), 1, 20, 5, "p");
    const auto recs = to_records(pairs);
    for (const auto& r : recs) {
        const auto fv = extract_features(r);
        EXPECT_LT(fv.rfpr_db, 6.0);
        EXPECT_GE(fv.energy, 0.0);
        EXPECT_GE(fv.variance_magnitude, 0.0);
        EXPECT_GE(fv.pre_fp_variance, 0.0);
        const auto win = analysis_window(r.waveform(), {});
        EXPECT_GE(fv.mean_excess_delay_s, r.waveform().time_at(win.begin));
        EXPECT_LE(fv.mean_excess_delay_s, r.waveform().time_at(win.begin + win.count - 1));
        for (double v : fv.to_array())
            EXPECT_TRUE(std::isfinite(v));
        EXPECT_EQ(extract_features(r), fv);
    }
}

TEST(Extract, MissingPreFpSamplesNameFeatureTen)
{
    std::vector<double> s(200, 0.0);
    s[0] = 1.0;
    s[5] = 0.5;
    const RangingRecord rec(Waveform(s, 1e-9, 0), diag(16000, 128, {100, 80, 60}), "p");
    try {
        extract_features(rec);
        FAIL() << "expected a feature error";
    } catch (const FeatureError& e) {
        EXPECT_EQ(e.feature_index(), 10);
        EXPECT_EQ(e.code(), Errc::insufficient_pre_fp_samples);
    }
}

TEST(FeatureVector, ArrayRoundTripAndIndexing)
{
    std::array<double, kFeatureCount> a{};
    for (std::size_t i = 0; i < a.size(); ++i)
        a[i] = static_cast<double>(i + 1) * 1.5;
    const auto fv = FeatureVector::from_array(a);
    EXPECT_EQ(fv.to_array(), a);
    EXPECT_EQ(fv.at(1), 1.5);
    EXPECT_EQ(fv.at(10), 15.0);
    EXPECT_ERRC(fv.at(0), Errc::invalid_argument);
    EXPECT_ERRC(fv.at(11), Errc::invalid_argument);
}

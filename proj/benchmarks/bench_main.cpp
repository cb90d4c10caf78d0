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
// Micro benchmarks for rendering, feature extraction and SVM training.

#include <uwbnlos/features.hpp>
#include <uwbnlos/pipeline.hpp>
#include <uwbnlos/svm.hpp>
#include <uwbnlos/synth.hpp>

#include <benchmark/benchmark.h>

using namespace uwbnlos;

namespace {

std::vector<RangingRecord> records(PropagationClass c, std::size_t n, std::uint64_t seed)
{
    return to_records(sample_pairs(default_preset(c), 1, n, seed, "b-"));
}

void BM_SampleScenario(benchmark::State& state)
{
    const auto preset = default_preset(static_cast<PropagationClass>(state.range(0)));
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(sample_scenario(preset, 1, seed++));
}
BENCHMARK(BM_SampleScenario)->Arg(0)->Arg(1)->Arg(2);

void BM_ExtractFeatures(benchmark::State& state)
{
    const auto recs = records(PropagationClass::NDP_NLOS, 64, 3);
    const FeatureConfig cfg;
    std::size_t i = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(extract_features(recs[i++ % recs.size()], cfg));
}
BENCHMARK(BM_ExtractFeatures);

void BM_TrainRbf(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<RangingRecord> recs = records(PropagationClass::LOS, n / 2, 11);
    const auto nlos = records(PropagationClass::DP_NLOS, n - n / 2, 12);
    recs.insert(recs.end(), nlos.begin(), nlos.end());
    const auto samples = label_records(recs);
    FeatureRows raw;
    std::vector<int> y;
    for (const auto& s : samples) {
        raw.push_back(select_features(s.features.to_array(), kDefaultStep1Features));
        y.push_back(s.label == PropagationClass::LOS ? -1 : 1);
    }
    const auto z = fit_standardizer(raw);
    FeatureRows x;
    for (const auto& r : raw)
        x.push_back(z.apply(r));
    for (auto _ : state)
        benchmark::DoNotOptimize(train(x, y, KernelSpec{}, TrainConfig{}));
}
BENCHMARK(BM_TrainRbf)->RangeMultiplier(2)->Range(100, 1600)->Unit(benchmark::kMillisecond);

void BM_ClassifyTwoStep(benchmark::State& state)
{
    std::vector<RangingRecord> recs;
    for (auto c : kAllClasses) {
        const auto r = to_records(sample_pairs(default_preset(c), 4, 40, 20 + class_index(c),
                                               std::string(to_string(c)) + "-"));
        recs.insert(recs.end(), r.begin(), r.end());
    }
    const auto samples = label_records(recs);
    const auto clf = train_two_step(samples, kDefaultStep1Features, kDefaultStep2Features, KernelSpec{}, TrainConfig{});
    std::size_t i = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(classify(clf, samples[i++ % samples.size()].features));
}
BENCHMARK(BM_ClassifyTwoStep);

} // namespace

BENCHMARK_MAIN();

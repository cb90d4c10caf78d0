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
#include <uwbnlos/pipeline.hpp>
#include <uwbnlos/synth.hpp>

#include "test_helpers.hpp"

#include <set>
#include <string>
#include <vector>

using namespace uwbnlos;

namespace {

// score = slope * x[feature] + bias, with an identity standardizer.
SvmModel affine(int feature, double slope, double bias)
{
    SvmModel m;
    m.kernel = {KernelKind::linear, std::nullopt};
    m.standardizer = Standardizer::identity(1);
    m.feature_indices = {feature};
    m.support_vectors = {{1.0}};
    m.dual_coefs = {slope};
    m.support_indices = {0};
    m.bias = bias;
    return m;
}

FeatureVector fv12(double f1, double f2)
{
    FeatureVector v;
    v.rsl_dbm = f1;
    v.rfpr_db = f2;
    return v;
}

std::vector<LabeledSample> synthetic_samples(std::size_t pairs_per_class, std::size_t per_pair, std::uint64_t seed,
                                             bool with_ndp = true)
{
    std::vector<RangingRecord> recs;
    for (auto c : kAllClasses) {
        if (!with_ndp && c == PropagationClass::NDP_NLOS)
            continue;
        const auto p = sample_pairs(default_preset(c), pairs_per_class, per_pair, seed + class_index(c),
                                    std::string(to_string(c)) + "-");
        const auto r = to_records(p);
        recs.insert(recs.end(), r.begin(), r.end());
    }
    return label_records(recs);
}

} // namespace

TEST(Labeling, Examples)
{
    EXPECT_EQ(label_from_bias(0.02), PropagationClass::LOS);
    EXPECT_EQ(label_from_bias(0.30), PropagationClass::DP_NLOS);
    EXPECT_EQ(label_from_bias(2.0), PropagationClass::NDP_NLOS);
    EXPECT_EQ(label_from_bias(0.05), PropagationClass::DP_NLOS);
    EXPECT_EQ(label_from_bias(0.70), PropagationClass::DP_NLOS);
    EXPECT_EQ(label_from_bias(std::nextafter(0.70, 1.0)), PropagationClass::NDP_NLOS);
    EXPECT_EQ(label_from_bias(-0.049), PropagationClass::LOS);
    EXPECT_EQ(label_from_bias(-0.05), PropagationClass::LOS);
    EXPECT_ERRC(label_from_bias(-0.06), Errc::implausible_bias);
    EXPECT_ERRC(label_from_bias(std::nan("")), Errc::invalid_argument);
}

TEST(Labeling, ThresholdsValidate)
{
    LabelingThresholds th{0.8, 0.7};
    EXPECT_ERRC(th.validate(), Errc::invalid_argument);
}

TEST(Labeling, ExplicitLabelWins)
{
    const Waveform w({0.0, 1.0}, 1e-9, 1);
    const ChannelDiagnostics d{1.0, 1024.0, {1.0, 1.0, 1.0}, 121.74};
    EXPECT_EQ(resolve_label(RangingRecord(w, d, "p", 3.0, PropagationClass::LOS)), PropagationClass::LOS);
    EXPECT_EQ(resolve_label(RangingRecord(w, d, "p", 3.0)), PropagationClass::NDP_NLOS);
    EXPECT_ERRC(resolve_label(RangingRecord(w, d, "p")), Errc::invalid_argument);
}

TEST(Split, FiftySevenPairs)
{
    std::vector<std::string> ids;
    std::vector<PropagationClass> labels;
    for (int p = 0; p < 57; ++p)
        for (int k = 0; k < 3; ++k) {
            ids.push_back("pair" + std::to_string(p));
            labels.push_back(kAllClasses[static_cast<std::size_t>(p % 3)]);
        }
    const auto s = split_by_pair(ids, labels, 24, 1);
    EXPECT_EQ(s.train_pairs.size(), 24u);
    EXPECT_EQ(s.test_pairs.size(), 33u);
    EXPECT_EQ(s.train.size() + s.test.size(), ids.size());
    std::set<std::string> tr(s.train_pairs.begin(), s.train_pairs.end());
    for (const auto& p : s.test_pairs)
        EXPECT_FALSE(tr.count(p));
    std::array<int, 3> per_class{};
    for (auto i : s.train)
        ++per_class[class_index(labels[i])];
    for (int c : per_class)
        EXPECT_EQ(c, 24);  // 8 pairs of 3 samples per class
}

TEST(Split, Preconditions)
{
    const std::vector<std::string> ids = {"a", "b", "c"};
    const std::vector<PropagationClass> labels = {PropagationClass::LOS, PropagationClass::DP_NLOS,
                                                  PropagationClass::NDP_NLOS};
    EXPECT_ERRC(split_by_pair(ids, labels, 0, 1), Errc::invalid_argument);
    EXPECT_ERRC(split_by_pair(ids, labels, 3, 1), Errc::invalid_argument);
    EXPECT_ERRC(split_by_pair(ids, labels, 2, 1), Errc::split_lacks_class);
}

TEST(Split, DeterministicPerSeed)
{
    std::vector<std::string> ids;
    std::vector<PropagationClass> labels;
    for (int p = 0; p < 30; ++p) {
        ids.push_back("p" + std::to_string(p));
        labels.push_back(kAllClasses[static_cast<std::size_t>(p % 3)]);
    }
    const auto a = split_by_pair(ids, labels, 12, 5);
    const auto b = split_by_pair(ids, labels, 12, 5);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.test_pairs, b.test_pairs);
}

TEST(TwoStep, Defaults)
{
    EXPECT_EQ(kDefaultStep1Features, (std::vector<int>{2, 4, 5}));
    EXPECT_EQ(kDefaultStep2Features, (std::vector<int>{3, 4, 10}));
}

TEST(TwoStep, TrainsOnSyntheticData)
{
    const auto samples = synthetic_samples(2, 50, 100);
    ASSERT_EQ(samples.size(), 300u);
    const auto clf = train_two_step(samples, kDefaultStep1Features, kDefaultStep2Features, KernelSpec{}, TrainConfig{});
    int correct = 0;
    for (const auto& s : samples) {
        const bool nlos = s.label != PropagationClass::LOS;
        const auto p = classify_detailed(clf, s.features);
        correct += (p.step1_score >= 0.0) == nlos;
    }
    EXPECT_GE(correct, 285);
}

TEST(TwoStep, MissingNdpFailsInStepTwo)
{
    const auto samples = synthetic_samples(2, 10, 3, false);
    EXPECT_ERRC(train_two_step(samples, kDefaultStep1Features, kDefaultStep2Features, KernelSpec{}, TrainConfig{}),
                Errc::degenerate_labels);
}

TEST(TwoStep, Workflow)
{
    TwoStepClassifier c;
    c.step1 = affine(1, 1.0, 0.0);
    c.step2 = affine(2, 1.0, 0.0);

    auto los = classify_detailed(c, fv12(-0.5, 123.0));
    EXPECT_EQ(los.label, PropagationClass::LOS);
    EXPECT_FALSE(los.step2_score.has_value());

    EXPECT_EQ(classify(c, fv12(0.5, -0.5)), PropagationClass::DP_NLOS);
    EXPECT_EQ(classify(c, fv12(0.5, 0.5)), PropagationClass::NDP_NLOS);
    EXPECT_EQ(classify(c, fv12(0.0, 0.0)), PropagationClass::NDP_NLOS);
    EXPECT_EQ(classify(c, fv12(0.0, -1e-300)), PropagationClass::DP_NLOS);
}

TEST(Bundle, RoundTrip)
{
    const auto samples = synthetic_samples(2, 20, 7);
    auto clf = train_two_step(samples, kDefaultStep1Features, kDefaultStep2Features, KernelSpec{}, TrainConfig{});
    clf.feature_config.rule = IntegrationRule::left_riemann;
    clf.thresholds.dp_max_bias_m = 0.8;
    const auto text = save_bundle(clf);
    const auto back = load_bundle(text);
    EXPECT_EQ(save_bundle(back), text);
    EXPECT_EQ(back.feature_config.rule, IntegrationRule::left_riemann);
    EXPECT_EQ(back.thresholds.dp_max_bias_m, 0.8);
    for (const auto& s : samples)
        EXPECT_EQ(classify(clf, s.features), classify(back, s.features));
    EXPECT_ERRC(load_bundle(text.substr(0, 40)), Errc::parse_error);
}

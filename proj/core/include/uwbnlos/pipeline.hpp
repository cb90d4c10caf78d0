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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uwbnlos/cir.hpp"
#include "uwbnlos/features.hpp"
#include "uwbnlos/svm.hpp"

namespace uwbnlos {

// Bias below los_max is LOS, up to and including dp_max is DP-NLOS, above
// is NDP-NLOS.
struct LabelingThresholds {
    double los_max_bias_m = 0.05;
    double dp_max_bias_m = 0.70;

    void validate() const;
};

// Negative biases down to -los_max count as LOS; anything lower throws
// Errc::implausible_bias.
PropagationClass label_from_bias(double bias_m, const LabelingThresholds& th = {});

// Explicit label when present, otherwise label_from_bias; throws
// Errc::invalid_argument when the record carries neither.
PropagationClass resolve_label(const RangingRecord& rec, const LabelingThresholds& th = {});

struct LabeledSample {
    FeatureVector features;
    PropagationClass label;
    std::string pair_id;
};

std::vector<LabeledSample> label_records(std::span<const RangingRecord> records, const FeatureConfig& cfg = {},
                                         const LabelingThresholds& th = {});

struct PairSplit {
    std::vector<std::size_t> train;  // indices into the input
    std::vector<std::size_t> test;
    std::vector<std::string> train_pairs;  // sorted
    std::vector<std::string> test_pairs;   // sorted
};

// Assigns whole pairs to one side. Pairs are grouped by their majority
// class and train slots are allocated per class proportionally (largest
// remainder) with at least one pair per class on each side, then filled
// from a seeded shuffle of each group.
//
// Throws Errc::invalid_argument unless 0 < train_pair_count < distinct
// pairs and Errc::split_lacks_class when either side would miss a class.
PairSplit split_by_pair(std::span<const std::string> pair_ids, std::span<const PropagationClass> labels,
                        std::size_t train_pair_count, std::uint64_t seed);
PairSplit split_by_pair(std::span<const LabeledSample> samples, std::size_t train_pair_count, std::uint64_t seed);

inline const std::vector<int> kDefaultStep1Features = {2, 4, 5};
inline const std::vector<int> kDefaultStep2Features = {3, 4, 10};

// Step 1 separates LOS (-1) from NLOS (+1); step 2 separates DP-NLOS (-1)
// from NDP-NLOS (+1). Feature subsets live in each model's feature_indices.
struct TwoStepClassifier {
    SvmModel step1;
    SvmModel step2;
    FeatureConfig feature_config;
    LabelingThresholds thresholds;

    const std::vector<int>& step1_features() const noexcept { return step1.feature_indices; }
    const std::vector<int>& step2_features() const noexcept { return step2.feature_indices; }
};

// Step 2 is trained on ground-truth NLOS samples only.
TwoStepClassifier train_two_step(std::span<const LabeledSample> train, std::span<const int> step1_features,
                                 std::span<const int> step2_features, const KernelSpec& kernel,
                                 const TrainConfig& cfg);

struct Classification {
    PropagationClass label;
    double step1_score;
    std::optional<double> step2_score;  // unset when step 1 says LOS
};

Classification classify_detailed(const TwoStepClassifier& c, const FeatureVector& fv);
PropagationClass classify(const TwoStepClassifier& c, const FeatureVector& fv);

inline constexpr int kBundleFormatVersion = 1;

std::string save_bundle(const TwoStepClassifier& c);
// Throws Errc::parse_error or Errc::unsupported_version.
TwoStepClassifier load_bundle(std::string_view text);

} // namespace uwbnlos

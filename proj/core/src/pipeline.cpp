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

#include "uwbnlos/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "json_io.hpp"
#include "random.hpp"
#include "uwbnlos/error.hpp"

namespace uwbnlos {

namespace {

FeatureRows to_rows(std::span<const LabeledSample> samples)
{
    FeatureRows rows;
    rows.reserve(samples.size());
    for (const auto& s : samples) {
        const auto a = s.features.to_array();
        rows.emplace_back(a.begin(), a.end());
    }
    return rows;
}

void check_subset(std::span<const int> subset, const char* which)
{
    if (subset.empty())
        throw Error(Errc::invalid_argument, std::string(which) + " feature set must be non-empty");
    for (int i : subset)
        if (i < 1 || i > static_cast<int>(kFeatureCount))
            throw Error(Errc::invalid_argument, std::string(which) + " feature indices must be within 1..10");
}

} // namespace

void LabelingThresholds::validate() const
{
    if (!(los_max_bias_m > 0.0 && los_max_bias_m < dp_max_bias_m) || !std::isfinite(dp_max_bias_m))
        throw Error(Errc::invalid_argument, "labeling thresholds must satisfy 0 < los_max < dp_max");
}

PropagationClass label_from_bias(double bias_m, const LabelingThresholds& th)
{
    th.validate();
    if (!std::isfinite(bias_m))
        throw Error(Errc::invalid_argument, "bias must be finite");
    if (bias_m < -th.los_max_bias_m)
        throw Error(Errc::implausible_bias, "implausible bias " + std::to_string(bias_m) + " m");
    if (bias_m < th.los_max_bias_m)
        return PropagationClass::LOS;
    if (bias_m <= th.dp_max_bias_m)
        return PropagationClass::DP_NLOS;
    return PropagationClass::NDP_NLOS;
}

PropagationClass resolve_label(const RangingRecord& rec, const LabelingThresholds& th)
{
    if (rec.label())
        return *rec.label();
    if (rec.bias_m())
        return label_from_bias(*rec.bias_m(), th);
    throw Error(Errc::invalid_argument, "record for pair '" + rec.pair_id() + "' has neither label nor bias");
}

std::vector<LabeledSample> label_records(std::span<const RangingRecord> records, const FeatureConfig& cfg,
                                         const LabelingThresholds& th)
{
    std::vector<LabeledSample> out;
    out.reserve(records.size());
    for (const auto& r : records)
        out.push_back({extract_features(r, cfg), resolve_label(r, th), r.pair_id()});
    return out;
}

PairSplit split_by_pair(std::span<const std::string> pair_ids, std::span<const PropagationClass> labels,
                        std::size_t train_pair_count, std::uint64_t seed)
{
    if (pair_ids.size() != labels.size())
        throw Error(Errc::invalid_argument, "pair ids and labels differ in length");

    std::map<std::string, std::array<std::size_t, 3>> votes;
    for (std::size_t i = 0; i < pair_ids.size(); ++i)
        ++votes[pair_ids[i]][class_index(labels[i])];
    const std::size_t total_pairs = votes.size();
    if (train_pair_count == 0 || train_pair_count >= total_pairs)
        throw Error(Errc::invalid_argument, "train pair count must be in 1.." + std::to_string(total_pairs - 1) +
                                                " (have " + std::to_string(total_pairs) + " pairs)");

    std::array<std::vector<std::string>, 3> groups;
    for (const auto& [id, v] : votes) {
        const auto majority = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
        groups[majority].push_back(id);
    }
    detail::Rng rng(seed);
    for (auto& g : groups)
        rng.shuffle(g.begin(), g.end());

    // Proportional allocation by largest remainder.
    std::array<std::size_t, 3> quota{};
    std::array<double, 3> remainder{};
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < 3; ++c) {
        const double exact = static_cast<double>(train_pair_count) * static_cast<double>(groups[c].size()) /
                             static_cast<double>(total_pairs);
        quota[c] = static_cast<std::size_t>(std::floor(exact));
        remainder[c] = exact - std::floor(exact);
        assigned += quota[c];
    }
    while (assigned < train_pair_count) {
        std::size_t best = 3;
        for (std::size_t c = 0; c < 3; ++c)
            if (quota[c] < groups[c].size() && (best == 3 || remainder[c] > remainder[best]))
                best = c;
        ++quota[best];
        remainder[best] = -1.0;
        ++assigned;
    }
    // Keep at least one pair of every class on each side where possible.
    for (int round = 0; round < 6; ++round) {
        for (std::size_t c = 0; c < 3; ++c) {
            const std::size_t n = groups[c].size();
            if (n < 2)
                continue;
            if (quota[c] == 0 || quota[c] == n) {
                const bool need_more = quota[c] == 0;
                std::size_t donor = 3;
                for (std::size_t d = 0; d < 3; ++d) {
                    if (d == c)
                        continue;
                    const bool ok = need_more ? quota[d] > 1 : quota[d] + 1 < groups[d].size();
                    if (ok && (donor == 3 || (need_more ? quota[d] > quota[donor] : groups[d].size() - quota[d] >
                                                                                      groups[donor].size() - quota[donor])))
                        donor = d;
                }
                if (donor == 3)
                    continue;
                if (need_more) {
                    ++quota[c];
                    --quota[donor];
                } else {
                    --quota[c];
                    ++quota[donor];
                }
            }
        }
    }

    PairSplit split;
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t k = 0; k < groups[c].size(); ++k)
            (k < quota[c] ? split.train_pairs : split.test_pairs).push_back(groups[c][k]);
    }
    std::sort(split.train_pairs.begin(), split.train_pairs.end());
    std::sort(split.test_pairs.begin(), split.test_pairs.end());

    std::array<bool, 3> train_has{}, test_has{};
    for (std::size_t i = 0; i < pair_ids.size(); ++i) {
        const bool in_train = std::binary_search(split.train_pairs.begin(), split.train_pairs.end(), pair_ids[i]);
        (in_train ? split.train : split.test).push_back(i);
        (in_train ? train_has : test_has)[class_index(labels[i])] = true;
    }
    for (auto c : kAllClasses) {
        for (int side = 0; side < 2; ++side) {
            if (!(side == 0 ? train_has : test_has)[class_index(c)])
                throw Error(Errc::split_lacks_class,
                            std::string("split lacks class ") + std::string(to_string(c)) + " on the " +
                                (side == 0 ? "train" : "test") +
                                " side; provide at least two pairs per class or change the train pair count");
        }
    }
    return split;
}

PairSplit split_by_pair(std::span<const LabeledSample> samples, std::size_t train_pair_count, std::uint64_t seed)
{
    std::vector<std::string> ids;
    std::vector<PropagationClass> labels;
    ids.reserve(samples.size());
    labels.reserve(samples.size());
    for (const auto& s : samples) {
        ids.push_back(s.pair_id);
        labels.push_back(s.label);
    }
    return split_by_pair(ids, labels, train_pair_count, seed);
}

TwoStepClassifier train_two_step(std::span<const LabeledSample> train, std::span<const int> step1_features,
                                 std::span<const int> step2_features, const KernelSpec& kernel,
                                 const TrainConfig& cfg)
{
    check_subset(step1_features, "step 1");
    check_subset(step2_features, "step 2");

    const FeatureRows rows = to_rows(train);
    std::vector<int> y1;
    y1.reserve(train.size());
    FeatureRows nlos_rows;
    std::vector<int> y2;
    for (std::size_t i = 0; i < train.size(); ++i) {
        const auto c = train[i].label;
        y1.push_back(c == PropagationClass::LOS ? -1 : 1);
        if (c != PropagationClass::LOS) {
            nlos_rows.push_back(rows[i]);
            y2.push_back(c == PropagationClass::DP_NLOS ? -1 : 1);
        }
    }

    TwoStepClassifier c;
    c.step1 = fit(rows, y1, step1_features, kernel, cfg);
    if (nlos_rows.empty())
        throw Error(Errc::degenerate_labels, "degenerate labels (no NLOS samples for step 2)");
    c.step2 = fit(nlos_rows, y2, step2_features, kernel, cfg);
    return c;
}

Classification classify_detailed(const TwoStepClassifier& c, const FeatureVector& fv)
{
    const auto a = fv.to_array();
    const auto s1 = predict(c.step1, a);
    if (s1.label < 0)
        return {PropagationClass::LOS, s1.score, std::nullopt};
    const auto s2 = predict(c.step2, a);
    return {s2.label < 0 ? PropagationClass::DP_NLOS : PropagationClass::NDP_NLOS, s1.score, s2.score};
}

PropagationClass classify(const TwoStepClassifier& c, const FeatureVector& fv)
{
    return classify_detailed(c, fv).label;
}

std::string save_bundle(const TwoStepClassifier& c)
{
    const nlohmann::json j = {
        {"format", "uwbnlos-bundle"},
        {"version", kBundleFormatVersion},
        {"thresholds", {{"los_max_bias_m", c.thresholds.los_max_bias_m}, {"dp_max_bias_m", c.thresholds.dp_max_bias_m}}},
        {"feature_config",
         {{"tau_s", c.feature_config.tau_s},
          {"window_start_s", c.feature_config.window_start_s},
          {"window_end_s", c.feature_config.window_end_s},
          {"integration_rule", to_string(c.feature_config.rule)}}},
        {"step1_features", c.step1.feature_indices},
        {"step2_features", c.step2.feature_indices},
        {"step1", detail::model_to_json(c.step1)},
        {"step2", detail::model_to_json(c.step2)},
    };
    return j.dump(1) + "\n";
}

TwoStepClassifier load_bundle(std::string_view text)
{
    const auto j = detail::json_guard("bundle", [&] { return nlohmann::json::parse(text); });
    return detail::json_guard("bundle", [&] {
        if (!j.is_object() || j.value("format", std::string{}) != "uwbnlos-bundle")
            throw Error(Errc::parse_error, "not an uwbnlos classifier bundle");
        const int version = j.at("version").get<int>();
        if (version != kBundleFormatVersion)
            throw Error(Errc::unsupported_version, "unsupported bundle version " + std::to_string(version));

        TwoStepClassifier c;
        c.thresholds.los_max_bias_m = j.at("thresholds").at("los_max_bias_m").get<double>();
        c.thresholds.dp_max_bias_m = j.at("thresholds").at("dp_max_bias_m").get<double>();
        c.thresholds.validate();
        const auto& fc = j.at("feature_config");
        c.feature_config.tau_s = fc.at("tau_s").get<double>();
        c.feature_config.window_start_s = fc.at("window_start_s").get<double>();
        c.feature_config.window_end_s = fc.at("window_end_s").get<double>();
        const auto rule = fc.at("integration_rule").get<std::string>();
        if (rule == "trapezoid")
            c.feature_config.rule = IntegrationRule::trapezoid;
        else if (rule == "left_riemann")
            c.feature_config.rule = IntegrationRule::left_riemann;
        else
            throw Error(Errc::parse_error, "unknown integration rule '" + rule + "'");
        c.feature_config.validate();
        c.step1 = detail::model_from_json(j.at("step1"));
        c.step2 = detail::model_from_json(j.at("step2"));
        if (j.at("step1_features").get<std::vector<int>>() != c.step1.feature_indices ||
            j.at("step2_features").get<std::vector<int>>() != c.step2.feature_indices)
            throw Error(Errc::parse_error, "feature manifest does not match the embedded models");
        check_subset(c.step1.feature_indices, "step 1");
        check_subset(c.step2.feature_indices, "step 2");
        return c;
    });
}

} // namespace uwbnlos

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
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uwbnlos/pipeline.hpp"

namespace uwbnlos {

enum class EvalMode { step1, step2_true_nlos, step2_predicted_nlos, full_3class };

std::string_view to_string(EvalMode mode) noexcept;
std::optional<EvalMode> parse_eval_mode(std::string_view text) noexcept;

// Success rate of a class is correct / total over its samples in the
// evaluated population; a class with no samples has no rate.
struct SuccessRates {
    EvalMode mode = EvalMode::step1;
    std::optional<double> p_los;
    std::optional<double> p_nlos;
    std::optional<double> p_dp;
    std::optional<double> p_ndp;
    // Mean of the two rates of the binary step (both must be present).
    std::optional<double> p_avg;

    // Rows are true classes, columns predicted classes (LOS, DP, NDP). Only
    // filled in full_3class mode.
    std::array<std::array<std::size_t, 3>, 3> confusion{};
    std::array<std::optional<double>, 3> per_class{};
    // Macro average of per_class over the classes present (full_3class).
    std::optional<double> macro_3class;

    std::size_t population = 0;
    // step2_predicted_nlos: true-LOS samples that step 1 routed to step 2.
    std::size_t excluded = 0;
};

SuccessRates evaluate(const TwoStepClassifier& c, std::span<const LabeledSample> test, EvalMode mode);

// Single binary model as step 1 or step 2. For step 2, a router selects the
// population (samples the router labels NLOS); without one the population
// is the ground-truth NLOS samples.
SuccessRates evaluate_step(const SvmModel& model, int step, std::span<const LabeledSample> test,
                           const SvmModel* router = nullptr);

std::string format_rates(const SuccessRates& r);
std::string rates_json(const SuccessRates& r);

// ---------------------------------------------------------------------------
// Feature-subset sweeps

struct SweepEntry {
    int step = 1;
    std::vector<int> subset;
};

struct SweepSpec {
    std::vector<SweepEntry> entries;
    KernelSpec kernel;
    TrainConfig train;
    std::size_t train_pairs = 0;
    std::uint64_t seed = 0;
    bool step2_predicted = true;
    std::vector<int> routing_features = kDefaultStep1Features;

    void validate() const;
};

// Line-oriented text:
//   # comment
//   seed = 7
//   kernel = rbf | linear
//   C = 1
//   gamma = auto | <value>
//   tol = 0.001
//   max_passes = 100
//   train_pairs = 12
//   step2_population = predicted | true
//   routing = 2,4,5
//   step1: 2,4,5
//   step2: 3,4,10
// Throws Errc::parse_error with the offending line number.
SweepSpec parse_sweep_spec(std::string_view text);

struct SweepRow {
    SweepEntry entry;
    std::uint64_t row_seed = 0;
    std::optional<SuccessRates> rates;
    std::string error;  // set when the row failed
};

// Training seed of a row; depends only on the global seed and the row's
// step and subset.
std::uint64_t sweep_row_seed(std::uint64_t global_seed, const SweepEntry& entry) noexcept;

std::vector<SweepRow> sweep(const SweepSpec& spec, std::span<const LabeledSample> data);

std::string format_sweep_table(std::span<const SweepRow> rows);
std::string sweep_json(std::span<const SweepRow> rows);

// ---------------------------------------------------------------------------
// Histograms

// Bins are half-open [lo, hi) except the last, which is closed. Values
// outside [lo, hi] are not counted.
struct Histogram {
    std::vector<double> edges;  // bins + 1
    std::vector<std::size_t> counts;
};

// Throws Errc::invalid_argument on empty input, bin_count == 0,
// non-finite values or an empty range.
Histogram make_histogram(std::span<const double> values, std::size_t bin_count, double lo, double hi);
// Range spans the data.
Histogram make_histogram(std::span<const double> values, std::size_t bin_count);

std::string format_histogram(const Histogram& h);

struct Summary {
    double mean;
    double median;
};
Summary summarize(std::span<const double> values);

} // namespace uwbnlos

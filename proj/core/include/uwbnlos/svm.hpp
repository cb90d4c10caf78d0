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

namespace uwbnlos {

using FeatureRows = std::vector<std::vector<double>>;

enum class KernelKind { linear, rbf };

std::string_view to_string(KernelKind kind) noexcept;

// K(a, b) = a.b (linear) or exp(-gamma |a - b|^2) (rbf). An unset gamma is
// resolved to 1 / (number of features) at training time.
struct KernelSpec {
    KernelKind kind = KernelKind::rbf;
    std::optional<double> gamma;

    void validate() const;
    KernelSpec resolved(std::size_t feature_count) const;
    double operator()(std::span<const double> a, std::span<const double> b) const;

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

// Per-feature z-scoring with population statistics.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stddev;

    std::size_t size() const noexcept { return mean.size(); }
    std::vector<double> apply(std::span<const double> row) const;
    static Standardizer identity(std::size_t features);

    friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

// Throws Errc::invalid_argument for fewer than two rows or ragged input and
// Errc::zero_variance_feature naming the 0-based column otherwise.
Standardizer fit_standardizer(const FeatureRows& rows);

struct TrainConfig {
    double C = 1.0;
    double tol = 1e-3;
    // Training gives up after this many passes (n iterations each) that
    // leave the dual objective unchanged.
    std::size_t max_passes = 100;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SvmModel {
    KernelSpec kernel;
    Standardizer standardizer;
    // 1-based positions of the consumed features within a raw input row.
    std::vector<int> feature_indices;
    FeatureRows support_vectors;  // standardized
    std::vector<double> dual_coefs;  // alpha_i * y_i
    std::vector<std::size_t> support_indices;  // into the training rows
    double bias = 0.0;
    double C = 1.0;
    bool converged = false;
    std::size_t iterations = 0;
    double dual_objective = 0.0;

    friend bool operator==(const SvmModel&, const SvmModel&) = default;
};

struct Prediction {
    int label;     // +1 or -1; a score of exactly 0 maps to +1
    double score;
};

// Soft-margin dual solved with pairwise (SMO) updates, picking the working
// pair by maximal violation with second-order gain. Rows are used as given
// (identity standardizer, feature_indices 1..d). Labels must be +1/-1.
//
// Throws Errc::degenerate_labels when only one class is present. When the
// iteration budget runs out the model is returned with converged = false.
SvmModel train(const FeatureRows& rows, std::span<const int> labels, const KernelSpec& kernel,
               const TrainConfig& cfg);

// Selects feature_indices from raw rows, fits a standardizer on them and
// trains on the standardized values.
SvmModel fit(const FeatureRows& raw_rows, std::span<const int> labels, std::span<const int> feature_indices,
             const KernelSpec& kernel, const TrainConfig& cfg);

// Score on an already standardized feature row.
double decision_value(const SvmModel& model, std::span<const double> standardized);

// Throws Errc::missing_features when the row is shorter than the largest
// feature index.
Prediction predict(const SvmModel& model, std::span<const double> raw_row);

std::vector<double> select_features(std::span<const double> raw_row, std::span<const int> feature_indices);

// Largest violation of the soft-margin KKT conditions over the training
// set, measured on y_i f(x_i):
//   alpha = 0      -> y f >= 1
//   0 < alpha < C  -> y f == 1
//   alpha = C      -> y f <= 1
// rows must be the rows passed to train() (standardized space).
double max_kkt_violation(const SvmModel& model, const FeatureRows& rows, std::span<const int> labels);

// sum alpha - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij, from the stored
// support set.
double dual_objective(const SvmModel& model);

inline constexpr int kModelFormatVersion = 1;

std::string save_model(const SvmModel& model);
// Throws Errc::parse_error or Errc::unsupported_version.
SvmModel load_model(std::string_view text);

} // namespace uwbnlos

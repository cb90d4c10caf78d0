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
// Randomized invariance checks. Each runs `cases` independent draws and
// reports how many violated the property.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace props {

struct Result {
    std::string name;
    int cases = 0;
    int failures = 0;
    std::string first_failure;

    bool ok() const { return cases > 0 && failures == 0; }
};

Result scale_covariance(std::uint64_t seed, int cases);
Result time_shift_covariance(std::uint64_t seed, int cases);
Result rfpr_ignores_prf_constant(std::uint64_t seed, int cases);
Result svm_zero_score_is_positive(std::uint64_t seed, int cases);
Result pipeline_routing_and_ties(std::uint64_t seed, int cases);
Result labeling_partition_and_monotonicity(std::uint64_t seed, int cases);
Result split_has_no_leakage(std::uint64_t seed, int cases);
Result histogram_permutation_invariance(std::uint64_t seed, int cases);
Result dataset_round_trip(std::uint64_t seed, int cases);

std::vector<Result> all(std::uint64_t seed, int cases);

} // namespace props

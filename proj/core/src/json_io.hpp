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

// JSON mapping shared by the model and bundle serializers.

#include <nlohmann/json.hpp>

#include "uwbnlos/error.hpp"
#include "uwbnlos/svm.hpp"

namespace uwbnlos::detail {

nlohmann::json model_to_json(const SvmModel& model);
SvmModel model_from_json(const nlohmann::json& j);

// Wraps nlohmann exceptions into Errc::parse_error.
template <class Fn>
auto json_guard(const char* what, Fn&& fn)
{
    try {
        return fn();
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::parse_error, std::string(what) + ": " + e.what());
    }
}

} // namespace uwbnlos::detail

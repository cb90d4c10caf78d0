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

#include "uwbnlos/error.hpp"

namespace uwbnlos {

std::string_view to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::empty_window: return "empty_window";
    case Errc::no_path_detected: return "no_path_detected";
    case Errc::invalid_diagnostics: return "invalid_diagnostics";
    case Errc::no_first_path_amplitude: return "no_first_path_amplitude";
    case Errc::degenerate_signal: return "degenerate_signal";
    case Errc::insufficient_pre_fp_samples: return "insufficient_pre_fp_samples";
    case Errc::zero_variance_feature: return "zero_variance_feature";
    case Errc::degenerate_labels: return "degenerate_labels";
    case Errc::missing_features: return "missing_features";
    case Errc::parse_error: return "parse_error";
    case Errc::unsupported_version: return "unsupported_version";
    case Errc::implausible_bias: return "implausible_bias";
    case Errc::split_lacks_class: return "split_lacks_class";
    case Errc::io_error: return "io_error";
    }
    return "unknown";
}

} // namespace uwbnlos

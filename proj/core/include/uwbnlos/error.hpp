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

#include <stdexcept>
#include <string>
#include <string_view>

namespace uwbnlos {

// Machine-readable error category. The CLI prints to_string(code) as the
// first token of its one-line error message.
enum class Errc {
    invalid_argument,
    empty_window,
    no_path_detected,
    invalid_diagnostics,
    no_first_path_amplitude,
    degenerate_signal,
    insufficient_pre_fp_samples,
    zero_variance_feature,
    degenerate_labels,
    missing_features,
    parse_error,
    unsupported_version,
    implausible_bias,
    split_lacks_class,
    io_error,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

// Raised by extract_features; carries the 1-based feature number whose
// computation failed, wrapping the underlying error code.
class FeatureError : public Error {
public:
    FeatureError(int feature_index, Errc code, const std::string& message)
        : Error(code, message), feature_index_(feature_index) {}

    int feature_index() const noexcept { return feature_index_; }

private:
    int feature_index_;
};

// Raised by the dataset reader in strict mode; line numbers are 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message)
        : Error(Errc::parse_error, message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace uwbnlos

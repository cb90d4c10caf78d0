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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uwbnlos/cir.hpp"

namespace uwbnlos {

// Canonical dataset: one JSON object per line with keys
//   samples, sample_period_s, first_path_index, C, N, F, A_db, pair_id,
//   bias_m (optional), label (optional: "LOS" | "DP_NLOS" | "NDP_NLOS").

enum class ReadMode { strict, lenient };

struct LineIssue {
    std::size_t line;
    std::string message;
};

struct DatasetReadResult {
    std::vector<RangingRecord> records;
    std::size_t skipped = 0;
    std::vector<LineIssue> issues;
};

// Throws ParseError (with the line number) on the first bad line.
RangingRecord parse_record_line(std::string_view line, std::size_t line_number = 0);
std::string format_record_line(const RangingRecord& rec);

// Strict mode throws ParseError on the first malformed line; lenient mode
// skips it and records the issue. Blank lines are ignored.
DatasetReadResult read_dataset(std::istream& in, ReadMode mode = ReadMode::strict);
DatasetReadResult read_dataset(const std::filesystem::path& path, ReadMode mode = ReadMode::strict);

void write_dataset(std::span<const RangingRecord> records, const std::filesystem::path& path);
std::string format_dataset(std::span<const RangingRecord> records);

// Writes to a sibling temporary file and renames it into place.
// Throws Errc::io_error.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

} // namespace uwbnlos

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

#include "uwbnlos/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <unistd.h>

#include "uwbnlos/error.hpp"

namespace uwbnlos {

namespace {

using ojson = nlohmann::ordered_json;

[[noreturn]] void fail(std::size_t line, const std::string& msg)
{
    throw ParseError(line, "line " + std::to_string(line) + ": " + msg);
}

const nlohmann::json& require(const nlohmann::json& j, const char* key, std::size_t line)
{
    const auto it = j.find(key);
    if (it == j.end())
        fail(line, std::string("missing key '") + key + "'");
    return *it;
}

double finite_number(const nlohmann::json& v, const char* key, std::size_t line)
{
    if (!v.is_number())
        fail(line, std::string("key '") + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x))
        fail(line, std::string("key '") + key + "' must be finite");
    return x;
}

} // namespace

RangingRecord parse_record_line(std::string_view text, std::size_t line)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(line, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object())
        fail(line, "record must be a JSON object");

    const auto& samples_j = require(j, "samples", line);
    if (!samples_j.is_array())
        fail(line, "key 'samples' must be an array");
    std::vector<double> samples;
    samples.reserve(samples_j.size());
    for (const auto& v : samples_j)
        samples.push_back(finite_number(v, "samples", line));

    const double period = finite_number(require(j, "sample_period_s", line), "sample_period_s", line);
    const auto& fp_j = require(j, "first_path_index", line);
    if (!fp_j.is_number_unsigned() && !(fp_j.is_number_integer() && fp_j.get<std::int64_t>() >= 0))
        fail(line, "key 'first_path_index' must be a non-negative integer");
    const auto fp = fp_j.get<std::size_t>();

    ChannelDiagnostics d;
    d.cir_power = finite_number(require(j, "C", line), "C", line);
    d.preamble_count = finite_number(require(j, "N", line), "N", line);
    d.prf_constant_db = finite_number(require(j, "A_db", line), "A_db", line);
    const auto& f_j = require(j, "F", line);
    if (!f_j.is_array() || f_j.size() != 3)
        fail(line, "key 'F' must be an array of 3 numbers");
    for (std::size_t i = 0; i < 3; ++i)
        d.first_path_amps[i] = finite_number(f_j[i], "F", line);

    const auto& pair_j = require(j, "pair_id", line);
    if (!pair_j.is_string())
        fail(line, "key 'pair_id' must be a string");

    std::optional<double> bias;
    if (const auto it = j.find("bias_m"); it != j.end() && !it->is_null())
        bias = finite_number(*it, "bias_m", line);

    std::optional<PropagationClass> label;
    if (const auto it = j.find("label"); it != j.end() && !it->is_null()) {
        if (!it->is_string())
            fail(line, "key 'label' must be a string");
        label = parse_propagation_class(it->get<std::string>());
        if (!label)
            fail(line, "bad label '" + it->get<std::string>() + "' (expected LOS, DP_NLOS or NDP_NLOS)");
    }

    try {
        return RangingRecord(Waveform(std::move(samples), period, fp), d, pair_j.get<std::string>(), bias, label);
    } catch (const Error& e) {
        fail(line, e.what());
    }
}

std::string format_record_line(const RangingRecord& rec)
{
    const auto& w = rec.waveform();
    const auto& d = rec.diagnostics();
    ojson j;
    j["samples"] = std::vector<double>(w.samples().begin(), w.samples().end());
    j["sample_period_s"] = w.sample_period();
    j["first_path_index"] = w.first_path_index();
    j["C"] = d.cir_power;
    j["N"] = d.preamble_count;
    j["F"] = d.first_path_amps;
    j["A_db"] = d.prf_constant_db;
    j["pair_id"] = rec.pair_id();
    if (rec.bias_m())
        j["bias_m"] = *rec.bias_m();
    if (rec.label())
        j["label"] = std::string(to_string(*rec.label()));
    return j.dump();
}

DatasetReadResult read_dataset(std::istream& in, ReadMode mode)
{
    DatasetReadResult out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            out.records.push_back(parse_record_line(line, number));
        } catch (const ParseError& e) {
            if (mode == ReadMode::strict)
                throw;
            ++out.skipped;
            out.issues.push_back({number, e.what()});
        }
    }
    return out;
}

DatasetReadResult read_dataset(const std::filesystem::path& path, ReadMode mode)
{
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::io_error, "cannot open " + path.string());
    return read_dataset(in, mode);
}

std::string format_dataset(std::span<const RangingRecord> records)
{
    std::string out;
    for (const auto& r : records) {
        out += format_record_line(r);
        out += '\n';
    }
    return out;
}

void write_dataset(std::span<const RangingRecord> records, const std::filesystem::path& path)
{
    write_file_atomic(path, format_dataset(records));
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content)
{
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(Errc::io_error, "cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw Error(Errc::io_error, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(Errc::io_error, "cannot move output into place at " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::io_error, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace uwbnlos

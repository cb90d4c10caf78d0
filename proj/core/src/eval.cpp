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

#include "uwbnlos/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "random.hpp"
#include "uwbnlos/error.hpp"

namespace uwbnlos {

namespace {

using ojson = nlohmann::ordered_json;

struct BinaryCounts {
    std::size_t neg_total = 0;
    std::size_t neg_correct = 0;
    std::size_t pos_total = 0;
    std::size_t pos_correct = 0;

    void add(bool truth_positive, bool predicted_positive)
    {
        if (truth_positive) {
            ++pos_total;
            pos_correct += predicted_positive ? 1 : 0;
        } else {
            ++neg_total;
            neg_correct += predicted_positive ? 0 : 1;
        }
    }
};

std::optional<double> ratio(std::size_t num, std::size_t den)
{
    if (den == 0)
        return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

std::optional<double> average(const std::optional<double>& a, const std::optional<double>& b)
{
    if (!a || !b)
        return std::nullopt;
    return (*a + *b) / 2.0;
}

void fill_step1(SuccessRates& r, const BinaryCounts& c)
{
    r.p_los = ratio(c.neg_correct, c.neg_total);
    r.p_nlos = ratio(c.pos_correct, c.pos_total);
    r.p_avg = average(r.p_los, r.p_nlos);
    r.population = c.neg_total + c.pos_total;
}

void fill_step2(SuccessRates& r, const BinaryCounts& c)
{
    r.p_dp = ratio(c.neg_correct, c.neg_total);
    r.p_ndp = ratio(c.pos_correct, c.pos_total);
    r.p_avg = average(r.p_dp, r.p_ndp);
    r.population = c.neg_total + c.pos_total;
}

std::string fmt_rate(const std::optional<double>& v)
{
    if (!v)
        return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return buf;
}

ojson rate_json(const std::optional<double>& v)
{
    return v ? ojson(*v) : ojson(nullptr);
}

std::string join(std::span<const int> xs)
{
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i)
            s += ',';
        s += std::to_string(xs[i]);
    }
    return s;
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void spec_fail(std::size_t line, const std::string& msg)
{
    throw ParseError(line, "sweep spec line " + std::to_string(line) + ": " + msg);
}

std::vector<int> parse_subset(const std::string& text, std::size_t line)
{
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        int v = 0;
        const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || p != tok.data() + tok.size())
            spec_fail(line, "bad feature index '" + tok + "'");
        if (v < 1 || v > static_cast<int>(kFeatureCount))
            spec_fail(line, "feature index " + tok + " outside 1..10");
        out.push_back(v);
    }
    if (out.empty())
        spec_fail(line, "empty feature subset");
    return out;
}

double parse_double(const std::string& text, std::size_t line)
{
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size())
            spec_fail(line, "bad number '" + text + "'");
        return v;
    } catch (const std::logic_error&) {
        spec_fail(line, "bad number '" + text + "'");
    }
}

std::uint64_t parse_u64(const std::string& text, std::size_t line)
{
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size())
        spec_fail(line, "bad integer '" + text + "'");
    return v;
}

} // namespace

std::string_view to_string(EvalMode mode) noexcept
{
    switch (mode) {
    case EvalMode::step1: return "step1";
    case EvalMode::step2_true_nlos: return "step2_true_nlos";
    case EvalMode::step2_predicted_nlos: return "step2_predicted_nlos";
    case EvalMode::full_3class: return "full_3class";
    }
    return "?";
}

std::optional<EvalMode> parse_eval_mode(std::string_view text) noexcept
{
    for (auto m : {EvalMode::step1, EvalMode::step2_true_nlos, EvalMode::step2_predicted_nlos, EvalMode::full_3class})
        if (to_string(m) == text)
            return m;
    return std::nullopt;
}

SuccessRates evaluate(const TwoStepClassifier& c, std::span<const LabeledSample> test, EvalMode mode)
{
    SuccessRates r;
    r.mode = mode;
    BinaryCounts counts;
    switch (mode) {
    case EvalMode::step1:
        for (const auto& s : test) {
            const auto p = predict(c.step1, s.features.to_array());
            counts.add(s.label != PropagationClass::LOS, p.label > 0);
        }
        fill_step1(r, counts);
        break;
    case EvalMode::step2_true_nlos:
        for (const auto& s : test) {
            if (s.label == PropagationClass::LOS)
                continue;
            const auto p = predict(c.step2, s.features.to_array());
            counts.add(s.label == PropagationClass::NDP_NLOS, p.label > 0);
        }
        fill_step2(r, counts);
        break;
    case EvalMode::step2_predicted_nlos:
        for (const auto& s : test) {
            const auto a = s.features.to_array();
            if (predict(c.step1, a).label < 0)
                continue;
            if (s.label == PropagationClass::LOS) {
                ++r.excluded;
                continue;
            }
            counts.add(s.label == PropagationClass::NDP_NLOS, predict(c.step2, a).label > 0);
        }
        fill_step2(r, counts);
        break;
    case EvalMode::full_3class: {
        for (const auto& s : test) {
            const auto predicted = classify(c, s.features);
            ++r.confusion[class_index(s.label)][class_index(predicted)];
        }
        double sum = 0.0;
        int present = 0;
        for (std::size_t t = 0; t < 3; ++t) {
            std::size_t row = 0;
            for (std::size_t p = 0; p < 3; ++p)
                row += r.confusion[t][p];
            r.per_class[t] = ratio(r.confusion[t][t], row);
            if (r.per_class[t]) {
                sum += *r.per_class[t];
                ++present;
            }
            r.population += row;
        }
        if (present > 0)
            r.macro_3class = sum / present;
        break;
    }
    }
    return r;
}

SuccessRates evaluate_step(const SvmModel& model, int step, std::span<const LabeledSample> test,
                           const SvmModel* router)
{
    if (step != 1 && step != 2)
        throw Error(Errc::invalid_argument, "step must be 1 or 2");
    SuccessRates r;
    BinaryCounts counts;
    if (step == 1) {
        r.mode = EvalMode::step1;
        for (const auto& s : test)
            counts.add(s.label != PropagationClass::LOS, predict(model, s.features.to_array()).label > 0);
        fill_step1(r, counts);
        return r;
    }
    r.mode = router ? EvalMode::step2_predicted_nlos : EvalMode::step2_true_nlos;
    for (const auto& s : test) {
        const auto a = s.features.to_array();
        if (router && predict(*router, a).label < 0)
            continue;
        if (s.label == PropagationClass::LOS) {
            if (router)
                ++r.excluded;
            continue;
        }
        counts.add(s.label == PropagationClass::NDP_NLOS, predict(model, a).label > 0);
    }
    fill_step2(r, counts);
    return r;
}

std::string format_rates(const SuccessRates& r)
{
    std::ostringstream out;
    out << "mode        " << to_string(r.mode) << '\n';
    out << "population  " << r.population << '\n';
    switch (r.mode) {
    case EvalMode::step1:
        out << "P_LOS       " << fmt_rate(r.p_los) << '\n';
        out << "P_NLOS      " << fmt_rate(r.p_nlos) << '\n';
        out << "P_avg       " << fmt_rate(r.p_avg) << '\n';
        break;
    case EvalMode::step2_predicted_nlos:
        out << "excluded    " << r.excluded << " (true LOS routed to step 2)\n";
        [[fallthrough]];
    case EvalMode::step2_true_nlos:
        out << "P_DP        " << fmt_rate(r.p_dp) << '\n';
        out << "P_NDP       " << fmt_rate(r.p_ndp) << '\n';
        out << "P_avg       " << fmt_rate(r.p_avg) << '\n';
        break;
    case EvalMode::full_3class:
        out << "confusion (rows: true, cols: predicted)\n";
        out << "            LOS       DP_NLOS   NDP_NLOS\n";
        for (auto t : kAllClasses) {
            char buf[96];
            const auto& row = r.confusion[class_index(t)];
            std::snprintf(buf, sizeof buf, "%-10s  %-8zu  %-8zu  %-8zu\n", std::string(to_string(t)).c_str(), row[0],
                          row[1], row[2]);
            out << buf;
        }
        out << "P_LOS       " << fmt_rate(r.per_class[0]) << '\n';
        out << "P_DP_NLOS   " << fmt_rate(r.per_class[1]) << '\n';
        out << "P_NDP_NLOS  " << fmt_rate(r.per_class[2]) << '\n';
        out << "macro_3class " << fmt_rate(r.macro_3class) << " (3-class macro average)\n";
        break;
    }
    return out.str();
}

std::string rates_json(const SuccessRates& r)
{
    ojson j;
    j["mode"] = std::string(to_string(r.mode));
    j["population"] = r.population;
    j["excluded"] = r.excluded;
    j["p_los"] = rate_json(r.p_los);
    j["p_nlos"] = rate_json(r.p_nlos);
    j["p_dp"] = rate_json(r.p_dp);
    j["p_ndp"] = rate_json(r.p_ndp);
    j["p_avg"] = rate_json(r.p_avg);
    if (r.mode == EvalMode::full_3class) {
        j["confusion"] = r.confusion;
        j["per_class"] = {rate_json(r.per_class[0]), rate_json(r.per_class[1]), rate_json(r.per_class[2])};
        j["macro_3class"] = rate_json(r.macro_3class);
    }
    return j.dump(1) + "\n";
}

void SweepSpec::validate() const
{
    if (entries.empty())
        throw Error(Errc::invalid_argument, "sweep spec lists no subsets");
    for (const auto& e : entries) {
        if (e.step != 1 && e.step != 2)
            throw Error(Errc::invalid_argument, "sweep step must be 1 or 2");
        if (e.subset.empty())
            throw Error(Errc::invalid_argument, "sweep subsets must be non-empty");
        for (int i : e.subset)
            if (i < 1 || i > static_cast<int>(kFeatureCount))
                throw Error(Errc::invalid_argument, "sweep feature indices must be within 1..10");
    }
    if (train_pairs == 0)
        throw Error(Errc::invalid_argument, "sweep needs train_pairs > 0");
    kernel.validate();
    train.validate();
}

SweepSpec parse_sweep_spec(std::string_view text)
{
    SweepSpec spec;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (const auto hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        const std::string s = trim(raw);
        if (s.empty())
            continue;

        if (const auto colon = s.find(':'); colon != std::string::npos && s.find('=') == std::string::npos) {
            const std::string key = trim(s.substr(0, colon));
            SweepEntry e;
            if (key == "step1")
                e.step = 1;
            else if (key == "step2")
                e.step = 2;
            else
                spec_fail(line, "unknown row kind '" + key + "'");
            e.subset = parse_subset(trim(s.substr(colon + 1)), line);
            spec.entries.push_back(std::move(e));
            continue;
        }

        const auto eq = s.find('=');
        if (eq == std::string::npos)
            spec_fail(line, "expected 'key = value' or 'stepN: subset'");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key == "seed") {
            spec.seed = parse_u64(value, line);
        } else if (key == "kernel") {
            if (value == "rbf")
                spec.kernel.kind = KernelKind::rbf;
            else if (value == "linear")
                spec.kernel.kind = KernelKind::linear;
            else
                spec_fail(line, "unknown kernel '" + value + "'");
        } else if (key == "gamma") {
            if (value == "auto")
                spec.kernel.gamma.reset();
            else
                spec.kernel.gamma = parse_double(value, line);
        } else if (key == "C") {
            spec.train.C = parse_double(value, line);
        } else if (key == "tol") {
            spec.train.tol = parse_double(value, line);
        } else if (key == "max_passes") {
            spec.train.max_passes = static_cast<std::size_t>(parse_u64(value, line));
        } else if (key == "train_pairs") {
            spec.train_pairs = static_cast<std::size_t>(parse_u64(value, line));
        } else if (key == "step2_population") {
            if (value == "predicted")
                spec.step2_predicted = true;
            else if (value == "true")
                spec.step2_predicted = false;
            else
                spec_fail(line, "step2_population must be 'predicted' or 'true'");
        } else if (key == "routing") {
            spec.routing_features = parse_subset(value, line);
        } else {
            spec_fail(line, "unknown key '" + key + "'");
        }
    }
    try {
        spec.validate();
    } catch (const Error& e) {
        throw Error(Errc::parse_error, std::string("sweep spec: ") + e.what());
    }
    return spec;
}

std::uint64_t sweep_row_seed(std::uint64_t global_seed, const SweepEntry& entry) noexcept
{
    // FNV-1a over the step and the subset.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xFF;
            h *= 0x100000001b3ULL;
        }
    };
    mix(static_cast<std::uint64_t>(entry.step));
    for (int i : entry.subset)
        mix(static_cast<std::uint64_t>(i));
    return detail::derive_seed(global_seed, h);
}

std::vector<SweepRow> sweep(const SweepSpec& spec, std::span<const LabeledSample> data)
{
    spec.validate();
    const PairSplit split = split_by_pair(data, spec.train_pairs, spec.seed);

    std::vector<LabeledSample> train, test;
    for (auto i : split.train)
        train.push_back(data[i]);
    for (auto i : split.test)
        test.push_back(data[i]);

    FeatureRows rows, nlos_rows;
    std::vector<int> y1, y2;
    for (const auto& s : train) {
        const auto a = s.features.to_array();
        rows.emplace_back(a.begin(), a.end());
        y1.push_back(s.label == PropagationClass::LOS ? -1 : 1);
        if (s.label != PropagationClass::LOS) {
            nlos_rows.emplace_back(a.begin(), a.end());
            y2.push_back(s.label == PropagationClass::DP_NLOS ? -1 : 1);
        }
    }

    std::optional<SvmModel> router;
    std::string router_error;
    auto get_router = [&]() -> const SvmModel* {
        if (!spec.step2_predicted)
            return nullptr;
        if (!router && router_error.empty()) {
            TrainConfig cfg = spec.train;
            cfg.seed = sweep_row_seed(spec.seed, SweepEntry{1, spec.routing_features});
            try {
                router = fit(rows, y1, spec.routing_features, spec.kernel, cfg);
            } catch (const Error& e) {
                router_error = std::string("routing model: ") + e.what();
            }
        }
        if (!router)
            throw Error(Errc::invalid_argument, router_error);
        return &*router;
    };

    std::vector<SweepRow> out;
    out.reserve(spec.entries.size());
    for (const auto& e : spec.entries) {
        SweepRow row;
        row.entry = e;
        row.row_seed = sweep_row_seed(spec.seed, e);
        try {
            TrainConfig cfg = spec.train;
            cfg.seed = row.row_seed;
            if (e.step == 1) {
                const auto model = fit(rows, y1, e.subset, spec.kernel, cfg);
                row.rates = evaluate_step(model, 1, test);
            } else {
                const auto model = fit(nlos_rows, y2, e.subset, spec.kernel, cfg);
                row.rates = evaluate_step(model, 2, test, get_router());
            }
        } catch (const Error& err) {
            row.error = std::string(to_string(err.code())) + ": " + err.what();
        }
        out.push_back(std::move(row));
    }
    return out;
}

std::string format_sweep_table(std::span<const SweepRow> rows)
{
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-4s  %-22s  %-7s  %-7s  %-7s  %-7s  %-7s\n", "step", "features", "P_LOS", "P_NLOS",
                  "P_DP", "P_NDP", "P_avg");
    out << buf;
    for (const auto& r : rows) {
        const std::string features = join(r.entry.subset);
        if (!r.rates) {
            std::snprintf(buf, sizeof buf, "%-4d  %-22s  failed: %s\n", r.entry.step, features.c_str(), r.error.c_str());
            out << buf;
            continue;
        }
        const auto& x = *r.rates;
        std::snprintf(buf, sizeof buf, "%-4d  %-22s  %-7s  %-7s  %-7s  %-7s  %-7s\n", r.entry.step, features.c_str(),
                      fmt_rate(x.p_los).c_str(), fmt_rate(x.p_nlos).c_str(), fmt_rate(x.p_dp).c_str(),
                      fmt_rate(x.p_ndp).c_str(), fmt_rate(x.p_avg).c_str());
        out << buf;
    }
    return out.str();
}

std::string sweep_json(std::span<const SweepRow> rows)
{
    ojson arr = ojson::array();
    for (const auto& r : rows) {
        ojson j;
        j["step"] = r.entry.step;
        j["features"] = r.entry.subset;
        j["row_seed"] = r.row_seed;
        if (r.rates) {
            j["status"] = "ok";
            j["mode"] = std::string(to_string(r.rates->mode));
            j["population"] = r.rates->population;
            j["excluded"] = r.rates->excluded;
            j["p_los"] = rate_json(r.rates->p_los);
            j["p_nlos"] = rate_json(r.rates->p_nlos);
            j["p_dp"] = rate_json(r.rates->p_dp);
            j["p_ndp"] = rate_json(r.rates->p_ndp);
            j["p_avg"] = rate_json(r.rates->p_avg);
        } else {
            j["status"] = "failed";
            j["error"] = r.error;
        }
        arr.push_back(std::move(j));
    }
    return ojson{{"rows", arr}}.dump(1) + "\n";
}

Histogram make_histogram(std::span<const double> values, std::size_t bin_count, double lo, double hi)
{
    if (values.empty())
        throw Error(Errc::invalid_argument, "histogram input is empty");
    if (bin_count == 0)
        throw Error(Errc::invalid_argument, "histogram needs at least one bin");
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo))
        throw Error(Errc::invalid_argument, "histogram range must satisfy lo < hi");

    Histogram h;
    h.edges.resize(bin_count + 1);
    const double width = (hi - lo) / static_cast<double>(bin_count);
    for (std::size_t i = 0; i <= bin_count; ++i)
        h.edges[i] = lo + width * static_cast<double>(i);
    h.edges.back() = hi;
    h.counts.assign(bin_count, 0);

    for (double v : values) {
        if (!std::isfinite(v))
            throw Error(Errc::invalid_argument, "histogram values must be finite");
        if (v < lo || v > hi)
            continue;
        auto idx = static_cast<std::size_t>(std::min<double>(std::floor((v - lo) / width), static_cast<double>(bin_count - 1)));
        while (idx + 1 < bin_count && v >= h.edges[idx + 1])
            ++idx;
        while (idx > 0 && v < h.edges[idx])
            --idx;
        ++h.counts[idx];
    }
    return h;
}

Histogram make_histogram(std::span<const double> values, std::size_t bin_count)
{
    if (values.empty())
        throw Error(Errc::invalid_argument, "histogram input is empty");
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    double lo = *mn, hi = *mx;
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    return make_histogram(values, bin_count, lo, hi);
}

std::string format_histogram(const Histogram& h)
{
    std::ostringstream out;
    out << "bin_lo\tbin_hi\tcount\n";
    char buf[128];
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g\t%.17g\t%zu\n", h.edges[i], h.edges[i + 1], h.counts[i]);
        out << buf;
    }
    return out.str();
}

Summary summarize(std::span<const double> values)
{
    if (values.empty())
        throw Error(Errc::invalid_argument, "cannot summarize an empty sequence");
    std::vector<double> v(values.begin(), values.end());
    double sum = 0.0;
    for (double x : v)
        sum += x;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    const double median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    return {sum / static_cast<double>(n), median};
}

} // namespace uwbnlos

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
// Command-line front end: synth, split, featurize, train, classify,
// evaluate, sweep, histogram.

#include <uwbnlos/cir.hpp>
#include <uwbnlos/dataset.hpp>
#include <uwbnlos/error.hpp>
#include <uwbnlos/eval.hpp>
#include <uwbnlos/features.hpp>
#include <uwbnlos/pipeline.hpp>
#include <uwbnlos/svm.hpp>
#include <uwbnlos/synth.hpp>

#include "CLI11.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace uwbnlos;

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<int> parse_subset(const std::string& text)
{
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != tok.size())
            throw Error(Errc::invalid_argument, "bad feature index '" + tok + "' in '" + text + "'");
        out.push_back(v);
    }
    if (out.empty())
        throw Error(Errc::invalid_argument, "empty feature list");
    return out;
}

// Writes to the file when given, stdout otherwise.
void emit(const std::string& path, const std::string& content)
{
    if (path.empty())
        std::cout << content;
    else
        write_file_atomic(path, content);
}

struct FeatureFlags {
    double tau_ns = 20.0;
    double window_start_ns = -20.0;
    double window_end_ns = 100.0;
    std::string rule = "trapezoid";

    void add(CLI::App* app)
    {
        app->add_option("--tau-ns", tau_ns, "Pre-first-path span (ns)");
        app->add_option("--window-start-ns", window_start_ns, "Analysis window start relative to first path (ns)");
        app->add_option("--window-end-ns", window_end_ns, "Analysis window end relative to first path (ns)");
        app->add_option("--rule", rule, "Integration rule")->check(CLI::IsMember({"trapezoid", "left_riemann"}));
    }

    FeatureConfig config() const
    {
        FeatureConfig c;
        c.tau_s = tau_ns * 1e-9;
        c.window_start_s = window_start_ns * 1e-9;
        c.window_end_s = window_end_ns * 1e-9;
        c.rule = rule == "left_riemann" ? IntegrationRule::left_riemann : IntegrationRule::trapezoid;
        c.validate();
        return c;
    }
};

struct TrainFlags {
    std::string kernel = "rbf";
    std::string gamma = "auto";
    double c = 1.0;
    double tol = 1e-3;
    int max_passes = 100;

    void add(CLI::App* app)
    {
        app->add_option("--kernel", kernel, "Kernel")->check(CLI::IsMember({"rbf", "linear"}));
        app->add_option("--C", c, "Soft-margin penalty");
        app->add_option("--gamma", gamma, "RBF width, or 'auto' for 1/d");
        app->add_option("--tol", tol, "KKT tolerance");
        app->add_option("--max-passes", max_passes, "Passes of n iterations without dual progress before giving up");
    }

    KernelSpec kernel_spec() const
    {
        KernelSpec k;
        k.kind = kernel == "linear" ? KernelKind::linear : KernelKind::rbf;
        if (gamma != "auto") {
            std::size_t used = 0;
            double g = 0.0;
            try {
                g = std::stod(gamma, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != gamma.size())
                throw Error(Errc::invalid_argument, "gamma must be 'auto' or a number, got '" + gamma + "'");
            k.gamma = g;
        }
        k.validate();
        return k;
    }

    TrainConfig train_config(std::uint64_t seed) const
    {
        TrainConfig t;
        t.C = c;
        t.tol = tol;
        t.max_passes = max_passes;
        t.seed = seed;
        t.validate();
        return t;
    }
};

std::vector<RangingRecord> read_records(const std::string& path, bool lenient)
{
    auto res = read_dataset(path, lenient ? ReadMode::lenient : ReadMode::strict);
    for (const auto& issue : res.issues)
        std::cerr << "warning: skipped line " << issue.line << ": " << issue.message << "\n";
    return std::move(res.records);
}

int run_synth(const std::string& preset, std::size_t count, std::size_t pairs, std::uint64_t seed,
              const std::string& out)
{
    if (pairs == 0 || count == 0 || count % pairs != 0)
        throw Error(Errc::invalid_argument, "--count must be a positive multiple of --pairs");
    std::vector<PropagationClass> classes;
    if (preset == "los")
        classes = {PropagationClass::LOS};
    else if (preset == "dp_nlos")
        classes = {PropagationClass::DP_NLOS};
    else if (preset == "ndp_nlos")
        classes = {PropagationClass::NDP_NLOS};
    else
        classes.assign(kAllClasses.begin(), kAllClasses.end());

    std::vector<RangingRecord> records;
    for (auto c : classes) {
        const auto p = sample_pairs(default_preset(c), pairs, count / pairs, seed + class_index(c),
                                    std::string(to_string(c)) + "-");
        auto r = to_records(p);
        records.insert(records.end(), r.begin(), r.end());
    }
    write_file_atomic(out, format_dataset(records));
    return 0;
}

int run_split(const std::string& in, std::size_t train_pairs, std::uint64_t seed, const std::string& train_out,
              const std::string& test_out, const FeatureConfig& fc)
{
    const auto records = read_records(in, false);
    const auto samples = label_records(records, fc);
    const auto split = split_by_pair(samples, train_pairs, seed);
    std::vector<RangingRecord> tr, te;
    for (auto i : split.train)
        tr.push_back(records[i]);
    for (auto i : split.test)
        te.push_back(records[i]);
    write_file_atomic(train_out, format_dataset(tr));
    write_file_atomic(test_out, format_dataset(te));
    return 0;
}

int run_featurize(const std::string& in, const std::string& out, const FeatureConfig& fc, bool lenient)
{
    const auto records = read_records(in, lenient);
    std::string csv;
    const auto names = FeatureVector::names();
    for (std::size_t i = 0; i < names.size(); ++i)
        csv += (i ? "," : "") + std::string(names[i]);
    csv += "\n";
    for (const auto& r : records) {
        const auto a = extract_features(r, fc).to_array();
        for (std::size_t i = 0; i < a.size(); ++i)
            csv += (i ? "," : "") + fmt(a[i]);
        csv += "\n";
    }
    emit(out, csv);
    return 0;
}

int run_train(const std::string& in, const std::string& step1, const std::string& step2, const TrainFlags& tf,
              std::uint64_t seed, const FeatureConfig& fc, const std::string& model_out)
{
    const auto records = read_records(in, false);
    const auto samples = label_records(records, fc);
    const auto s1 = parse_subset(step1);
    const auto s2 = parse_subset(step2);
    auto clf = train_two_step(samples, s1, s2, tf.kernel_spec(), tf.train_config(seed));
    clf.feature_config = fc;
    write_file_atomic(model_out, save_bundle(clf));
    return 0;
}

int run_classify(const std::string& model, const std::string& in, const std::string& out, bool lenient)
{
    const auto clf = load_bundle(read_file(model));
    const auto records = read_records(in, lenient);
    std::string csv = "pair_id,label,step1_score,step2_score\n";
    for (const auto& r : records) {
        const auto c = classify_detailed(clf, extract_features(r, clf.feature_config));
        csv += r.pair_id() + "," + std::string(to_string(c.label)) + "," + fmt(c.step1_score) + "," +
               (c.step2_score ? fmt(*c.step2_score) : std::string()) + "\n";
    }
    emit(out, csv);
    return 0;
}

int run_evaluate(const std::string& model, const std::string& in, const std::string& mode_text, bool json,
                 const std::string& out)
{
    const auto mode = parse_eval_mode(mode_text);
    if (!mode)
        throw Error(Errc::invalid_argument, "unknown mode '" + mode_text + "'");
    const auto clf = load_bundle(read_file(model));
    const auto records = read_records(in, false);
    const auto samples = label_records(records, clf.feature_config, clf.thresholds);
    const auto rates = evaluate(clf, samples, *mode);
    emit(out, json ? rates_json(rates) : format_rates(rates));
    return 0;
}

int run_sweep(const std::string& spec_path, const std::string& in, const std::string& report_out,
              const std::optional<std::uint64_t>& seed, const FeatureConfig& fc)
{
    auto spec = parse_sweep_spec(read_file(spec_path));
    if (seed)
        spec.seed = *seed;
    const auto records = read_records(in, false);
    const auto samples = label_records(records, fc);
    const auto rows = sweep(spec, samples);
    const auto table = format_sweep_table(rows);
    if (report_out.empty()) {
        std::cout << table;
    } else {
        write_file_atomic(report_out, table);
        write_file_atomic(report_out + ".json", sweep_json(rows));
    }
    return 0;
}

int run_histogram(const std::string& in, int feature, std::size_t bins, const std::optional<double>& lo,
                  const std::optional<double>& hi, const std::string& cls, const FeatureConfig& fc,
                  const std::string& out)
{
    if (lo.has_value() != hi.has_value())
        throw Error(Errc::invalid_argument, "--lo and --hi must be given together");
    std::optional<PropagationClass> only;
    if (!cls.empty()) {
        only = parse_propagation_class(cls);
        if (!only)
            throw Error(Errc::invalid_argument, "unknown class '" + cls + "'");
    }
    const auto records = read_records(in, false);
    std::vector<double> values;
    for (const auto& r : records) {
        if (only && resolve_label(r) != *only)
            continue;
        values.push_back(extract_features(r, fc).at(feature));
    }
    const auto h = lo ? make_histogram(values, bins, *lo, *hi) : make_histogram(values, bins);
    emit(out, format_histogram(h));
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"UWB propagation-condition classification toolkit"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.set_version_flag("--version", "uwbnlos 0.1.0");

    std::uint64_t seed = 0;
    bool lenient = false;
    FeatureFlags ff;
    TrainFlags tf;

    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
    std::string preset = "mixed";
    std::size_t count = 100, pairs = 1;
    std::string synth_out;
    synth->add_option("--preset", preset, "Scenario preset")
        ->check(CLI::IsMember({"los", "dp_nlos", "ndp_nlos", "mixed"}));
    synth->add_option("--count", count, "Waveforms per class");
    synth->add_option("--pairs", pairs, "Anchor pairs per class; --count must divide evenly");
    synth->add_option("--seed", seed, "Random seed")->required();
    synth->add_option("--out", synth_out, "Output dataset (JSON lines)")->required();

    auto* split = app.add_subcommand("split", "Split a dataset by anchor pair");
    std::string split_in, train_out, test_out;
    std::size_t train_pairs = 0;
    split->add_option("--in", split_in, "Input dataset")->required();
    split->add_option("--train-pairs", train_pairs, "Pairs assigned to the training side")->required();
    split->add_option("--seed", seed, "Random seed")->required();
    split->add_option("--train-out", train_out, "Training dataset")->required();
    split->add_option("--test-out", test_out, "Test dataset")->required();

    auto* featurize = app.add_subcommand("featurize", "Extract the ten features as CSV");
    std::string feat_in, feat_out;
    featurize->add_option("--in", feat_in, "Input dataset")->required();
    featurize->add_option("--out", feat_out, "Output CSV (stdout when empty)");
    featurize->add_flag("--lenient", lenient, "Skip malformed lines instead of failing");
    ff.add(featurize);

    auto* train = app.add_subcommand("train", "Train the two-step classifier");
    std::string train_in, model_out;
    std::string step1 = "2,4,5", step2 = "3,4,10";
    train->add_option("--in", train_in, "Training dataset")->required();
    train->add_option("--step1", step1, "LOS/NLOS feature indices");
    train->add_option("--step2", step2, "DP/NDP feature indices");
    train->add_option("--seed", seed, "Random seed")->required();
    train->add_option("--model-out", model_out, "Output model bundle")->required();
    tf.add(train);
    ff.add(train);

    auto* classify = app.add_subcommand("classify", "Classify records with a trained bundle");
    std::string cls_model, cls_in, cls_out;
    classify->add_option("--model", cls_model, "Model bundle")->required();
    classify->add_option("--in", cls_in, "Input dataset")->required();
    classify->add_option("--out", cls_out, "Output CSV (stdout when empty)");
    classify->add_flag("--lenient", lenient, "Skip malformed lines instead of failing");

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Report success rates on a labeled dataset");
    std::string ev_model, ev_in, ev_out, ev_mode = "full_3class";
    bool ev_json = false;
    evaluate_cmd->add_option("--model", ev_model, "Model bundle")->required();
    evaluate_cmd->add_option("--in", ev_in, "Labeled dataset")->required();
    evaluate_cmd->add_option("--mode", ev_mode, "Evaluation mode")
        ->check(CLI::IsMember({"step1", "step2_true_nlos", "step2_predicted_nlos", "full_3class"}));
    evaluate_cmd->add_flag("--json", ev_json, "Emit JSON instead of text");
    evaluate_cmd->add_option("--out", ev_out, "Output file (stdout when empty)");

    auto* sweep_cmd = app.add_subcommand("sweep", "Train and evaluate a list of feature subsets");
    std::string sw_spec, sw_in, sw_out;
    std::optional<std::uint64_t> sw_seed;
    sweep_cmd->add_option("--spec", sw_spec, "Sweep spec file")->required();
    sweep_cmd->add_option("--in", sw_in, "Labeled dataset")->required();
    sweep_cmd->add_option("--report-out", sw_out, "Text report; a .json sidecar is written next to it");
    sweep_cmd->add_option("--seed", sw_seed, "Overrides the seed in the spec file");
    ff.add(sweep_cmd);

    auto* hist = app.add_subcommand("histogram", "Histogram one feature");
    std::string h_in, h_out, h_class;
    int h_feature = 10;
    std::size_t h_bins = 50;
    std::optional<double> h_lo, h_hi;
    hist->add_option("--in", h_in, "Input dataset")->required();
    hist->add_option("--feature", h_feature, "Feature index (1-10)")->check(CLI::Range(1, 10));
    hist->add_option("--bins", h_bins, "Bin count");
    hist->add_option("--lo", h_lo, "Range start (data range when omitted)");
    hist->add_option("--hi", h_hi, "Range end");
    hist->add_option("--class", h_class, "Restrict to one class (LOS, DP_NLOS, NDP_NLOS)");
    hist->add_option("--out", h_out, "Output file (stdout when empty)");
    ff.add(hist);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        for (auto& ch : msg)
            if (ch == '\n')
                ch = ' ';
        std::cerr << "error: usage: " << msg << "\n";
        return 2;
    }

    try {
        if (synth->parsed())
            return run_synth(preset, count, pairs, seed, synth_out);
        if (split->parsed())
            return run_split(split_in, train_pairs, seed, train_out, test_out, FeatureConfig{});
        if (featurize->parsed())
            return run_featurize(feat_in, feat_out, ff.config(), lenient);
        if (train->parsed())
            return run_train(train_in, step1, step2, tf, seed, ff.config(), model_out);
        if (classify->parsed())
            return run_classify(cls_model, cls_in, cls_out, lenient);
        if (evaluate_cmd->parsed())
            return run_evaluate(ev_model, ev_in, ev_mode, ev_json, ev_out);
        if (sweep_cmd->parsed())
            return run_sweep(sw_spec, sw_in, sw_out, sw_seed, ff.config());
        if (hist->parsed())
            return run_histogram(h_in, h_feature, h_bins, h_lo, h_hi, h_class, ff.config(), h_out);
    } catch (const Error& e) {
        std::string msg = e.what();
        for (auto& ch : msg)
            if (ch == '\n')
                ch = ' ';
        std::cerr << "error: " << to_string(e.code()) << ": " << msg << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

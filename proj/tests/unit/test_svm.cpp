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
#include <uwbnlos/svm.hpp>

#include "oracles.hpp"
#include "test_helpers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

using namespace uwbnlos;

namespace {

KernelSpec linear() { return {KernelKind::linear, std::nullopt}; }

struct Toy {
    FeatureRows x;
    std::vector<int> y;
};

// Linearly separable points in d dimensions with a margin around a random
// hyperplane; both classes always present.
Toy separable(std::mt19937_64& rng, std::size_t n, std::size_t d)
{
    std::normal_distribution<double> g(0.0, 1.0);
    for (;;) {
        std::vector<double> w(d);
        for (auto& v : w)
            v = g(rng);
        Toy t;
        for (int tries = 0; tries < 1000 && t.x.size() < n; ++tries) {
            std::vector<double> p(d);
            for (auto& v : p)
                v = 2.0 * g(rng);
            const double s = std::inner_product(p.begin(), p.end(), w.begin(), 0.3);
            if (std::abs(s) < 0.5)
                continue;
            const int label = s > 0 ? 1 : -1;
            const std::size_t pos = static_cast<std::size_t>(std::count(t.y.begin(), t.y.end(), 1));
            const std::size_t remaining = n - t.x.size();
            if (remaining == 1 && (pos == 0 || pos == t.y.size()) && (label == 1) == (pos == t.y.size()))
                continue;  // keep both classes
            t.x.push_back(p);
            t.y.push_back(label);
        }
        if (t.x.size() == n)
            return t;
    }
}

Toy blobs(std::mt19937_64& rng, std::size_t n)
{
    std::normal_distribution<double> g(0.0, 1.0);
    Toy t;
    for (std::size_t i = 0; i < n; ++i) {
        const int label = i % 2 ? 1 : -1;
        t.x.push_back({g(rng) + 1.2 * label, g(rng) - 0.4 * label, g(rng)});
        t.y.push_back(label);
    }
    return t;
}

std::vector<double> alphas_of(const SvmModel& m, std::size_t n)
{
    std::vector<double> a(n, 0.0);
    for (std::size_t s = 0; s < m.support_indices.size(); ++s)
        a[m.support_indices[s]] = std::abs(m.dual_coefs[s]);
    return a;
}

} // namespace

TEST(Standardizer, Examples)
{
    const auto s = fit_standardizer({{0.0}, {2.0}});
    EXPECT_DOUBLE_EQ(s.mean[0], 1.0);
    EXPECT_DOUBLE_EQ(s.stddev[0], 1.0);
    EXPECT_EQ(s.apply(std::vector<double>{0.0})[0], -1.0);
    EXPECT_EQ(s.apply(std::vector<double>{2.0})[0], 1.0);
    EXPECT_ERRC(fit_standardizer({{1.0, 2.0}, {1.0, 2.0}}), Errc::zero_variance_feature);
    EXPECT_ERRC(fit_standardizer({{1.0}}), Errc::invalid_argument);
}

TEST(Standardizer, RandomMatrixIsStandardized)
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-50.0, 300.0);
    FeatureRows rows(50, std::vector<double>(3));
    for (auto& r : rows)
        for (auto& v : r)
            v = u(rng);
    const auto s = fit_standardizer(rows);
    for (std::size_t f = 0; f < 3; ++f) {
        long double m = 0, v = 0;
        for (const auto& r : rows)
            m += s.apply(r)[f];
        m /= rows.size();
        for (const auto& r : rows) {
            const long double d = s.apply(r)[f] - m;
            v += d * d;
        }
        EXPECT_LT(std::abs(static_cast<double>(m)), 1e-9);
        EXPECT_LT(std::abs(std::sqrt(static_cast<double>(v / rows.size())) - 1.0), 1e-9);
    }
}

TEST(Svm, TwoPointProblem)
{
    const FeatureRows x = {{-1.0}, {1.0}};
    const std::vector<int> y = {-1, 1};
    TrainConfig cfg;
    cfg.C = 10;
    const auto m = train(x, y, linear(), cfg);
    EXPECT_TRUE(m.converged);
    EXPECT_EQ(m.support_vectors.size(), 2u);
    EXPECT_NEAR(m.bias, 0.0, 1e-9);
    EXPECT_NEAR(predict(m, std::vector<double>{1.0}).score, 1.0, 1e-9);
    EXPECT_NEAR(predict(m, std::vector<double>{-1.0}).score, -1.0, 1e-9);

    const auto at_zero = predict(m, std::vector<double>{0.0});
    EXPECT_NEAR(at_zero.score, 0.0, 1e-12);
    const auto beyond = predict(m, std::vector<double>{2.0});
    EXPECT_EQ(beyond.label, 1);
    EXPECT_GT(beyond.score, 1.0);
}

TEST(Svm, ExactZeroScoreIsPositive)
{
    SvmModel m;
    m.kernel = linear();
    m.standardizer = Standardizer::identity(1);
    m.feature_indices = {1};
    m.support_vectors = {{1.0}};
    m.dual_coefs = {1.0};
    m.support_indices = {0};
    m.bias = 0.0;
    const auto p = predict(m, std::vector<double>{0.0});
    EXPECT_EQ(p.score, 0.0);
    EXPECT_EQ(p.label, 1);
}

TEST(Svm, LinearXorIsNotSeparable)
{
    const FeatureRows x = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
    const std::vector<int> y = {-1, -1, 1, 1};
    TrainConfig cfg;
    cfg.C = 1000;
    const auto m = train(x, y, linear(), cfg);
    int correct = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        correct += predict(m, x[i]).label == y[i];
    EXPECT_LT(correct, 4);

    const auto r = train(x, y, KernelSpec{KernelKind::rbf, 2.0}, cfg);
    correct = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        correct += predict(r, x[i]).label == y[i];
    EXPECT_EQ(correct, 4);
}

TEST(Svm, DualMatchesBruteForceOracle)
{
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> size(2, 6);
    std::uniform_int_distribution<int> dim(1, 3);
    for (int trial = 0; trial < 300; ++trial) {
        const auto t = separable(rng, static_cast<std::size_t>(size(rng)), static_cast<std::size_t>(dim(rng)));
        const KernelSpec k = trial % 2 ? linear() : KernelSpec{KernelKind::rbf, 0.5};
        TrainConfig cfg;
        cfg.C = trial % 3 == 0 ? 1.0 : 1000.0;
        cfg.seed = static_cast<std::uint64_t>(trial);
        const auto m = train(t.x, t.y, k, cfg);
        const auto best = oracle::brute_force_dual(oracle::kernel_matrix(k, t.x), t.y, cfg.C);
        ASSERT_TRUE(best.found);
        EXPECT_TRUE(m.converged) << "trial " << trial << " iterations " << m.iterations;
        EXPECT_NEAR(m.dual_objective, best.objective, 1e-4) << "trial " << trial;
        EXPECT_NEAR(oracle::model_dual_objective(m), best.objective, 1e-4) << "trial " << trial;
        EXPECT_LE(oracle::kkt_violation(m, t.x, t.y), cfg.tol) << "trial " << trial;
    }
}

TEST(Svm, UnreachableTolStopsUnconverged)
{
    std::mt19937_64 rng(8);
    const auto t = blobs(rng, 40);
    TrainConfig cfg;
    cfg.tol = 1e-300;
    cfg.max_passes = 2;
    const auto m = train(t.x, t.y, KernelSpec{}, cfg);
    EXPECT_FALSE(m.converged);
    EXPECT_GT(m.iterations, 0u);
    EXPECT_LE(max_kkt_violation(m, t.x, t.y), 1e-3);
}

TEST(Svm, FeasibilityAndKkt)
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto t = blobs(rng, 80);
        TrainConfig cfg;
        cfg.C = trial % 2 ? 0.5 : 5.0;
        cfg.seed = static_cast<std::uint64_t>(trial);
        const auto m = train(t.x, t.y, KernelSpec{}, cfg);
        ASSERT_TRUE(m.converged);
        const auto a = alphas_of(m, t.x.size());
        long double s = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_GE(a[i], -1e-9);
            EXPECT_LE(a[i], cfg.C + 1e-9);
            s += a[i] * t.y[i];
        }
        EXPECT_LE(std::abs(static_cast<double>(s)), 1e-9);
        EXPECT_LE(oracle::kkt_violation(m, t.x, t.y), cfg.tol);
        EXPECT_LE(max_kkt_violation(m, t.x, t.y), cfg.tol);
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] > 1e-9 && a[i] < cfg.C - 1e-9)
                EXPECT_NEAR(std::abs(decision_value(m, t.x[i])), 1.0, cfg.tol);
    }
}

TEST(Svm, SeparableLargeCFitsTrainingSet)
{
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const auto t = separable(rng, 40, 2);
        TrainConfig cfg;
        cfg.C = 1000;
        const auto m = train(t.x, t.y, linear(), cfg);
        for (std::size_t i = 0; i < t.x.size(); ++i)
            EXPECT_EQ(predict(m, t.x[i]).label, t.y[i]);
    }
}

TEST(Svm, SupportVectorOrderDoesNotMatter)
{
    std::mt19937_64 rng(31);
    const auto t = blobs(rng, 60);
    const auto m = train(t.x, t.y, KernelSpec{}, TrainConfig{});
    auto shuffled = m;
    std::vector<std::size_t> order(m.support_vectors.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < order.size(); ++i) {
        shuffled.support_vectors[i] = m.support_vectors[order[i]];
        shuffled.dual_coefs[i] = m.dual_coefs[order[i]];
        shuffled.support_indices[i] = m.support_indices[order[i]];
    }
    std::normal_distribution<double> g(0.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> row = {g(rng), g(rng), g(rng)};
        EXPECT_NEAR(predict(m, row).score, predict(shuffled, row).score, 1e-9);
    }
}

TEST(Svm, DeterministicBytes)
{
    std::mt19937_64 rng(4);
    const auto t = blobs(rng, 60);
    TrainConfig cfg;
    cfg.seed = 9;
    EXPECT_EQ(save_model(train(t.x, t.y, KernelSpec{}, cfg)), save_model(train(t.x, t.y, KernelSpec{}, cfg)));
}

TEST(Svm, FitStandardizesSelectedColumns)
{
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g(0.0, 1.0);
    FeatureRows raw;
    std::vector<int> y;
    for (int i = 0; i < 60; ++i) {
        const int label = i % 2 ? 1 : -1;
        raw.push_back({1e-9 * g(rng), 1e6 + 1e4 * (g(rng) + label), 7.0, 1e-17 * (g(rng) - label)});
        y.push_back(label);
    }
    const std::vector<int> idx = {2, 4};
    const auto m = fit(raw, y, idx, KernelSpec{}, TrainConfig{});
    EXPECT_EQ(m.feature_indices, idx);
    EXPECT_EQ(m.standardizer.size(), 2u);
    int correct = 0;
    for (std::size_t i = 0; i < raw.size(); ++i)
        correct += predict(m, raw[i]).label == y[i];
    EXPECT_GE(correct, 50);
    EXPECT_ERRC(predict(m, std::vector<double>{1.0, 2.0, 3.0}), Errc::missing_features);
    const std::vector<int> constant = {3};
    EXPECT_ERRC(fit(raw, y, constant, KernelSpec{}, TrainConfig{}), Errc::zero_variance_feature);
}

TEST(Svm, DegenerateLabels)
{
    EXPECT_ERRC(train({{0.0}, {1.0}}, std::vector<int>{1, 1}, linear(), TrainConfig{}), Errc::degenerate_labels);
}

TEST(Svm, RejectsBadConfig)
{
    TrainConfig cfg;
    cfg.C = 0.0;
    EXPECT_ERRC(cfg.validate(), Errc::invalid_argument);
    KernelSpec k{KernelKind::rbf, -1.0};
    EXPECT_ERRC(k.validate(), Errc::invalid_argument);
}

TEST(ModelIo, RoundTrip)
{
    std::mt19937_64 rng(10);
    const auto t = blobs(rng, 50);
    const auto m = train(t.x, t.y, KernelSpec{}, TrainConfig{});
    const auto text = save_model(m);
    const auto back = load_model(text);
    EXPECT_EQ(save_model(back), text);
    std::normal_distribution<double> g(0.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> row = {g(rng), g(rng), g(rng)};
        EXPECT_EQ(predict(m, row).score, predict(back, row).score);
    }
}

TEST(ModelIo, Errors)
{
    const FeatureRows x = {{-1.0}, {1.0}};
    const auto text = save_model(train(x, std::vector<int>{-1, 1}, linear(), TrainConfig{}));
    EXPECT_ERRC(load_model(text.substr(0, text.size() / 2)), Errc::parse_error);
    EXPECT_ERRC(load_model(""), Errc::parse_error);
    std::string bumped = text;
    const auto pos = bumped.find("\"version\": 1");
    ASSERT_NE(pos, std::string::npos);
    bumped.replace(pos, 12, "\"version\": 2");
    EXPECT_ERRC(load_model(bumped), Errc::unsupported_version);
}

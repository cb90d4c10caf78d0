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

#include "uwbnlos/svm.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "json_io.hpp"
#include "random.hpp"
#include "uwbnlos/error.hpp"

namespace uwbnlos {

namespace {

constexpr double kTau = 1e-12;
constexpr std::size_t kCacheBudgetBytes = std::size_t{256} << 20;

// Rows of Q_ij = y_i y_j K(x_i, x_j), computed on demand and evicted FIFO
// once the cache budget is exhausted.
class QMatrix {
public:
    QMatrix(const FeatureRows& rows, std::span<const int> labels, const KernelSpec& kernel)
        : rows_(rows), labels_(labels), kernel_(kernel), cache_(rows.size()), diag_(rows.size())
    {
        const std::size_t n = rows.size();
        max_rows_ = std::max<std::size_t>(2, kCacheBudgetBytes / (sizeof(double) * std::max<std::size_t>(n, 1)));
        for (std::size_t i = 0; i < n; ++i)
            diag_[i] = kernel_(rows_[i], rows_[i]);
    }

    const std::vector<double>& row(std::size_t i)
    {
        if (cache_[i].empty()) {
            if (order_.size() >= max_rows_) {
                cache_[order_.front()] = {};
                order_.pop_front();
            }
            const std::size_t n = rows_.size();
            auto& r = cache_[i];
            r.resize(n);
            for (std::size_t j = 0; j < n; ++j)
                r[j] = static_cast<double>(labels_[i] * labels_[j]) * kernel_(rows_[i], rows_[j]);
            order_.push_back(i);
        }
        return cache_[i];
    }

    double diag(std::size_t i) const { return diag_[i]; }

private:
    const FeatureRows& rows_;
    std::span<const int> labels_;
    KernelSpec kernel_;
    std::vector<std::vector<double>> cache_;
    std::deque<std::size_t> order_;
    std::vector<double> diag_;
    std::size_t max_rows_;
};

void check_rows(const FeatureRows& rows)
{
    if (rows.empty())
        throw Error(Errc::invalid_argument, "no training rows");
    const std::size_t d = rows.front().size();
    if (d == 0)
        throw Error(Errc::invalid_argument, "rows must have at least one feature");
    for (const auto& r : rows) {
        if (r.size() != d)
            throw Error(Errc::invalid_argument, "ragged feature rows");
        for (double v : r)
            if (!std::isfinite(v))
                throw Error(Errc::invalid_argument, "feature rows must be finite");
    }
}

} // namespace

std::string_view to_string(KernelKind kind) noexcept
{
    return kind == KernelKind::linear ? "linear" : "rbf";
}

void KernelSpec::validate() const
{
    if (kind == KernelKind::rbf && gamma && !(*gamma > 0.0 && std::isfinite(*gamma)))
        throw Error(Errc::invalid_argument, "rbf gamma must be positive");
}

KernelSpec KernelSpec::resolved(std::size_t feature_count) const
{
    validate();
    KernelSpec k = *this;
    if (k.kind == KernelKind::rbf && !k.gamma)
        k.gamma = 1.0 / static_cast<double>(std::max<std::size_t>(feature_count, 1));
    return k;
}

double KernelSpec::operator()(std::span<const double> a, std::span<const double> b) const
{
    if (kind == KernelKind::linear) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            s += a[i] * b[i];
        return s;
    }
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return std::exp(-gamma.value_or(1.0) * d2);
}

std::vector<double> Standardizer::apply(std::span<const double> row) const
{
    if (row.size() != mean.size())
        throw Error(Errc::missing_features, "row width does not match the standardizer");
    std::vector<double> out(row.size());
    for (std::size_t i = 0; i < row.size(); ++i)
        out[i] = (row[i] - mean[i]) / stddev[i];
    return out;
}

Standardizer Standardizer::identity(std::size_t features)
{
    return {std::vector<double>(features, 0.0), std::vector<double>(features, 1.0)};
}

Standardizer fit_standardizer(const FeatureRows& rows)
{
    check_rows(rows);
    if (rows.size() < 2)
        throw Error(Errc::invalid_argument, "standardizer needs at least 2 rows");
    const std::size_t d = rows.front().size();
    const auto n = static_cast<double>(rows.size());
    Standardizer s{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
    for (std::size_t j = 0; j < d; ++j) {
        double mu = 0.0;
        for (const auto& r : rows)
            mu += r[j];
        mu /= n;
        double var = 0.0;
        for (const auto& r : rows)
            var += (r[j] - mu) * (r[j] - mu);
        var /= n;
        const double sd = std::sqrt(var);
        // Constant columns leave only rounding residue in the variance.
        if (!(sd > 0.0) || !(sd > 1e-12 * std::abs(mu)))
            throw Error(Errc::zero_variance_feature, "zero-variance feature at column " + std::to_string(j));
        s.mean[j] = mu;
        s.stddev[j] = sd;
    }
    return s;
}

void TrainConfig::validate() const
{
    if (!(C > 0.0) || !std::isfinite(C))
        throw Error(Errc::invalid_argument, "C must be positive");
    if (!(tol > 0.0) || !std::isfinite(tol))
        throw Error(Errc::invalid_argument, "tol must be positive");
    if (max_passes < 1)
        throw Error(Errc::invalid_argument, "max_passes must be >= 1");
}

SvmModel train(const FeatureRows& rows, std::span<const int> labels, const KernelSpec& kernel_in,
               const TrainConfig& cfg)
{
    cfg.validate();
    check_rows(rows);
    if (labels.size() != rows.size())
        throw Error(Errc::invalid_argument, "label count does not match row count");
    bool has_pos = false, has_neg = false;
    for (int y : labels) {
        if (y == 1)
            has_pos = true;
        else if (y == -1)
            has_neg = true;
        else
            throw Error(Errc::invalid_argument, "labels must be +1 or -1");
    }
    if (!has_pos || !has_neg)
        throw Error(Errc::degenerate_labels, "degenerate labels (single class)");

    const std::size_t n = rows.size();
    const std::size_t d = rows.front().size();
    const KernelSpec kernel = kernel_in.resolved(d);
    const double C = cfg.C;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    detail::Rng rng(cfg.seed);
    rng.shuffle(order.begin(), order.end());

    QMatrix Q(rows, labels, kernel);
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);
    auto y = [&](std::size_t i) { return static_cast<double>(labels[i]); };

    // Gives up after max_passes * n iterations in a row that barely move the
    // dual objective, or at a hard cap.
    const std::size_t max_stall = cfg.max_passes * std::max<std::size_t>(n, 1);
    const std::size_t hard_cap = std::max<std::size_t>(10000000, 100 * max_stall);
    std::size_t iter = 0;
    std::size_t stall = 0;
    double objective_gain = 0.0;
    bool converged = false;

    while (iter < hard_cap && stall < max_stall) {
        // i: maximal violator in I_up
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = n;
        for (std::size_t t : order) {
            if (labels[t] == 1) {
                if (alpha[t] < C && -grad[t] > gmax) {
                    gmax = -grad[t];
                    i = t;
                }
            } else if (alpha[t] > 0.0 && grad[t] > gmax) {
                gmax = grad[t];
                i = t;
            }
        }
        if (i == n) {
            converged = true;
            break;
        }
        const auto& qi = Q.row(i);

        // j: best second-order gain among I_low
        double gmax2 = -std::numeric_limits<double>::infinity();
        double best = std::numeric_limits<double>::infinity();
        std::size_t j = n;
        for (std::size_t t : order) {
            double grad_diff;
            double quad;
            if (labels[t] == 1) {
                if (!(alpha[t] > 0.0))
                    continue;
                gmax2 = std::max(gmax2, grad[t]);
                grad_diff = gmax + grad[t];
                quad = Q.diag(i) + Q.diag(t) - 2.0 * y(i) * qi[t];
            } else {
                if (!(alpha[t] < C))
                    continue;
                gmax2 = std::max(gmax2, -grad[t]);
                grad_diff = gmax - grad[t];
                quad = Q.diag(i) + Q.diag(t) + 2.0 * y(i) * qi[t];
            }
            if (grad_diff > 0.0) {
                const double gain = -(grad_diff * grad_diff) / (quad > 0.0 ? quad : kTau);
                if (gain < best) {
                    best = gain;
                    j = t;
                }
            }
        }
        if (gmax + gmax2 < cfg.tol || j == n) {
            converged = true;
            break;
        }
        ++iter;

        const auto& qj = Q.row(j);
        const auto& qi_again = Q.row(i);  // j's insertion may have evicted i
        const double old_ai = alpha[i];
        const double old_aj = alpha[j];

        if (labels[i] != labels[j]) {
            double quad = Q.diag(i) + Q.diag(j) + 2.0 * qi_again[j];
            if (quad <= 0.0)
                quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = C - diff;
                }
            } else if (alpha[j] > C) {
                alpha[j] = C;
                alpha[i] = C + diff;
            }
        } else {
            double quad = Q.diag(i) + Q.diag(j) - 2.0 * qi_again[j];
            if (quad <= 0.0)
                quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = sum - C;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > C) {
                if (alpha[j] > C) {
                    alpha[j] = C;
                    alpha[i] = sum - C;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        const double dai = alpha[i] - old_ai;
        const double daj = alpha[j] - old_aj;
        const double step_gain = -(grad[i] * dai + grad[j] * daj +
                                   0.5 * (Q.diag(i) * dai * dai + Q.diag(j) * daj * daj) + qi_again[j] * dai * daj);
        objective_gain += step_gain;
        if (step_gain > 1e-12 * std::max(1.0, std::abs(objective_gain)))
            stall = 0;
        else
            ++stall;
        for (std::size_t k = 0; k < n; ++k)
            grad[k] += qi_again[k] * dai + qj[k] * daj;
    }

    // Offset: average over free vectors, midpoint of the feasible interval
    // otherwise.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t nr_free = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double yg = y(i) * grad[i];
        const bool at_upper = alpha[i] >= C;
        const bool at_lower = alpha[i] <= 0.0;
        if (at_upper) {
            if (labels[i] == -1)
                ub = std::min(ub, yg);
            else
                lb = std::max(lb, yg);
        } else if (at_lower) {
            if (labels[i] == 1)
                ub = std::min(ub, yg);
            else
                lb = std::max(lb, yg);
        } else {
            ++nr_free;
            sum_free += yg;
        }
    }
    const double rho = nr_free > 0 ? sum_free / static_cast<double>(nr_free) : (ub + lb) / 2.0;

    SvmModel model;
    model.kernel = kernel;
    model.standardizer = Standardizer::identity(d);
    model.feature_indices.resize(d);
    std::iota(model.feature_indices.begin(), model.feature_indices.end(), 1);
    model.bias = -rho;
    model.C = C;
    model.converged = converged;
    model.iterations = iter;
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        objective += 0.5 * alpha[i] * (1.0 - grad[i]);
        if (alpha[i] > 0.0) {
            model.support_vectors.push_back(rows[i]);
            model.dual_coefs.push_back(alpha[i] * y(i));
            model.support_indices.push_back(i);
        }
    }
    model.dual_objective = objective;
    return model;
}

std::vector<double> select_features(std::span<const double> raw_row, std::span<const int> feature_indices)
{
    std::vector<double> out;
    out.reserve(feature_indices.size());
    for (int idx : feature_indices) {
        if (idx < 1 || static_cast<std::size_t>(idx) > raw_row.size())
            throw Error(Errc::missing_features,
                        "missing feature " + std::to_string(idx) + " in row of width " + std::to_string(raw_row.size()));
        out.push_back(raw_row[static_cast<std::size_t>(idx - 1)]);
    }
    return out;
}

SvmModel fit(const FeatureRows& raw_rows, std::span<const int> labels, std::span<const int> feature_indices,
             const KernelSpec& kernel, const TrainConfig& cfg)
{
    if (feature_indices.empty())
        throw Error(Errc::invalid_argument, "feature subset must be non-empty");
    FeatureRows selected;
    selected.reserve(raw_rows.size());
    for (const auto& r : raw_rows)
        selected.push_back(select_features(r, feature_indices));
    const Standardizer st = fit_standardizer(selected);
    for (auto& r : selected)
        r = st.apply(r);
    SvmModel model = train(selected, labels, kernel, cfg);
    model.standardizer = st;
    model.feature_indices.assign(feature_indices.begin(), feature_indices.end());
    return model;
}

double decision_value(const SvmModel& model, std::span<const double> standardized)
{
    double score = 0.0;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i)
        score += model.dual_coefs[i] * model.kernel(model.support_vectors[i], standardized);
    return score + model.bias;
}

Prediction predict(const SvmModel& model, std::span<const double> raw_row)
{
    const auto x = model.standardizer.apply(select_features(raw_row, model.feature_indices));
    const double score = decision_value(model, x);
    return {score >= 0.0 ? 1 : -1, score};
}

double max_kkt_violation(const SvmModel& model, const FeatureRows& rows, std::span<const int> labels)
{
    std::vector<double> alpha(rows.size(), 0.0);
    for (std::size_t s = 0; s < model.support_indices.size(); ++s)
        alpha.at(model.support_indices[s]) = std::abs(model.dual_coefs[s]);
    double worst = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double yf = static_cast<double>(labels[i]) * decision_value(model, rows[i]);
        double v;
        if (alpha[i] <= 0.0)
            v = std::max(0.0, 1.0 - yf);
        else if (alpha[i] >= model.C)
            v = std::max(0.0, yf - 1.0);
        else
            v = std::abs(yf - 1.0);
        worst = std::max(worst, v);
    }
    return worst;
}

double dual_objective(const SvmModel& model)
{
    double linear = 0.0;
    double quad = 0.0;
    const std::size_t m = model.support_vectors.size();
    for (std::size_t i = 0; i < m; ++i) {
        linear += std::abs(model.dual_coefs[i]);
        for (std::size_t j = 0; j < m; ++j)
            quad += model.dual_coefs[i] * model.dual_coefs[j] *
                    model.kernel(model.support_vectors[i], model.support_vectors[j]);
    }
    return linear - 0.5 * quad;
}

namespace detail {

nlohmann::json model_to_json(const SvmModel& m)
{
    nlohmann::json kernel = {{"kind", to_string(m.kernel.kind)}};
    if (m.kernel.gamma)
        kernel["gamma"] = *m.kernel.gamma;
    return {
        {"format", "uwbnlos-svm"},
        {"version", kModelFormatVersion},
        {"kernel", kernel},
        {"C", m.C},
        {"feature_indices", m.feature_indices},
        {"standardizer", {{"mean", m.standardizer.mean}, {"std", m.standardizer.stddev}}},
        {"support_vectors", m.support_vectors},
        {"dual_coefs", m.dual_coefs},
        {"support_indices", m.support_indices},
        {"bias", m.bias},
        {"converged", m.converged},
        {"iterations", m.iterations},
        {"dual_objective", m.dual_objective},
    };
}

SvmModel model_from_json(const nlohmann::json& j)
{
    return json_guard("model", [&] {
        if (!j.is_object() || j.value("format", std::string{}) != "uwbnlos-svm")
            throw Error(Errc::parse_error, "not an uwbnlos svm model");
        const int version = j.at("version").get<int>();
        if (version != kModelFormatVersion)
            throw Error(Errc::unsupported_version, "unsupported model version " + std::to_string(version));

        SvmModel m;
        const auto& k = j.at("kernel");
        const auto kind = k.at("kind").get<std::string>();
        if (kind == "linear")
            m.kernel.kind = KernelKind::linear;
        else if (kind == "rbf")
            m.kernel.kind = KernelKind::rbf;
        else
            throw Error(Errc::parse_error, "unknown kernel kind '" + kind + "'");
        if (k.contains("gamma"))
            m.kernel.gamma = k.at("gamma").get<double>();
        m.kernel.validate();
        m.C = j.at("C").get<double>();
        m.feature_indices = j.at("feature_indices").get<std::vector<int>>();
        m.standardizer.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
        m.standardizer.stddev = j.at("standardizer").at("std").get<std::vector<double>>();
        m.support_vectors = j.at("support_vectors").get<FeatureRows>();
        m.dual_coefs = j.at("dual_coefs").get<std::vector<double>>();
        m.support_indices = j.at("support_indices").get<std::vector<std::size_t>>();
        m.bias = j.at("bias").get<double>();
        m.converged = j.at("converged").get<bool>();
        m.iterations = j.at("iterations").get<std::size_t>();
        m.dual_objective = j.at("dual_objective").get<double>();

        const std::size_t d = m.feature_indices.size();
        if (m.standardizer.mean.size() != d || m.standardizer.stddev.size() != d)
            throw Error(Errc::parse_error, "standardizer width does not match feature_indices");
        if (m.dual_coefs.size() != m.support_vectors.size() || m.support_indices.size() != m.support_vectors.size())
            throw Error(Errc::parse_error, "support vector arrays differ in length");
        for (const auto& sv : m.support_vectors)
            if (sv.size() != d)
                throw Error(Errc::parse_error, "support vector width does not match feature_indices");
        for (double sd : m.standardizer.stddev)
            if (!(sd > 0.0))
                throw Error(Errc::parse_error, "standardizer std must be positive");
        return m;
    });
}

} // namespace detail

std::string save_model(const SvmModel& model)
{
    return detail::model_to_json(model).dump(1) + "\n";
}

SvmModel load_model(std::string_view text)
{
    const auto j = detail::json_guard("model", [&] { return nlohmann::json::parse(text); });
    return detail::model_from_json(j);
}

} // namespace uwbnlos

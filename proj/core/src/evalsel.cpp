/*
Copyright 2026 The mixbn Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include "mixbn/evalsel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "mixbn/error.hpp"

namespace mixbn {

namespace {

double log_mean_exp(const Eigen::Ref<const Eigen::RowVectorXd>& v) {
    const double m = v.maxCoeff();
    if (!std::isfinite(m)) return m;
    return m + std::log((v.array() - m).exp().mean());
}

// All maps from true components to distinct fitted components (or -1) that
// match exactly min(k_fit, k_true) of them.
void enumerate_labellings(int k_fit, int k_true, std::vector<std::vector<int>>& out) {
    const int matches = std::min(k_fit, k_true);
    std::vector<int> current(static_cast<std::size_t>(k_true), -1);
    std::vector<bool> used(static_cast<std::size_t>(k_fit), false);
    std::function<void(int, int)> rec = [&](int t, int matched) {
        if (t == k_true) {
            if (matched == matches) out.push_back(current);
            return;
        }
        const int remaining = k_true - t;
        if (matched + remaining > matches) {
            current[t] = -1;
            rec(t + 1, matched);
        }
        for (int f = 0; f < k_fit; ++f) {
            if (used[f]) continue;
            used[f] = true;
            current[t] = f;
            rec(t + 1, matched + 1);
            used[f] = false;
            current[t] = -1;
        }
    };
    rec(0, 0);
}

}  // namespace

MshdReport mshd(const ChainTrace& trace, const std::vector<Dag>& truth) {
    if (trace.records.empty()) throw ParameterError("mshd: trace has no records");
    if (truth.empty()) throw ParameterError("mshd: no ground-truth graphs");
    const int k_fit = trace.k;
    const int k_true = static_cast<int>(truth.size());

    std::vector<Cpdag> truth_cpdag;
    for (const auto& g : truth) {
        if (g.size() != trace.nodes) throw ParameterError("mshd: node counts differ");
        truth_cpdag.push_back(to_cpdag(g));
    }

    MshdReport report;
    report.mean_shd = Eigen::MatrixXd::Zero(k_fit, k_true);
    for (const auto& r : trace.records) {
        for (int f = 0; f < k_fit; ++f) {
            const Cpdag c = to_cpdag(r.graphs[f]);
            for (int t = 0; t < k_true; ++t) report.mean_shd(f, t) += shd(c, truth_cpdag[t]);
        }
    }
    report.mean_shd /= static_cast<double>(trace.records.size());

    const Cpdag empty = to_cpdag(Dag(trace.nodes));
    enumerate_labellings(k_fit, k_true, report.labellings);
    report.value = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < report.labellings.size(); ++l) {
        double sum = 0.0;
        for (int t = 0; t < k_true; ++t) {
            const int f = report.labellings[l][t];
            sum += f >= 0 ? report.mean_shd(f, t) : shd(empty, truth_cpdag[t]);
        }
        report.sums.push_back(sum);
        if (sum < report.value) {
            report.value = sum;
            report.best = l;
        }
    }
    return report;
}

Eigen::MatrixXd pointwise_log_density(const Dataset& data, const ChainTrace& trace) {
    if (data.rows() > 0 && data.nodes() != trace.nodes) {
        throw ParameterError("predictive: dataset has " + std::to_string(data.nodes()) +
                             " modifiable columns, trace has " + std::to_string(trace.nodes));
    }
    if (data.rows() > 0 && data.covariates() != trace.covariates) {
        throw ParameterError("predictive: dataset has " + std::to_string(data.covariates()) +
                             " covariates, trace has " + std::to_string(trace.covariates));
    }
    const auto s_count = static_cast<Eigen::Index>(trace.records.size());
    Eigen::MatrixXd out(data.rows(), s_count);
    for (Eigen::Index s = 0; s < s_count; ++s) {
        const auto& r = trace.records[s];
        for (int n = 0; n < data.rows(); ++n) {
            out(n, s) = mixture_logpdf(data.y.row(n).transpose(), data.x.row(n).transpose(),
                                       r.graphs, r.params, r.beta);
        }
    }
    return out;
}

PredictiveScore lmppd(const Dataset& test, const ChainTrace& trace) {
    PredictiveScore score;
    score.samples = static_cast<int>(trace.records.size());
    if (test.rows() == 0) return score;
    if (trace.records.empty()) throw ParameterError("lmppd: trace has no records");
    const Eigen::MatrixXd ld = pointwise_log_density(test, trace);
    for (int n = 0; n < test.rows(); ++n) {
        score.per_point.push_back(log_mean_exp(ld.row(n)));
        score.total += score.per_point.back();
    }
    return score;
}

WaicReport waic(const Dataset& train, const ChainTrace& trace) {
    if (trace.records.size() < 2) {
        throw ParameterError("waic: need at least 2 kept records for the variance term, have " +
                             std::to_string(trace.records.size()));
    }
    const Eigen::MatrixXd ld = pointwise_log_density(train, trace);
    const auto s = static_cast<double>(ld.cols());
    WaicReport report;
    for (int n = 0; n < train.rows(); ++n) {
        const auto row = ld.row(n);
        report.lppd += log_mean_exp(row);
        const double mean = row.mean();
        report.p_waic += (row.array() - mean).square().sum() / (s - 1.0);
    }
    report.elpd = report.lppd - report.p_waic;
    return report;
}

void split_rows(int n, double test_fraction, std::uint64_t seed, std::vector<int>& train,
                std::vector<int>& test) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ParameterError("test fraction must lie in (0, 1)");
    }
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, 0x5b11));
    std::shuffle(order.begin(), order.end(), rng);
    const int n_test = std::clamp(static_cast<int>(std::lround(test_fraction * n)), 1, n - 1);
    test.assign(order.begin(), order.begin() + n_test);
    train.assign(order.begin() + n_test, order.end());
    std::sort(test.begin(), test.end());
    std::sort(train.begin(), train.end());
}

SelectionTable select_k(const Dataset& data, const SelectionConfig& selection, const FitConfig& fit) {
    if (data.rows() < 2) throw ParameterError("select: need at least 2 rows to split");
    std::vector<int> train_rows, test_rows;
    split_rows(data.rows(), selection.test_fraction, selection.seed, train_rows, test_rows);
    return select_k(data.subset(train_rows), data.subset(test_rows), selection, fit);
}

SelectionTable select_k(const Dataset& train, const Dataset& test, const SelectionConfig& selection,
                        const FitConfig& fit) {
    if (selection.k_values.empty()) throw ParameterError("select: K range is empty");
    for (int k : selection.k_values) {
        if (k < 1) throw ParameterError("select: K values must be >= 1");
    }

    auto run_one = [&](int k) {
        FitConfig cfg = fit;
        cfg.k = k;
        cfg.seed = derive_seed(selection.seed, static_cast<std::uint64_t>(k));
        cfg.progress = nullptr;
        const auto start = std::chrono::steady_clock::now();
        try {
            const ChainTrace trace = run_chain(train, cfg);
            SelectionRow row;
            row.k = k;
            PredictiveScore score = lmppd(test, trace);
            row.lmppd = score.total;
            row.lmppd_points = std::move(score.per_point);
            row.waic_elpd = trace.records.size() >= 2 ? waic(train, trace).elpd
                                                      : std::numeric_limits<double>::quiet_NaN();
            row.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            return row;
        } catch (const Error& e) {
            rethrow_with_prefix(e, "K=" + std::to_string(k) + ": ");
        }
    };

    const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const int threads = std::max(1, selection.threads > 0 ? selection.threads : hw);

    SelectionTable table;
    table.rows.resize(selection.k_values.size());
    for (std::size_t start = 0; start < selection.k_values.size(); start += threads) {
        const std::size_t stop = std::min(selection.k_values.size(), start + threads);
        if (threads == 1) {
            table.rows[start] = run_one(selection.k_values[start]);
            continue;
        }
        std::vector<std::future<SelectionRow>> jobs;
        for (std::size_t i = start; i < stop; ++i) {
            jobs.push_back(std::async(std::launch::async, run_one, selection.k_values[i]));
        }
        for (std::size_t i = start; i < stop; ++i) table.rows[i] = jobs[i - start].get();
    }

    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_row = 0;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (table.rows[i].lmppd > best) {
            best = table.rows[i].lmppd;
            best_row = i;
        }
    }
    table.best_k = table.rows[best_row].k;

    const auto& top = table.rows[best_row].lmppd_points;
    const double n = static_cast<double>(top.size());
    table.parsimonious_k = table.best_k;
    for (auto& row : table.rows) {
        if (n >= 2.0) {
            double mean = 0.0;
            for (std::size_t i = 0; i < top.size(); ++i) mean += top[i] - row.lmppd_points[i];
            mean /= n;
            double ss = 0.0;
            for (std::size_t i = 0; i < top.size(); ++i) {
                const double d = top[i] - row.lmppd_points[i] - mean;
                ss += d * d;
            }
            row.se_diff = std::sqrt(n * ss / (n - 1.0));
        }
        if (row.lmppd >= best - row.se_diff && row.k < table.parsimonious_k) {
            table.parsimonious_k = row.k;
        }
    }
    return table;
}

}  // namespace mixbn

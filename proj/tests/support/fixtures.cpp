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

#include "fixtures.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace mixbn::testing {

namespace {

double normal_pdf(double y, double mean, double var) {
    return std::exp(-0.5 * (y - mean) * (y - mean) / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

Dag dag_from_edges(int m, std::initializer_list<std::pair<int, int>> edges) {
    Dag g(m);
    for (auto [a, b] : edges) g.add_edge(a, b);
    return g;
}

ComponentParams unit_params(const Dag& dag) {
    ComponentParams p;
    p.nodes.resize(dag.size());
    for (int i = 0; i < dag.size(); ++i) {
        p.nodes[i].coefficients = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dag.parents(i).size()));
    }
    return p;
}

/// One-node, one-component trace with (intercept, variance) per record.
ChainTrace one_node_trace(const std::vector<std::pair<double, double>>& draws) {
    ChainTrace trace;
    trace.k = 1;
    trace.nodes = 1;
    trace.covariates = 0;
    for (auto [mean, var] : draws) {
        TraceRecord r;
        r.beta = GatingCoefficients(1, 0);
        r.graphs = {Dag(1)};
        ComponentParams p;
        p.nodes.resize(1);
        p.nodes[0].intercept = mean;
        p.nodes[0].variance = var;
        r.params = {p};
        trace.records.push_back(r);
    }
    return trace;
}

Dataset one_node_data(const std::vector<double>& ys) {
    Dataset d;
    d.y.resize(static_cast<Eigen::Index>(ys.size()), 1);
    for (std::size_t i = 0; i < ys.size(); ++i) d.y(static_cast<Eigen::Index>(i), 0) = ys[i];
    d.x.resize(static_cast<Eigen::Index>(ys.size()), 0);
    d.y_names = {"y1"};
    return d;
}

}  // namespace

ChainTrace trace_with_graphs(int nodes, const std::vector<std::vector<Dag>>& graphs) {
    ChainTrace trace;
    trace.k = graphs.empty() ? 1 : static_cast<int>(graphs.front().size());
    trace.nodes = nodes;
    for (const auto& gs : graphs) {
        TraceRecord r;
        r.beta = GatingCoefficients(trace.k, 0);
        r.graphs = gs;
        for (const Dag& g : gs) r.params.push_back(unit_params(g));
        trace.records.push_back(r);
    }
    return trace;
}

std::vector<FixtureCheck> metric_fixture_checks() {
    std::vector<FixtureCheck> checks;

    // MSHD. Truth: T1 empty, T2 chain 0->1->2 (CPDAG 0-1-2 undirected).
    // Fitted component 1 visits one edge, the chain and the complete DAG;
    // component 2 always sits on the chain.
    //   1->T1: SHD 1, 2, 3 (mean 2); 2->T2: 0; sum 2.
    //   1->T2: SHD 1, 0, 1 (mean 2/3); 2->T1: 2; sum 8/3.
    const Dag empty(3);
    const Dag chain = dag_from_edges(3, {{0, 1}, {1, 2}});
    const Dag one = dag_from_edges(3, {{0, 1}});
    const Dag complete = dag_from_edges(3, {{0, 1}, {0, 2}, {1, 2}});
    {
        const ChainTrace t = trace_with_graphs(3, {{one, chain}, {chain, chain}, {complete, chain}});
        const MshdReport r = mshd(t, {empty, chain});
        checks.push_back({"mshd minimum over labellings", r.value, 2.0});
        double other = 0.0;
        for (std::size_t l = 0; l < r.labellings.size(); ++l) {
            if (l != r.best) other = r.sums[l];
        }
        checks.push_back({"mshd swapped labelling sum", other, 8.0 / 3.0});
        checks.push_back({"mshd mean_shd(1, T1)", r.mean_shd(0, 0), 2.0});
        checks.push_back({"mshd mean_shd(1, T2)", r.mean_shd(0, 1), 2.0 / 3.0});
        checks.push_back({"mshd mean_shd(2, T1)", r.mean_shd(1, 0), 2.0});
        checks.push_back({"mshd mean_shd(2, T2)", r.mean_shd(1, 1), 0.0});

        const ChainTrace swapped =
            trace_with_graphs(3, {{chain, one}, {chain, chain}, {chain, complete}});
        checks.push_back({"mshd label-swapped trace", mshd(swapped, {empty, chain}).value, 2.0});
        const ChainTrace exact = trace_with_graphs(3, {{chain, empty}, {chain, empty}});
        checks.push_back({"mshd trace equal to truth", mshd(exact, {empty, chain}).value, 0.0});
    }

    // LMPPD on a one-node model with three draws: per point log((p1 + p2 + p3) / 3).
    {
        const std::vector<std::pair<double, double>> draws = {{0.0, 1.0}, {1.0, 2.0}, {-0.5, 0.5}};
        const std::vector<double> ys = {0.3, -1.2, 2.0};
        const PredictiveScore s = lmppd(one_node_data(ys), one_node_trace(draws));
        double expected = 0.0;
        for (double y : ys) {
            double sum = 0.0;
            for (auto [m, v] : draws) sum += normal_pdf(y, m, v);
            expected += std::log(sum / 3.0);
        }
        checks.push_back({"lmppd three draws, one node", s.total, expected});
        checks.push_back({"lmppd first point", s.per_point[0],
                          std::log((normal_pdf(0.3, 0.0, 1.0) + normal_pdf(0.3, 1.0, 2.0) +
                                    normal_pdf(0.3, -0.5, 0.5)) / 3.0)});
        const PredictiveScore single = lmppd(one_node_data({0.7}), one_node_trace({{1.0, 2.0}}));
        checks.push_back({"lmppd single draw", single.total, std::log(normal_pdf(0.7, 1.0, 2.0))});
        const PredictiveScore repeated =
            lmppd(one_node_data({0.7}), one_node_trace({{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}}));
        checks.push_back({"lmppd identical draws", repeated.total, single.total});
        const PredictiveScore none = lmppd(one_node_data({}), one_node_trace({{1.0, 2.0}}));
        checks.push_back({"lmppd empty test set", none.total, 0.0});
    }

    // WAIC with two draws and two points:
    //   lppd_i = log((p_i1 + p_i2) / 2), p_waic_i = (l_i1 - l_i2)^2 / 2.
    {
        const std::vector<std::pair<double, double>> draws = {{0.0, 1.0}, {0.5, 1.5}};
        const std::vector<double> ys = {0.2, -0.4};
        const WaicReport w = waic(one_node_data(ys), one_node_trace(draws));
        double lppd = 0.0;
        double pw = 0.0;
        for (double y : ys) {
            const double l1 = std::log(normal_pdf(y, 0.0, 1.0));
            const double l2 = std::log(normal_pdf(y, 0.5, 1.5));
            lppd += std::log(0.5 * (std::exp(l1) + std::exp(l2)));
            pw += 0.5 * (l1 - l2) * (l1 - l2);
        }
        checks.push_back({"waic lppd", w.lppd, lppd});
        checks.push_back({"waic p_waic", w.p_waic, pw});
        checks.push_back({"waic elpd", w.elpd, lppd - pw});
        checks.push_back({"waic deviance", w.deviance(), -2.0 * (lppd - pw)});
        const WaicReport flat = waic(one_node_data(ys), one_node_trace({{0.0, 1.0}, {0.0, 1.0}}));
        checks.push_back({"waic identical draws p_waic", flat.p_waic, 0.0});
        checks.push_back({"waic identical draws elpd = lppd", flat.elpd, flat.lppd});
    }
    return checks;
}

std::string equivalence_key(const Dag& g) {
    const int m = g.size();
    std::string key;
    for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) key.push_back(g.adjacent(a, b) ? '1' : '0');
    }
    key.push_back('|');
    for (int c = 0; c < m; ++c) {
        for (int a = 0; a < m; ++a) {
            for (int b = a + 1; b < m; ++b) {
                if (g.has_edge(a, c) && g.has_edge(b, c) && !g.adjacent(a, b)) {
                    key += std::to_string(a) + ">" + std::to_string(c) + "<" + std::to_string(b) + ";";
                }
            }
        }
    }
    return key;
}

double max_equivalence_gap(int m, const Eigen::MatrixXd& data, const NodePrior& prior) {
    std::map<std::string, std::vector<double>> classes;
    for (const Dag& g : enumerate_dags(m)) classes[equivalence_key(g)].push_back(graph_score(g, data, prior));
    double gap = 0.0;
    for (const auto& [key, scores] : classes) {
        for (double s : scores) gap = std::max(gap, std::abs(s - scores.front()));
    }
    return gap;
}

}  // namespace mixbn::testing

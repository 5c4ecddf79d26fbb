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

#include "mixbn/structure.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "mixbn/error.hpp"

namespace mixbn {

GraphPosteriorTarget::GraphPosteriorTarget(ScatterStats stats, NodePrior prior)
    : stats_(std::move(stats)), prior_(prior) {}

GraphPosteriorTarget GraphPosteriorTarget::empty(int m, NodePrior prior) {
    return GraphPosteriorTarget(ScatterStats(m), prior);
}

double GraphPosteriorTarget::family_score(int node, NodeMask parents) const {
    if (stats_.count() <= 0.0) return 0.0;
    const std::uint32_t key = (static_cast<std::uint32_t>(node) << 16) | parents;
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const double value = mixbn::family_score(stats_, node, parents, prior_);
    cache_.emplace(key, value);
    return value;
}

double GraphPosteriorTarget::score(const Dag& dag) const {
    double total = 0.0;
    for (int i = 0; i < dag.size(); ++i) total += family_score(i, dag.parent_mask(i));
    return total;
}

void StructureSamplerConfig::validate() const {
    if (p_add <= 0.0 || p_delete <= 0.0 || p_reverse < 0.0) {
        throw ParameterError("structure sampler: add/delete probabilities must be positive and "
                             "reverse non-negative");
    }
    if (std::abs(p_add + p_delete + p_reverse - 1.0) > 1e-9) {
        throw ParameterError("structure sampler: move probabilities must sum to 1");
    }
    if (iterations < 1) throw ParameterError("structure sampler: iterations must be >= 1");
}

namespace {

int add_candidates(int m, int edges) { return m * (m - 1) - 2 * edges; }

}  // namespace

bool propose_move(const Dag& current, const StructureSamplerConfig& config, Rng& rng,
                  EdgeMove& move) {
    const int m = current.size();
    const double u = uniform01(rng);
    if (u < config.p_add) {
        move.type = MoveType::kAdd;
    } else if (u < config.p_add + config.p_delete) {
        move.type = MoveType::kDelete;
    } else {
        move.type = MoveType::kReverse;
    }

    const int edges = current.edge_count();
    if (move.type == MoveType::kAdd) {
        const int count = add_candidates(m, edges);
        if (count == 0) return false;
        int pick = uniform_index(rng, count);
        for (int from = 0; from < m; ++from) {
            for (int to = 0; to < m; ++to) {
                if (from == to || current.adjacent(from, to)) continue;
                if (pick-- == 0) {
                    move.from = from;
                    move.to = to;
                    return true;
                }
            }
        }
        return false;
    }
    if (edges == 0) return false;
    const auto edge_list = current.edges();
    const auto& e = edge_list[static_cast<std::size_t>(uniform_index(rng, edges))];
    move.from = e.first;
    move.to = e.second;
    return true;
}

double move_log_proposal_ratio(const EdgeMove& move, int m, int edges,
                               const StructureSamplerConfig& config) {
    switch (move.type) {
        case MoveType::kAdd:
            // forward: p_add / C_add(G); backward: delete one of E+1 edges
            return std::log(config.p_delete / (edges + 1)) -
                   std::log(config.p_add / add_candidates(m, edges));
        case MoveType::kDelete:
            return std::log(config.p_add / add_candidates(m, edges - 1)) -
                   std::log(config.p_delete / edges);
        case MoveType::kReverse:
            return 0.0;
    }
    return 0.0;
}

Dag apply_move(const Dag& current, double& current_score, const EdgeMove& move,
               const GraphPosteriorTarget& target, const StructureSamplerConfig& config,
               double log_uniform, MoveStats* stats) {
    if (stats) ++stats->proposed;
    const NodeMask from_bit = NodeMask{1} << move.from;
    const NodeMask to_bit = NodeMask{1} << move.to;

    double delta = 0.0;
    Dag proposal = current;
    switch (move.type) {
        case MoveType::kAdd: {
            if (current.adjacent(move.from, move.to) ||
                current.add_would_create_cycle(move.from, move.to)) {
                if (stats) ++stats->rejected_cyclic;
                return current;
            }
            const NodeMask old_pa = current.parent_mask(move.to);
            delta = target.family_score(move.to, old_pa | from_bit) -
                    target.family_score(move.to, old_pa);
            proposal.add_edge(move.from, move.to);
            break;
        }
        case MoveType::kDelete: {
            const NodeMask old_pa = current.parent_mask(move.to);
            delta = target.family_score(move.to, old_pa & ~from_bit) -
                    target.family_score(move.to, old_pa);
            proposal.remove_edge(move.from, move.to);
            break;
        }
        case MoveType::kReverse: {
            if (current.reverse_would_create_cycle(move.from, move.to)) {
                if (stats) ++stats->rejected_cyclic;
                return current;
            }
            const NodeMask pa_to = current.parent_mask(move.to);
            const NodeMask pa_from = current.parent_mask(move.from);
            delta = target.family_score(move.to, pa_to & ~from_bit) -
                    target.family_score(move.to, pa_to) +
                    target.family_score(move.from, pa_from | to_bit) -
                    target.family_score(move.from, pa_from);
            proposal.reverse_edge(move.from, move.to);
            break;
        }
    }

    const double log_accept =
        delta + move_log_proposal_ratio(move, current.size(), current.edge_count(), config);
    if (log_uniform < log_accept) {
        current_score += delta;
        if (stats) ++stats->accepted;
        return proposal;
    }
    return current;
}

Dag structure_mcmc_step(const Dag& current, const GraphPosteriorTarget& target, Rng& rng,
                        const StructureSamplerConfig& config, MoveStats* stats) {
    double score = 0.0;
    EdgeMove move;
    if (!propose_move(current, config, rng, move)) {
        if (stats) ++stats->proposed;
        return current;
    }
    return apply_move(current, score, move, target, config, std::log(uniform01(rng)), stats);
}

Dag run_structure_mcmc(const Dag& start, const GraphPosteriorTarget& target, Rng& rng,
                       const StructureSamplerConfig& config, MoveStats* stats) {
    Dag g = start;
    for (int it = 0; it < config.iterations; ++it) g = structure_mcmc_step(g, target, rng, config, stats);
    return g;
}

Dag sample_graph_given_assignments(int k, const Dag& current, const Eigen::MatrixXd& data,
                                   std::span<const int> assignments,
                                   const StructureSamplerConfig& config, Rng& rng,
                                   MoveStats* stats, NodePrior prior) {
    if (static_cast<Eigen::Index>(assignments.size()) != data.rows()) {
        throw ParameterError("sample_graph_given_assignments: " +
                             std::to_string(assignments.size()) + " assignments for " +
                             std::to_string(data.rows()) + " rows");
    }
    const GraphPosteriorTarget target = component_target(data, assignments, k, prior);
    return run_structure_mcmc(current, target, rng, config, stats);
}

std::map<Dag, double> exact_graph_posterior(const GraphPosteriorTarget& target) {
    const int m = target.nodes();
    if (m > 5) {
        throw ParameterError("exact_graph_posterior: refusing to enumerate DAGs on m=" +
                             std::to_string(m) + " > 5 nodes");
    }
    const auto dags = enumerate_dags(m);
    std::vector<double> log_w;
    log_w.reserve(dags.size());
    double max_w = -std::numeric_limits<double>::infinity();
    for (const auto& g : dags) {
        log_w.push_back(target.score(g));
        max_w = std::max(max_w, log_w.back());
    }
    double total = 0.0;
    for (double& w : log_w) {
        w = std::exp(w - max_w);
        total += w;
    }
    std::map<Dag, double> out;
    for (std::size_t i = 0; i < dags.size(); ++i) out.emplace(dags[i], log_w[i] / total);
    return out;
}

GraphPosteriorTarget component_target(const Eigen::MatrixXd& data, std::span<const int> assignments,
                                      int k, NodePrior prior) {
    ScatterStats stats(static_cast<int>(data.cols()));
    for (std::size_t n = 0; n < assignments.size(); ++n) {
        if (assignments[n] == k) stats.add(data.row(static_cast<Eigen::Index>(n)));
    }
    return GraphPosteriorTarget(std::move(stats), prior);
}

}  // namespace mixbn

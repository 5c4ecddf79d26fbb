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

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "mixbn/gbn.hpp"
#include "mixbn/graphs.hpp"
#include "mixbn/random.hpp"

namespace mixbn {

/// p(G | rows) ∝ exp(graph_score(G, rows)) under the uniform DAG prior.
///
/// Holds the scatter statistics of the assigned rows and memoizes family
/// scores by (node, parent set). The cache lives and dies with the target,
/// so a new row subset means a new target.
class GraphPosteriorTarget {
public:
    GraphPosteriorTarget(ScatterStats stats, NodePrior prior = {});
    /// Prior-only target on m nodes.
    static GraphPosteriorTarget empty(int m, NodePrior prior = {});

    int nodes() const { return stats_.nodes(); }
    double row_count() const { return stats_.count(); }

    double family_score(int node, NodeMask parents) const;
    double score(const Dag& dag) const;

    const ScatterStats& stats() const { return stats_; }
    const NodePrior& prior() const { return prior_; }

private:
    ScatterStats stats_;
    NodePrior prior_;
    mutable std::unordered_map<std::uint32_t, double> cache_;
};

enum class MoveType { kAdd, kDelete, kReverse };

struct EdgeMove {
    MoveType type = MoveType::kAdd;
    int from = 0;
    int to = 0;
};

struct StructureSamplerConfig {
    double p_add = 1.0 / 3.0;
    double p_delete = 1.0 / 3.0;
    double p_reverse = 1.0 / 3.0;
    int iterations = 50;

    /// Throws ParameterError unless the probabilities are a distribution with
    /// add and delete both positive, and iterations >= 1.
    void validate() const;
};

struct MoveStats {
    std::int64_t proposed = 0;
    std::int64_t accepted = 0;
    std::int64_t rejected_cyclic = 0;

    double acceptance_rate() const {
        return proposed == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
    }
    MoveStats& operator+=(const MoveStats& o) {
        proposed += o.proposed;
        accepted += o.accepted;
        rejected_cyclic += o.rejected_cyclic;
        return *this;
    }
};

/// Draws a single-edge move: type by config probabilities, then uniformly
/// among candidate pairs of that type (cycle checks are deferred). Returns
/// false when the chosen type has no candidates.
bool propose_move(const Dag& current, const StructureSamplerConfig& config, Rng& rng,
                  EdgeMove& move);

/// log q(G|G') - log q(G'|G) for a move out of a graph with `edges` edges.
double move_log_proposal_ratio(const EdgeMove& move, int m, int edges,
                         const StructureSamplerConfig& config);

/// Metropolis-Hastings decision for a given move and uniform variate.
/// Cycle-creating moves return `current` unchanged. `current_score` is kept
/// up to date incrementally (only the touched families are rescored).
Dag apply_move(const Dag& current, double& current_score, const EdgeMove& move,
               const GraphPosteriorTarget& target, const StructureSamplerConfig& config,
               double log_uniform, MoveStats* stats = nullptr);

/// One single-edge Metropolis-Hastings step targeting `target`.
Dag structure_mcmc_step(const Dag& current, const GraphPosteriorTarget& target, Rng& rng,
                        const StructureSamplerConfig& config = {}, MoveStats* stats = nullptr);

/// Runs `config.iterations` steps from `start`.
Dag run_structure_mcmc(const Dag& start, const GraphPosteriorTarget& target, Rng& rng,
                       const StructureSamplerConfig& config, MoveStats* stats = nullptr);

/// Runs `config.iterations` steps on the rows assigned to component k
/// (zero-based), starting from `current`. An empty component samples the prior.
Dag sample_graph_given_assignments(int k, const Dag& current, const Eigen::MatrixXd& data,
                                   std::span<const int> assignments,
                                   const StructureSamplerConfig& config, Rng& rng,
                                   MoveStats* stats = nullptr, NodePrior prior = {});

/// Exact posterior by enumerating every DAG on m <= 5 nodes.
std::map<Dag, double> exact_graph_posterior(const GraphPosteriorTarget& target);

/// Rows of `data` whose assignment equals k, as a posterior target.
GraphPosteriorTarget component_target(const Eigen::MatrixXd& data, std::span<const int> assignments,
                                      int k, NodePrior prior = {});

}  // namespace mixbn

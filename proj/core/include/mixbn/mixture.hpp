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
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "mixbn/dataset.hpp"
#include "mixbn/gating.hpp"
#include "mixbn/gbn.hpp"
#include "mixbn/graphs.hpp"
#include "mixbn/random.hpp"
#include "mixbn/structure.hpp"

namespace mixbn {

/// How z_n is resampled given graphs and gating coefficients.
enum class AssignmentUpdate {
    /// Exact collapsed conditional: pi_k(x_n) * p(y_n | rows currently in k without n, G_k).
    kCollapsed,
    /// pi_k(x_n) * p(y_n | G_k), the single-observation marginal under the prior.
    kPerObservation,
};

struct FitConfig {
    int k = 2;
    int iterations = 1500;
    std::optional<int> burn_in;  // defaults to iterations / 2
    int thin = 5;
    StructureSamplerConfig structure;
    double gating_scale = 100.0;
    std::uint64_t seed = 0;
    AssignmentUpdate assignment_update = AssignmentUpdate::kCollapsed;
    NodePrior prior;
    /// Called after every sweep with the iteration stamp and joint log-score.
    std::function<void(int, double)> progress;

    int resolved_burn_in() const { return burn_in.value_or(iterations / 2); }
    void validate() const;
};

/// Everything one Gibbs sweep reads and writes. Labels are zero-based.
struct ChainState {
    int iteration = 0;
    std::vector<int> z;
    GatingCoefficients beta;
    std::vector<Dag> graphs;
    std::vector<ComponentParams> params;
    double joint_log_score = 0.0;
    std::vector<MoveStats> move_stats;  // cumulative, per component
};

struct TraceRecord {
    int iteration = 0;
    std::vector<int> z;
    GatingCoefficients beta;
    std::vector<Dag> graphs;
    std::vector<ComponentParams> params;
    double joint_log_score = 0.0;

    friend bool operator==(const TraceRecord&, const TraceRecord&);
};

struct ChainTrace {
    int k = 1;
    int nodes = 0;
    int covariates = 0;
    int observations = 0;
    std::uint64_t seed = 0;
    int iterations = 0;
    int burn_in = 0;
    int thin = 1;
    std::vector<TraceRecord> records;
    std::vector<double> score_series;  // one per sweep, burn-in included
    std::vector<MoveStats> move_stats;

    friend bool operator==(const ChainTrace&, const ChainTrace&);
};

/// log sum_k pi_k(x) p(y | G_k, theta_k).
double mixture_logpdf(const Eigen::Ref<const Eigen::VectorXd>& y,
                      const Eigen::Ref<const Eigen::VectorXd>& x, const std::vector<Dag>& graphs,
                      const std::vector<ComponentParams>& params, const GatingCoefficients& beta);

/// Uniform random labels, zero gating coefficients, empty graphs, prior parameter draws.
ChainState initial_state(const Dataset& data, const FitConfig& config, Rng& rng);

/// log p(Z, G, beta | D) up to an additive constant, with node parameters integrated out.
double joint_log_score(const ChainState& state, const Dataset& data, const FitConfig& config);

/// One pass of: assignments, gating coefficients, per-component structures,
/// then a conjugate parameter draw per component.
ChainState gibbs_sweep(const ChainState& state, const Dataset& data, const FitConfig& config,
                       Rng& rng);

ChainTrace run_chain(const Dataset& data, const FitConfig& config);

/// Fraction of kept records in which component k has edge j -> i, as an M x M matrix.
Eigen::MatrixXd edge_frequencies(const ChainTrace& trace, int k);

/// Most frequent graph of component k across kept records.
Dag modal_graph(const ChainTrace& trace, int k);

}  // namespace mixbn

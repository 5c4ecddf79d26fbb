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

#include "mixbn/mixture.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "mixbn/error.hpp"

namespace mixbn {

bool operator==(const TraceRecord& a, const TraceRecord& b) {
    if (a.iteration != b.iteration || a.z != b.z || !(a.beta == b.beta) || a.graphs != b.graphs ||
        a.joint_log_score != b.joint_log_score || a.params.size() != b.params.size()) {
        return false;
    }
    for (std::size_t k = 0; k < a.params.size(); ++k) {
        const auto& pa = a.params[k].nodes;
        const auto& pb = b.params[k].nodes;
        if (pa.size() != pb.size()) return false;
        for (std::size_t i = 0; i < pa.size(); ++i) {
            if (pa[i].intercept != pb[i].intercept || pa[i].variance != pb[i].variance ||
                pa[i].coefficients.size() != pb[i].coefficients.size() ||
                pa[i].coefficients != pb[i].coefficients) {
                return false;
            }
        }
    }
    return true;
}

bool operator==(const ChainTrace& a, const ChainTrace& b) {
    if (a.move_stats.size() != b.move_stats.size()) return false;
    for (std::size_t k = 0; k < a.move_stats.size(); ++k) {
        if (a.move_stats[k].proposed != b.move_stats[k].proposed ||
            a.move_stats[k].accepted != b.move_stats[k].accepted ||
            a.move_stats[k].rejected_cyclic != b.move_stats[k].rejected_cyclic) {
            return false;
        }
    }
    return a.k == b.k && a.nodes == b.nodes && a.covariates == b.covariates &&
           a.observations == b.observations && a.seed == b.seed && a.iterations == b.iterations &&
           a.burn_in == b.burn_in && a.thin == b.thin && a.records == b.records &&
           a.score_series == b.score_series;
}

void FitConfig::validate() const {
    if (k < 1) throw ParameterError("fit: K must be >= 1");
    if (iterations < 0) throw ParameterError("fit: iterations must be >= 0");
    const int b = resolved_burn_in();
    if (b < 0 || b > iterations) {
        throw ParameterError("fit: burn-in " + std::to_string(b) + " must lie in [0, iterations]");
    }
    if (thin < 1) throw ParameterError("fit: thin must be >= 1");
    if (!(gating_scale > 0.0)) throw ParameterError("fit: gating prior scale c must be positive");
    structure.validate();
}

namespace {

FamilyVector design_row(const Eigen::Ref<const Eigen::RowVectorXd>& y, NodeMask parents) {
    FamilyVector row(1 + std::popcount(parents));
    row(0) = 1.0;
    int k = 1;
    for (NodeMask f = parents; f; f &= f - 1) row(k++) = y(std::countr_zero(f));
    return row;
}

/// Scatter statistics of one component plus the node posteriors they imply
/// under the component's current graph.
struct ComponentCache {
    ScatterStats stats;
    std::vector<NodeMask> masks;
    std::vector<FamilyPosterior> families;

    ComponentCache(const Dag& g, ScatterStats s) : stats(std::move(s)), masks(g.parent_masks()) {}

    void refresh(const NodePrior& prior) {
        families.clear();
        families.reserve(masks.size());
        for (std::size_t i = 0; i < masks.size(); ++i) {
            families.push_back(family_posterior(stats.family(static_cast<int>(i), masks[i]),
                                                prior.for_parent_count(std::popcount(masks[i]))));
        }
    }

    double log_predictive(const Eigen::Ref<const Eigen::RowVectorXd>& y) const {
        double total = 0.0;
        for (std::size_t i = 0; i < masks.size(); ++i) {
            total += families[i].log_predictive(design_row(y, masks[i]),
                                                y(static_cast<Eigen::Index>(i)));
        }
        return total;
    }
};

std::vector<ComponentCache> build_caches(const Dataset& data, const std::vector<int>& z,
                                         const std::vector<Dag>& graphs, const NodePrior& prior) {
    std::vector<ComponentCache> caches;
    caches.reserve(graphs.size());
    for (const auto& g : graphs) caches.emplace_back(g, ScatterStats(data.nodes()));
    for (int n = 0; n < data.rows(); ++n) caches[z[n]].stats.add(data.y.row(n));
    for (auto& c : caches) c.refresh(prior);
    return caches;
}

std::vector<int> collapsed_assignments(const ChainState& state, const Dataset& data,
                                       const FitConfig& config, Rng& rng) {
    const int k_classes = config.k;
    std::vector<int> z = state.z;
    auto caches = build_caches(data, z, state.graphs, config.prior);
    std::vector<double> w(static_cast<std::size_t>(k_classes));
    for (int n = 0; n < data.rows(); ++n) {
        const auto y = data.y.row(n);
        const int old = z[n];
        std::vector<FamilyPosterior> saved = caches[old].families;
        caches[old].stats.remove(y);
        caches[old].refresh(config.prior);

        const auto log_pi = log_mixing_probs(data.x.row(n).transpose(), state.beta);
        for (int k = 0; k < k_classes; ++k) {
            w[k] = log_pi[k] + caches[k].log_predictive(y);
            if (!std::isfinite(w[k])) {
                throw NumericError("update_assignments: non-finite log-weight for observation " +
                                   std::to_string(n) + ", component " + std::to_string(k));
            }
        }
        const int next = sample_from_log_weights(w, rng);
        caches[next].stats.add(y);
        if (next == old) {
            caches[old].families = std::move(saved);
        } else {
            caches[next].refresh(config.prior);
        }
        z[n] = next;
    }
    return z;
}

/// log p(y_n | G_k) for every (n, k) under the node prior alone.
Eigen::MatrixXd per_observation_loglik(const Dataset& data, const std::vector<Dag>& graphs,
                                       const NodePrior& prior) {
    Eigen::MatrixXd out(data.rows(), static_cast<Eigen::Index>(graphs.size()));
    for (std::size_t k = 0; k < graphs.size(); ++k) {
        ComponentCache prior_only(graphs[k], ScatterStats(data.nodes()));
        prior_only.refresh(prior);
        for (int n = 0; n < data.rows(); ++n) {
            out(n, static_cast<Eigen::Index>(k)) = prior_only.log_predictive(data.y.row(n));
        }
    }
    return out;
}

}  // namespace

double mixture_logpdf(const Eigen::Ref<const Eigen::VectorXd>& y,
                      const Eigen::Ref<const Eigen::VectorXd>& x, const std::vector<Dag>& graphs,
                      const std::vector<ComponentParams>& params, const GatingCoefficients& beta) {
    const int k_classes = beta.classes();
    if (static_cast<int>(graphs.size()) != k_classes ||
        static_cast<int>(params.size()) != k_classes) {
        throw ParameterError("mixture_logpdf: expected " + std::to_string(k_classes) +
                             " graphs and parameter sets");
    }
    for (const auto& g : graphs) {
        if (g.size() != y.size()) {
            throw ParameterError("mixture_logpdf: observation length " + std::to_string(y.size()) +
                                 " != graph node count " + std::to_string(g.size()));
        }
    }
    const auto log_pi = log_mixing_probs(x, beta);
    double terms[64];
    std::vector<double> spill;
    double* t = terms;
    if (k_classes > 64) {
        spill.resize(static_cast<std::size_t>(k_classes));
        t = spill.data();
    }
    double max_t = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < k_classes; ++k) {
        t[k] = log_pi[k] + component_logpdf(graphs[k], params[k], y);
        max_t = std::max(max_t, t[k]);
    }
    if (!std::isfinite(max_t)) return max_t;
    double sum = 0.0;
    for (int k = 0; k < k_classes; ++k) sum += std::exp(t[k] - max_t);
    return max_t + std::log(sum);
}

ChainState initial_state(const Dataset& data, const FitConfig& config, Rng& rng) {
    ChainState state;
    state.z.resize(static_cast<std::size_t>(data.rows()));
    for (int& z : state.z) z = uniform_index(rng, config.k);
    state.beta = GatingCoefficients(config.k, data.covariates());
    state.graphs.assign(static_cast<std::size_t>(config.k), Dag(data.nodes()));
    state.move_stats.assign(static_cast<std::size_t>(config.k), MoveStats{});
    for (int k = 0; k < config.k; ++k) {
        const auto target = component_target(data.y, state.z, k, config.prior);
        state.params.push_back(sample_posterior_params(state.graphs[k], target.stats(), rng,
                                                       config.prior));
    }
    state.joint_log_score = joint_log_score(state, data, config);
    return state;
}

double joint_log_score(const ChainState& state, const Dataset& data, const FitConfig& config) {
    double total = gating_log_prior(state.beta, config.gating_scale);
    for (int n = 0; n < data.rows(); ++n) {
        total += log_mixing_probs(data.x.row(n).transpose(), state.beta)[state.z[n]];
    }
    if (config.assignment_update == AssignmentUpdate::kCollapsed) {
        for (int k = 0; k < config.k; ++k) {
            total += component_target(data.y, state.z, k, config.prior).score(state.graphs[k]);
        }
    } else {
        const auto ll = per_observation_loglik(data, state.graphs, config.prior);
        for (int n = 0; n < data.rows(); ++n) total += ll(n, state.z[n]);
    }
    return total;
}

ChainState gibbs_sweep(const ChainState& state, const Dataset& data, const FitConfig& config,
                       Rng& rng) {
    ChainState next;
    next.iteration = state.iteration + 1;
    const std::string where = " (sweep " + std::to_string(next.iteration) + ")";
    try {
        if (config.k == 1) {
            next.z.assign(state.z.size(), 0);
        } else if (config.assignment_update == AssignmentUpdate::kCollapsed) {
            next.z = collapsed_assignments(state, data, config, rng);
        } else {
            const auto ll = per_observation_loglik(data, state.graphs, config.prior);
            next.z = update_assignments(ll, data.x, state.beta, rng);
        }

        next.beta = update_gating(next.z, data.x, state.beta, config.gating_scale, rng);

        // Independent per-component streams so the K updates could run in any order.
        const std::uint64_t sweep_seed = rng();
        next.graphs.resize(state.graphs.size());
        next.params.resize(state.graphs.size());
        next.move_stats = state.move_stats;
        for (int k = 0; k < config.k; ++k) {
            Rng component_rng(derive_seed(sweep_seed, static_cast<std::uint64_t>(k)));
            const auto target = component_target(data.y, next.z, k, config.prior);
            next.graphs[k] = run_structure_mcmc(state.graphs[k], target, component_rng,
                                                config.structure, &next.move_stats[k]);
            next.params[k] = sample_posterior_params(next.graphs[k], target.stats(),
                                                     component_rng, config.prior);
        }
        next.joint_log_score = joint_log_score(next, data, config);
    } catch (const NumericError& e) {
        throw NumericError(e.what() + where);
    } catch (const ParameterError& e) {
        throw ParameterError(e.what() + where);
    }
    if (!std::isfinite(next.joint_log_score)) {
        throw NumericError("joint log-score is not finite at iteration " +
                           std::to_string(next.iteration));
    }
    return next;
}

ChainTrace run_chain(const Dataset& data, const FitConfig& config) {
    config.validate();
    data.validate();
    if (data.rows() < 1) throw ParameterError("fit: dataset has no rows");
    if (data.nodes() > Dag::kMaxNodes) {
        throw ParameterError("fit: at most " + std::to_string(Dag::kMaxNodes) +
                             " modifiable variables are supported");
    }

    Rng rng(config.seed);
    ChainTrace trace;
    trace.k = config.k;
    trace.nodes = data.nodes();
    trace.covariates = data.covariates();
    trace.observations = data.rows();
    trace.seed = config.seed;
    trace.iterations = config.iterations;
    trace.burn_in = config.resolved_burn_in();
    trace.thin = config.thin;
    trace.score_series.reserve(static_cast<std::size_t>(config.iterations));

    ChainState state = initial_state(data, config, rng);
    for (int t = 1; t <= config.iterations; ++t) {
        state = gibbs_sweep(state, data, config, rng);
        trace.score_series.push_back(state.joint_log_score);
        if (config.progress) config.progress(t, state.joint_log_score);
        if (t > trace.burn_in && (t - trace.burn_in) % trace.thin == 0) {
            trace.records.push_back(TraceRecord{state.iteration, state.z, state.beta, state.graphs,
                                                state.params, state.joint_log_score});
        }
    }
    trace.move_stats = state.move_stats;
    return trace;
}

Eigen::MatrixXd edge_frequencies(const ChainTrace& trace, int k) {
    if (k < 0 || k >= trace.k) throw ParameterError("edge_frequencies: component out of range");
    Eigen::MatrixXd freq = Eigen::MatrixXd::Zero(trace.nodes, trace.nodes);
    if (trace.records.empty()) return freq;
    for (const auto& r : trace.records) {
        for (auto [from, to] : r.graphs[k].edges()) freq(from, to) += 1.0;
    }
    return freq / static_cast<double>(trace.records.size());
}

Dag modal_graph(const ChainTrace& trace, int k) {
    if (trace.records.empty()) throw ParameterError("modal_graph: trace has no records");
    std::map<Dag, int> counts;
    for (const auto& r : trace.records) ++counts[r.graphs[k]];
    return std::max_element(counts.begin(), counts.end(),
                            [](const auto& a, const auto& b) { return a.second < b.second; })
        ->first;
}

}  // namespace mixbn

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

#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "mixbn/graphs.hpp"
#include "mixbn/random.hpp"

namespace mixbn {

/// Largest family (intercept + parents) handled by the small-matrix kernels.
inline constexpr int kMaxFamily = Dag::kMaxNodes + 1;

using FamilyMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxFamily, kMaxFamily>;
using FamilyVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxFamily, 1>;

/// Linear-Gaussian conditional y_i | pa ~ N(intercept + coefficients . y_pa, variance).
struct NodeParams {
    double intercept = 0.0;
    Eigen::VectorXd coefficients;  // ordered like Dag::parents(i)
    double variance = 1.0;
};

struct ComponentParams {
    std::vector<NodeParams> nodes;
};

/// Joint multivariate normal implied by a Gaussian BN.
struct MvnForm {
    Eigen::VectorXd mean;
    Eigen::MatrixXd precision;
};

/// Normal-inverse-gamma prior for one node's regression:
/// (intercept, coefficients) | v ~ N(0, v * coef_scale * diag(intercept_scale, 1, ..., 1)),
/// v ~ IG(shape, rate).
struct NigHyper {
    double shape = 1.5;
    double rate = 0.5;
    double coef_scale = 1.0;
    double intercept_scale = 1.0;
};

/// Per-node prior family; shape grows with the parent count. Graph scores
/// are score-equivalent when rate * coef_scale = 1/2, as with the defaults.
struct NodePrior {
    double base_shape = 1.5;
    double shape_per_parent = 0.5;
    double rate = 0.5;
    double coef_scale = 1.0;
    double intercept_scale = 1.0;

    NigHyper for_parent_count(int parent_count) const {
        return {base_shape + shape_per_parent * parent_count, rate, coef_scale, intercept_scale};
    }
};

/// Sufficient statistics of one node regression: design X = [1, y_pa], response y.
struct FamilyStats {
    double n = 0.0;
    FamilyMatrix xtx;
    FamilyVector xty;
    double yty = 0.0;
};

/// Conjugate posterior of one node regression.
struct FamilyPosterior {
    Eigen::LLT<FamilyMatrix> precision_chol;  // of X'X plus the prior precision
    FamilyVector mean;
    double shape = 0.0;
    double rate = 0.0;
    double log_marginal = 0.0;

    /// log p(y_new | x_new, data): Student-t with 2*shape degrees of freedom.
    /// `design_row` carries the leading 1.
    double log_predictive(const FamilyVector& design_row, double y) const;
};

FamilyPosterior family_posterior(const FamilyStats& stats, const NigHyper& hyper);

/// Running scatter matrix sum_t z_t z_t' with z_t = (1, y_t); one per data subset.
class ScatterStats {
public:
    ScatterStats() = default;
    explicit ScatterStats(int m);
    /// Scatter of every row of `data` (n x m).
    static ScatterStats from_rows(const Eigen::MatrixXd& data);
    /// Scatter of the listed rows only.
    static ScatterStats from_rows(const Eigen::MatrixXd& data, std::span<const int> rows);

    int nodes() const { return static_cast<int>(scatter_.rows()) - 1; }
    double count() const { return scatter_(0, 0); }

    void add(const Eigen::Ref<const Eigen::RowVectorXd>& y);
    void remove(const Eigen::Ref<const Eigen::RowVectorXd>& y);

    FamilyStats family(int node, NodeMask parents) const;
    const Eigen::MatrixXd& matrix() const { return scatter_; }

private:
    Eigen::MatrixXd scatter_;
};

/// log N(y_i | intercept + coefficients . y_parents, variance).
double node_logpdf(double y_i, std::span<const double> y_parents, const NodeParams& params);

/// Sum of node_logpdf over all nodes for one observation.
double component_logpdf(const Dag& dag, const ComponentParams& params,
                        const Eigen::Ref<const Eigen::VectorXd>& y);

MvnForm bn_to_mvn(const Dag& dag, const ComponentParams& params);
Eigen::MatrixXd mvn_covariance(const MvnForm& form);
double mvn_logpdf(const MvnForm& form, const Eigen::Ref<const Eigen::VectorXd>& y);

/// Ancestral sampling in topological order.
Eigen::VectorXd sample_observation(const Dag& dag, const ComponentParams& params, Rng& rng);

/// Closed-form log marginal likelihood of one node regression.
/// `design` is n x (|parents| + 1) with the intercept column first.
double node_marginal_loglik(const Eigen::Ref<const Eigen::VectorXd>& y,
                            const Eigen::Ref<const Eigen::MatrixXd>& design,
                            const NigHyper& hyper);

/// log p(data | dag) under the node prior (n x m data; zero rows give 0).
double graph_score(const Dag& dag, const Eigen::MatrixXd& data, const NodePrior& prior = {});
double graph_score(const Dag& dag, const ScatterStats& stats, const NodePrior& prior = {});
double family_score(const ScatterStats& stats, int node, NodeMask parents,
                    const NodePrior& prior = {});

/// Exact conjugate posterior draw of every node's (intercept, coefficients, variance).
ComponentParams sample_posterior_params(const Dag& dag, const ScatterStats& stats, Rng& rng,
                                        const NodePrior& prior = {});
ComponentParams sample_posterior_params(const Dag& dag, const Eigen::MatrixXd& data, Rng& rng,
                                        const NodePrior& prior = {});

/// Checks that params carries one node per dag node with matching coefficient lengths.
void validate_params(const Dag& dag, const ComponentParams& params);

}  // namespace mixbn

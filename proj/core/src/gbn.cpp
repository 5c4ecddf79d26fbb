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

#include "mixbn/gbn.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/LU>

#include "mixbn/error.hpp"

namespace mixbn {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

}  // namespace

double FamilyPosterior::log_predictive(const FamilyVector& design_row, double y) const {
    const FamilyVector u = precision_chol.matrixL().solve(design_row);
    const double dof = 2.0 * shape;
    const double scale2 = (rate / shape) * (1.0 + u.squaredNorm());
    const double resid = y - design_row.dot(mean);
    return std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
           0.5 * std::log(dof * std::numbers::pi * scale2) -
           0.5 * (dof + 1.0) * std::log1p(resid * resid / (dof * scale2));
}

FamilyPosterior family_posterior(const FamilyStats& stats, const NigHyper& hyper) {
    const auto d = stats.xtx.rows();
    FamilyPosterior post;
    FamilyMatrix precision = stats.xtx;
    precision.diagonal().array() += 1.0 / hyper.coef_scale;
    precision(0, 0) += 1.0 / (hyper.coef_scale * hyper.intercept_scale) - 1.0 / hyper.coef_scale;
    post.precision_chol.compute(precision);
    if (post.precision_chol.info() != Eigen::Success) {
        throw NumericError("family_posterior: posterior precision is not positive definite");
    }
    post.mean = post.precision_chol.solve(stats.xty);
    post.shape = hyper.shape + 0.5 * stats.n;
    post.rate = hyper.rate + 0.5 * (stats.yty - stats.xty.dot(post.mean));
    if (!(post.rate > 0.0) || !std::isfinite(post.rate)) {
        throw NumericError("family_posterior: non-positive posterior rate " +
                           std::to_string(post.rate));
    }
    const double log_det = 2.0 * post.precision_chol.matrixLLT().diagonal().array().log().sum();
    const double prior_log_det =
        -static_cast<double>(d) * std::log(hyper.coef_scale) - std::log(hyper.intercept_scale);
    post.log_marginal = -0.5 * stats.n * kLog2Pi + 0.5 * prior_log_det - 0.5 * log_det + hyper.shape * std::log(hyper.rate) -
                        post.shape * std::log(post.rate) + std::lgamma(post.shape) -
                        std::lgamma(hyper.shape);
    return post;
}

ScatterStats::ScatterStats(int m) : scatter_(Eigen::MatrixXd::Zero(m + 1, m + 1)) {}

ScatterStats ScatterStats::from_rows(const Eigen::MatrixXd& data) {
    const auto m = static_cast<int>(data.cols());
    ScatterStats stats(m);
    Eigen::MatrixXd aug(data.rows(), m + 1);
    aug.col(0).setOnes();
    aug.rightCols(m) = data;
    stats.scatter_.noalias() = aug.transpose() * aug;
    return stats;
}

ScatterStats ScatterStats::from_rows(const Eigen::MatrixXd& data, std::span<const int> rows) {
    ScatterStats stats(static_cast<int>(data.cols()));
    for (int r : rows) stats.add(data.row(r));
    return stats;
}

void ScatterStats::add(const Eigen::Ref<const Eigen::RowVectorXd>& y) {
    const auto m = y.size();
    scatter_(0, 0) += 1.0;
    scatter_.block(0, 1, 1, m) += y;
    scatter_.block(1, 0, m, 1) += y.transpose();
    scatter_.block(1, 1, m, m).noalias() += y.transpose() * y;
}

void ScatterStats::remove(const Eigen::Ref<const Eigen::RowVectorXd>& y) {
    const auto m = y.size();
    scatter_(0, 0) -= 1.0;
    scatter_.block(0, 1, 1, m) -= y;
    scatter_.block(1, 0, m, 1) -= y.transpose();
    scatter_.block(1, 1, m, m).noalias() -= y.transpose() * y;
}

FamilyStats ScatterStats::family(int node, NodeMask parents) const {
    const int d = 1 + std::popcount(parents);
    int idx[kMaxFamily];
    idx[0] = 0;
    int k = 1;
    for (NodeMask f = parents; f; f &= f - 1) idx[k++] = 1 + std::countr_zero(f);
    const int y = node + 1;

    FamilyStats fs;
    fs.n = scatter_(0, 0);
    fs.xtx.resize(d, d);
    fs.xty.resize(d);
    for (int a = 0; a < d; ++a) {
        fs.xty(a) = scatter_(idx[a], y);
        for (int b = 0; b < d; ++b) fs.xtx(a, b) = scatter_(idx[a], idx[b]);
    }
    fs.yty = scatter_(y, y);
    return fs;
}

void validate_params(const Dag& dag, const ComponentParams& params) {
    if (static_cast<int>(params.nodes.size()) != dag.size()) {
        throw ParameterError("component params carry " + std::to_string(params.nodes.size()) +
                             " nodes, graph has " + std::to_string(dag.size()));
    }
    for (int i = 0; i < dag.size(); ++i) {
        const auto& node = params.nodes[i];
        if (node.coefficients.size() != std::popcount(dag.parent_mask(i))) {
            throw ParameterError("node " + std::to_string(i) + ": coefficient count " +
                                 std::to_string(node.coefficients.size()) +
                                 " does not match parent count");
        }
        if (!(node.variance > 0.0)) {
            throw ParameterError("node " + std::to_string(i) + ": variance must be positive");
        }
    }
}

double node_logpdf(double y_i, std::span<const double> y_parents, const NodeParams& params) {
    if (!(params.variance > 0.0)) throw ParameterError("node_logpdf: variance must be positive");
    if (static_cast<Eigen::Index>(y_parents.size()) != params.coefficients.size()) {
        throw ParameterError("node_logpdf: parent vector length " +
                             std::to_string(y_parents.size()) + " != coefficient count " +
                             std::to_string(params.coefficients.size()));
    }
    double mean = params.intercept;
    for (std::size_t j = 0; j < y_parents.size(); ++j) {
        mean += params.coefficients(static_cast<Eigen::Index>(j)) * y_parents[j];
    }
    const double r = y_i - mean;
    return -0.5 * (kLog2Pi + std::log(params.variance)) - 0.5 * r * r / params.variance;
}

double component_logpdf(const Dag& dag, const ComponentParams& params,
                        const Eigen::Ref<const Eigen::VectorXd>& y) {
    double total = 0.0;
    double pa_values[Dag::kMaxNodes];
    for (int i = 0; i < dag.size(); ++i) {
        int k = 0;
        for (NodeMask f = dag.parent_mask(i); f; f &= f - 1) pa_values[k++] = y(std::countr_zero(f));
        total += node_logpdf(y(i), std::span<const double>(pa_values, k), params.nodes[i]);
    }
    return total;
}

MvnForm bn_to_mvn(const Dag& dag, const ComponentParams& params) {
    // Throws StructuralError on cycles; Dag mutators already forbid them.
    (void)dag.topological_order();
    validate_params(dag, params);
    const int m = dag.size();
    // y = intercepts + B y + e  =>  (I - B) y = intercepts + e
    Eigen::MatrixXd i_minus_b = Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd intercepts(m);
    Eigen::VectorXd inv_var(m);
    for (int i = 0; i < m; ++i) {
        const auto& node = params.nodes[i];
        intercepts(i) = node.intercept;
        inv_var(i) = 1.0 / node.variance;
        int k = 0;
        for (int j : dag.parents(i)) i_minus_b(i, j) = -node.coefficients(k++);
    }
    MvnForm form;
    form.mean = i_minus_b.partialPivLu().solve(intercepts);
    form.precision = i_minus_b.transpose() * inv_var.asDiagonal() * i_minus_b;
    return form;
}

Eigen::MatrixXd mvn_covariance(const MvnForm& form) {
    return form.precision.llt().solve(Eigen::MatrixXd::Identity(form.precision.rows(),
                                                                form.precision.cols()));
}

double mvn_logpdf(const MvnForm& form, const Eigen::Ref<const Eigen::VectorXd>& y) {
    const Eigen::LLT<Eigen::MatrixXd> chol(form.precision);
    if (chol.info() != Eigen::Success) {
        throw NumericError("mvn_logpdf: precision matrix is not positive definite");
    }
    const Eigen::VectorXd diff = y - form.mean;
    const double log_det = 2.0 * chol.matrixLLT().diagonal().array().log().sum();
    const double quad = (chol.matrixU() * diff).squaredNorm();
    return -0.5 * static_cast<double>(y.size()) * kLog2Pi + 0.5 * log_det - 0.5 * quad;
}

Eigen::VectorXd sample_observation(const Dag& dag, const ComponentParams& params, Rng& rng) {
    validate_params(dag, params);
    Eigen::VectorXd y(dag.size());
    for (int i : dag.topological_order()) {
        const auto& node = params.nodes[i];
        double mean = node.intercept;
        int k = 0;
        for (int j : dag.parents(i)) mean += node.coefficients(k++) * y(j);
        y(i) = mean + std::sqrt(node.variance) * standard_normal(rng);
    }
    return y;
}

double node_marginal_loglik(const Eigen::Ref<const Eigen::VectorXd>& y,
                            const Eigen::Ref<const Eigen::MatrixXd>& design,
                            const NigHyper& hyper) {
    if (design.rows() != y.size()) {
        throw ParameterError("node_marginal_loglik: design has " + std::to_string(design.rows()) +
                             " rows, response has " + std::to_string(y.size()));
    }
    if (design.cols() < 1 || design.cols() > kMaxFamily) {
        throw ParameterError("node_marginal_loglik: design column count " +
                             std::to_string(design.cols()) + " unsupported");
    }
    if (!(hyper.shape > 0.0 && hyper.rate > 0.0 && hyper.coef_scale > 0.0 &&
          hyper.intercept_scale > 0.0)) {
        throw ParameterError("node_marginal_loglik: prior shape, rate and scales must be positive");
    }
    if (y.size() == 0) return 0.0;
    FamilyStats fs;
    fs.n = static_cast<double>(y.size());
    fs.xtx = design.transpose() * design;
    fs.xty = design.transpose() * y;
    fs.yty = y.squaredNorm();
    return family_posterior(fs, hyper).log_marginal;
}

double family_score(const ScatterStats& stats, int node, NodeMask parents, const NodePrior& prior) {
    if (stats.count() <= 0.0) return 0.0;
    return family_posterior(stats.family(node, parents),
                            prior.for_parent_count(std::popcount(parents)))
        .log_marginal;
}

double graph_score(const Dag& dag, const ScatterStats& stats, const NodePrior& prior) {
    if (stats.nodes() != dag.size()) {
        throw ParameterError("graph_score: data has " + std::to_string(stats.nodes()) +
                             " columns, graph has " + std::to_string(dag.size()) + " nodes");
    }
    double total = 0.0;
    for (int i = 0; i < dag.size(); ++i) total += family_score(stats, i, dag.parent_mask(i), prior);
    return total;
}

double graph_score(const Dag& dag, const Eigen::MatrixXd& data, const NodePrior& prior) {
    if (data.rows() == 0) return 0.0;
    if (data.cols() != dag.size()) {
        throw ParameterError("graph_score: data has " + std::to_string(data.cols()) +
                             " columns, graph has " + std::to_string(dag.size()) + " nodes");
    }
    return graph_score(dag, ScatterStats::from_rows(data), prior);
}

ComponentParams sample_posterior_params(const Dag& dag, const ScatterStats& stats, Rng& rng,
                                        const NodePrior& prior) {
    if (stats.nodes() != dag.size()) {
        throw ParameterError("sample_posterior_params: data/graph node count mismatch");
    }
    ComponentParams params;
    params.nodes.resize(static_cast<std::size_t>(dag.size()));
    for (int i = 0; i < dag.size(); ++i) {
        const NodeMask mask = dag.parent_mask(i);
        const FamilyPosterior post =
            family_posterior(stats.family(i, mask), prior.for_parent_count(std::popcount(mask)));
        const double v = inverse_gamma(rng, post.shape, post.rate);
        FamilyVector z(post.mean.size());
        for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = standard_normal(rng);
        // w = mean + sqrt(v) L^{-T} z has covariance v (L L')^{-1}
        const FamilyVector w = post.mean + std::sqrt(v) * post.precision_chol.matrixU().solve(z);
        auto& node = params.nodes[i];
        node.intercept = w(0);
        node.coefficients = w.tail(w.size() - 1);
        node.variance = v;
    }
    return params;
}

ComponentParams sample_posterior_params(const Dag& dag, const Eigen::MatrixXd& data, Rng& rng,
                                        const NodePrior& prior) {
    if (data.rows() > 0 && data.cols() != dag.size()) {
        throw ParameterError("sample_posterior_params: data has " + std::to_string(data.cols()) +
                             " columns, graph has " + std::to_string(dag.size()) + " nodes");
    }
    const ScatterStats stats =
        data.rows() == 0 ? ScatterStats(dag.size()) : ScatterStats::from_rows(data);
    return sample_posterior_params(dag, stats, rng, prior);
}

}  // namespace mixbn

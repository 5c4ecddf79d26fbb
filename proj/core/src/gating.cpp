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

#include "mixbn/gating.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>

#include "mixbn/error.hpp"
#include "mixbn/polya_gamma.hpp"

namespace mixbn {

GatingCoefficients::GatingCoefficients(int k, int p)
    : GatingCoefficients(k, Eigen::MatrixXd::Zero(std::max(k - 1, 0), p + 1)) {}

GatingCoefficients::GatingCoefficients(int k, Eigen::MatrixXd beta)
    : classes_(k), beta_(std::move(beta)) {
    if (k < 1) throw ParameterError("gating: class count must be >= 1");
    if (beta_.rows() != k - 1 || beta_.cols() < 1) {
        throw ParameterError("gating: coefficient matrix must be (K-1) x (P+1), got " +
                             std::to_string(beta_.rows()) + " x " + std::to_string(beta_.cols()));
    }
}

double GatingCoefficients::linear_predictor(int k, const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (k == classes_ - 1) return 0.0;
    return beta_(k, 0) + beta_.row(k).tail(x.size()).dot(x);
}

std::vector<double> log_mixing_probs(const Eigen::Ref<const Eigen::VectorXd>& x,
                                     const GatingCoefficients& beta) {
    if (x.size() != beta.covariates()) {
        throw ParameterError("mixing_probs: covariate length " + std::to_string(x.size()) +
                             " != " + std::to_string(beta.covariates()));
    }
    const int k = beta.classes();
    std::vector<double> eta(static_cast<std::size_t>(k));
    double max_eta = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) {
        eta[j] = beta.linear_predictor(j, x);
        max_eta = std::max(max_eta, eta[j]);
    }
    double sum = 0.0;
    for (double e : eta) sum += std::exp(e - max_eta);
    const double log_norm = max_eta + std::log(sum);
    for (double& e : eta) e -= log_norm;
    return eta;
}

std::vector<double> mixing_probs(const Eigen::Ref<const Eigen::VectorXd>& x,
                                 const GatingCoefficients& beta) {
    auto p = log_mixing_probs(x, beta);
    for (double& v : p) v = std::exp(v);
    return p;
}

int sample_from_log_weights(std::span<const double> log_weights, Rng& rng) {
    double max_w = -std::numeric_limits<double>::infinity();
    for (double w : log_weights) max_w = std::max(max_w, w);
    double total = 0.0;
    double probs[64];
    std::vector<double> spill;
    double* p = probs;
    if (log_weights.size() > 64) {
        spill.resize(log_weights.size());
        p = spill.data();
    }
    for (std::size_t k = 0; k < log_weights.size(); ++k) {
        p[k] = std::exp(log_weights[k] - max_w);
        total += p[k];
    }
    double u = uniform01(rng) * total;
    for (std::size_t k = 0; k < log_weights.size(); ++k) {
        u -= p[k];
        if (u < 0.0) return static_cast<int>(k);
    }
    return static_cast<int>(log_weights.size()) - 1;
}

std::vector<int> update_assignments(const Eigen::MatrixXd& log_lik, const Eigen::MatrixXd& covariates,
                                    const GatingCoefficients& beta, Rng& rng) {
    const auto n_obs = log_lik.rows();
    const int k = beta.classes();
    if (log_lik.cols() != k || covariates.rows() != n_obs) {
        throw ParameterError("update_assignments: expected " + std::to_string(n_obs) + " x " +
                             std::to_string(k) + " log-likelihoods and matching covariates");
    }
    std::vector<int> z(static_cast<std::size_t>(n_obs));
    std::vector<double> w(static_cast<std::size_t>(k));
    for (Eigen::Index n = 0; n < n_obs; ++n) {
        const Eigen::VectorXd x = covariates.row(n).transpose();
        for (int j = 0; j < k; ++j) {
            w[j] = beta.linear_predictor(j, x) + log_lik(n, j);
            if (!std::isfinite(w[j])) {
                throw NumericError("update_assignments: non-finite log-weight for observation " +
                                   std::to_string(n) + ", component " + std::to_string(j));
            }
        }
        z[n] = sample_from_log_weights(w, rng);
    }
    return z;
}

GatingCoefficients update_gating(std::span<const int> assignments, const Eigen::MatrixXd& covariates,
                                 const GatingCoefficients& previous, double prior_scale, Rng& rng) {
    if (!(prior_scale > 0.0)) throw ParameterError("update_gating: prior scale c must be positive");
    const auto n_obs = covariates.rows();
    if (static_cast<Eigen::Index>(assignments.size()) != n_obs) {
        throw ParameterError("update_gating: " + std::to_string(assignments.size()) +
                             " assignments for " + std::to_string(n_obs) + " covariate rows");
    }
    const int k_classes = previous.classes();
    const int p = previous.covariates();
    if (covariates.cols() != p) {
        throw ParameterError("update_gating: covariate matrix has " +
                             std::to_string(covariates.cols()) + " columns, coefficients expect " +
                             std::to_string(p));
    }
    for (int z : assignments) {
        if (z < 0 || z >= k_classes) throw ParameterError("update_gating: label out of range");
    }

    GatingCoefficients beta = previous;
    if (k_classes == 1) return beta;

    const int d = p + 1;
    Eigen::MatrixXd design(n_obs, d);
    design.col(0).setOnes();
    design.rightCols(p) = covariates;

    Eigen::MatrixXd eta(n_obs, k_classes);  // linear predictors, last column zero
    eta.leftCols(k_classes - 1).noalias() = design * beta.matrix().transpose();
    eta.col(k_classes - 1).setZero();

    Eigen::VectorXd offset(n_obs), kappa(n_obs), omega(n_obs);
    for (int k = 0; k < k_classes - 1; ++k) {
        // offset_n = log sum_{j != k} exp(eta_nj)
        for (Eigen::Index n = 0; n < n_obs; ++n) {
            double max_e = -std::numeric_limits<double>::infinity();
            for (int j = 0; j < k_classes; ++j) {
                if (j != k) max_e = std::max(max_e, eta(n, j));
            }
            double s = 0.0;
            for (int j = 0; j < k_classes; ++j) {
                if (j != k) s += std::exp(eta(n, j) - max_e);
            }
            offset(n) = max_e + std::log(s);
            kappa(n) = (assignments[n] == k ? 1.0 : 0.0) - 0.5;
            omega(n) = pg_sample(eta(n, k) - offset(n), rng);
        }
        // beta_k | omega ~ N(V (X'(kappa + omega * offset)), V), V^{-1} = X' Omega X + I / c
        Eigen::MatrixXd precision = design.transpose() * omega.asDiagonal() * design;
        precision.diagonal().array() += 1.0 / prior_scale;
        const Eigen::LLT<Eigen::MatrixXd> chol(precision);
        if (chol.info() != Eigen::Success) {
            throw NumericError("update_gating: singular posterior precision for class " +
                               std::to_string(k));
        }
        const Eigen::VectorXd rhs =
            design.transpose() * (kappa + omega.cwiseProduct(offset));
        const Eigen::VectorXd mean = chol.solve(rhs);
        Eigen::VectorXd z(d);
        for (int j = 0; j < d; ++j) z(j) = standard_normal(rng);
        const Eigen::VectorXd draw = mean + chol.matrixU().solve(z);
        beta.matrix().row(k) = draw.transpose();
        eta.col(k).noalias() = design * draw;
    }
    return beta;
}

double gating_log_prior(const GatingCoefficients& beta, double prior_scale) {
    const auto& b = beta.matrix();
    const double count = static_cast<double>(b.size());
    return -0.5 * count * std::log(2.0 * std::numbers::pi * prior_scale) -
           0.5 * b.squaredNorm() / prior_scale;
}

}  // namespace mixbn

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

#include <Eigen/Core>

#include "mixbn/random.hpp"

namespace mixbn {

/// Multinomial-logistic gating weights. Row k of `beta` holds beta_k over the
/// covariates with a leading intercept; class K (the last) is pinned at zero
/// and not stored.
class GatingCoefficients {
public:
    GatingCoefficients() = default;
    /// All-zero coefficients for k classes over p covariates.
    GatingCoefficients(int k, int p);
    GatingCoefficients(int k, Eigen::MatrixXd beta);

    int classes() const { return classes_; }
    int covariates() const { return static_cast<int>(beta_.cols()) - 1; }

    const Eigen::MatrixXd& matrix() const { return beta_; }
    Eigen::MatrixXd& matrix() { return beta_; }

    /// Linear predictor for class k (zero for the last class); `x` excludes the intercept.
    double linear_predictor(int k, const Eigen::Ref<const Eigen::VectorXd>& x) const;

    friend bool operator==(const GatingCoefficients& a, const GatingCoefficients& b) {
        return a.classes_ == b.classes_ && a.beta_.rows() == b.beta_.rows() &&
               a.beta_.cols() == b.beta_.cols() && a.beta_ == b.beta_;
    }

private:
    int classes_ = 1;
    Eigen::MatrixXd beta_;  // (classes - 1) x (p + 1)
};

/// Softmax mixing probabilities pi_k(x) for one covariate vector.
std::vector<double> mixing_probs(const Eigen::Ref<const Eigen::VectorXd>& x,
                                 const GatingCoefficients& beta);
/// Same, in log space.
std::vector<double> log_mixing_probs(const Eigen::Ref<const Eigen::VectorXd>& x,
                                     const GatingCoefficients& beta);

/// Zero-based categorical draw from unnormalized log weights (log-sum-exp).
int sample_from_log_weights(std::span<const double> log_weights, Rng& rng);

/// Draws each z_n from Pr(z_n = k) ∝ exp(x̃_n . beta_k) * exp(log_lik(n, k)).
/// `log_lik` is N x K; throws NumericError naming the observation on a
/// non-finite weight. Returns zero-based labels.
std::vector<int> update_assignments(const Eigen::MatrixXd& log_lik, const Eigen::MatrixXd& covariates,
                                    const GatingCoefficients& beta, Rng& rng);

/// One Gibbs pass over beta_1..beta_{K-1} given zero-based labels, using
/// Pólya-Gamma augmentation of each class-vs-rest logistic likelihood with
/// prior N(0, c I). `covariates` is N x P (no intercept column).
GatingCoefficients update_gating(std::span<const int> assignments, const Eigen::MatrixXd& covariates,
                                 const GatingCoefficients& previous, double prior_scale, Rng& rng);

/// log p(beta) under N(0, c I) for every stored class.
double gating_log_prior(const GatingCoefficients& beta, double prior_scale);

}  // namespace mixbn

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

#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace mixbn::testing {

namespace {

using boost::math::quadrature::gauss_kronrod;

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd prior_covariance(int d, const NigHyper& hyper) {
    Eigen::MatrixXd s0 = Eigen::MatrixXd::Identity(d, d) * hyper.coef_scale;
    s0(0, 0) *= hyper.intercept_scale;
    return s0;
}

double log_inverse_gamma(double v, double shape, double rate) {
    return shape * std::log(rate) - std::lgamma(shape) - (shape + 1.0) * std::log(v) - rate / v;
}

double log_normal(double x, double mean, double var) {
    const double r = x - mean;
    return -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * r * r / var;
}

}  // namespace

double marginal_by_variance_quadrature(const Eigen::VectorXd& y, const Eigen::MatrixXd& design,
                                       const NigHyper& hyper) {
    const auto n = static_cast<double>(y.size());
    if (y.size() == 0) return 0.0;
    const Eigen::MatrixXd s0 = prior_covariance(static_cast<int>(design.cols()), hyper);
    const Eigen::MatrixXd c =
        Eigen::MatrixXd::Identity(y.size(), y.size()) + design * s0 * design.transpose();
    const Eigen::LLT<Eigen::MatrixXd> llt(c);
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double quad = y.dot(llt.solve(y));

    // u = log v; the integrand includes the Jacobian v.
    auto log_integrand = [&](double u) {
        const double v = std::exp(u);
        return -0.5 * n * std::log(2.0 * std::numbers::pi * v) - 0.5 * logdet -
               0.5 * quad / v + log_inverse_gamma(v, hyper.shape, hyper.rate) + u;
    };
    const double mode = std::log((0.5 * quad + hyper.rate) / (0.5 * n + hyper.shape));
    const double peak = log_integrand(mode);
    auto f = [&](double t) {
        const double value = std::exp(log_integrand(mode + t) - peak);
        return std::isfinite(value) ? value : 0.0;
    };
    const double integral = gauss_kronrod<double, 61>::integrate(f, -kInf, kInf, 15, 1e-13);
    return peak + std::log(integral);
}

double marginal_by_full_quadrature(const Eigen::VectorXd& y, const Eigen::MatrixXd& design,
                                   const NigHyper& hyper) {
    const int d = static_cast<int>(design.cols());
    if (d < 1 || d > 2) throw ParameterError("full quadrature oracle handles 1 or 2 columns");
    const Eigen::MatrixXd s0 = prior_covariance(d, hyper);
    const Eigen::VectorXd ls = design.colPivHouseholderQr().solve(y);

    auto log_joint = [&](double u, const Eigen::VectorXd& w) {
        const double v = std::exp(u);
        double lp = log_inverse_gamma(v, hyper.shape, hyper.rate) + u;
        for (int j = 0; j < d; ++j) lp += log_normal(w(j), 0.0, v * s0(j, j));
        const Eigen::VectorXd r = y - design * w;
        for (Eigen::Index i = 0; i < r.size(); ++i) lp += log_normal(r(i), 0.0, v);
        return lp;
    };
    // Integrate in a frame centred on the least-squares fit; the window is
    // generous enough that truncation error is far below the test tolerance.
    const Eigen::VectorXd center = ls.array().isFinite().all() ? ls : Eigen::VectorXd::Zero(d);
    const double peak = log_joint(std::log(hyper.rate / (hyper.shape + 1.0)), center);
    const double half = 60.0;

    auto over_w = [&](double u) {
        const double sd = std::sqrt(std::exp(u)) * std::sqrt(1.0 + s0.maxCoeff());
        Eigen::VectorXd w(d);
        auto inner0 = [&](double a) {
            w(0) = center(0) + a * sd;
            if (d == 1) return std::exp(log_joint(u, w) - peak) * sd;
            auto inner1 = [&](double b) {
                w(1) = center(1) + b * sd;
                return std::exp(log_joint(u, w) - peak) * sd;
            };
            return gauss_kronrod<double, 31>::integrate(inner1, -half, half, 12, 1e-11) * sd;
        };
        return gauss_kronrod<double, 31>::integrate(inner0, -half, half, 12, 1e-11);
    };
    const double integral = gauss_kronrod<double, 31>::integrate(over_w, -30.0, 15.0, 12, 1e-11);
    return peak + std::log(integral);
}

RegressionCase random_regression_case(Rng& rng, int n, int d) {
    RegressionCase c;
    c.y.resize(n);
    c.design.resize(n, d);
    for (int i = 0; i < n; ++i) {
        c.y(i) = 2.0 * standard_normal(rng);
        c.design(i, 0) = 1.0;
        for (int j = 1; j < d; ++j) c.design(i, j) = standard_normal(rng);
    }
    c.hyper.shape = 1.5 + 0.5 * (d - 1);
    c.hyper.rate = 0.5;
    c.hyper.coef_scale = 0.5 + 1.5 * uniform01(rng);
    c.hyper.intercept_scale = 0.5 + 3.5 * uniform01(rng);
    return c;
}

double total_variation(const std::map<Dag, double>& p, const std::map<Dag, double>& q) {
    double tv = 0.0;
    for (const auto& [g, pg] : p) {
        const auto it = q.find(g);
        tv += std::abs(pg - (it == q.end() ? 0.0 : it->second));
    }
    for (const auto& [g, qg] : q) {
        if (!p.contains(g)) tv += qg;
    }
    return 0.5 * tv;
}

std::map<Dag, double> frequencies(const std::vector<Dag>& samples) {
    std::map<Dag, double> freq;
    for (const Dag& g : samples) freq[g] += 1.0;
    for (auto& [g, f] : freq) f /= static_cast<double>(samples.size());
    return freq;
}

double batch_means_se(std::span<const double> series, int batches) {
    const std::size_t size = series.size() / static_cast<std::size_t>(batches);
    if (size == 0) throw ParameterError("batch_means_se: series too short");
    std::vector<double> means(static_cast<std::size_t>(batches), 0.0);
    for (int b = 0; b < batches; ++b) {
        for (std::size_t i = 0; i < size; ++i) means[b] += series[b * size + i];
        means[b] /= static_cast<double>(size);
    }
    double mean = 0.0;
    for (double m : means) mean += m;
    mean /= batches;
    double ss = 0.0;
    for (double m : means) ss += (m - mean) * (m - mean);
    return std::sqrt(ss / (batches - 1.0) / batches);
}

Eigen::MatrixXd gating_mh_oracle(std::span<const int> z, const Eigen::MatrixXd& covariates,
                                 double prior_scale, int draws, int burn_in, Rng& rng) {
    const Eigen::Index n = covariates.rows();
    const Eigen::Index d = covariates.cols() + 1;
    Eigen::MatrixXd design(n, d);
    design.col(0).setOnes();
    design.rightCols(d - 1) = covariates;

    auto log_post = [&](const Eigen::VectorXd& b) {
        const Eigen::VectorXd eta = design * b;
        double lp = -0.5 * b.squaredNorm() / prior_scale;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double log1pexp = eta(i) > 0 ? eta(i) + std::log1p(std::exp(-eta(i)))
                                                : std::log1p(std::exp(eta(i)));
            lp += (z[i] == 0 ? eta(i) : 0.0) - log1pexp;
        }
        return lp;
    };

    Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
    double lp = log_post(b);
    double step = 0.5;
    Eigen::MatrixXd out(draws, d);
    int accepted = 0;
    for (int t = 0; t < burn_in + draws; ++t) {
        Eigen::VectorXd prop = b;
        for (Eigen::Index j = 0; j < d; ++j) prop(j) += step * standard_normal(rng);
        const double lq = log_post(prop);
        if (std::log(uniform01(rng)) < lq - lp) {
            b = prop;
            lp = lq;
            ++accepted;
        }
        if (t < burn_in && (t + 1) % 500 == 0) {
            const double rate = accepted / 500.0;
            step *= rate > 0.3 ? 1.2 : 0.8;
            accepted = 0;
        }
        if (t >= burn_in) out.row(t - burn_in) = b.transpose();
    }
    return out;
}

double GatingComparison::max_z() const {
    double z = 0.0;
    for (Eigen::Index j = 0; j < pg_mean.size(); ++j) {
        const double se = std::sqrt(pg_se(j) * pg_se(j) + mh_se(j) * mh_se(j));
        z = std::max(z, std::abs(pg_mean(j) - mh_mean(j)) / se);
    }
    return z;
}

GatingComparison compare_gating_to_oracle(int draws, std::uint64_t seed) {
    constexpr int kRows = 30;
    constexpr double kScale = 10.0;
    Rng data_rng(314);
    Eigen::MatrixXd x(kRows, 1);
    std::vector<int> z(kRows);
    for (int n = 0; n < kRows; ++n) {
        x(n, 0) = standard_normal(data_rng);
        const double eta = 0.5 - 1.5 * x(n, 0);
        z[n] = uniform01(data_rng) < 1.0 / (1.0 + std::exp(-eta)) ? 0 : 1;
    }

    Rng rng(seed);
    const int burn_in = 1000;
    GatingCoefficients beta(2, 1);
    std::vector<std::vector<double>> pg(2);
    for (int t = 0; t < burn_in + draws; ++t) {
        beta = update_gating(z, x, beta, kScale, rng);
        if (t >= burn_in) {
            for (int j = 0; j < 2; ++j) pg[j].push_back(beta.matrix()(0, j));
        }
    }
    // Random-walk chains mix slower; give the oracle ten times the draws.
    const Eigen::MatrixXd mh = gating_mh_oracle(z, x, kScale, 10 * draws, 5000, rng);

    GatingComparison out;
    out.pg_mean.resize(2);
    out.pg_se.resize(2);
    out.mh_mean.resize(2);
    out.mh_se.resize(2);
    for (int j = 0; j < 2; ++j) {
        double sum = 0.0;
        for (double v : pg[j]) sum += v;
        out.pg_mean(j) = sum / static_cast<double>(pg[j].size());
        out.pg_se(j) = batch_means_se(pg[j]);
        std::vector<double> col(mh.col(j).data(), mh.col(j).data() + mh.rows());
        out.mh_mean(j) = mh.col(j).mean();
        out.mh_se(j) = batch_means_se(col);
    }
    return out;
}

BnSample random_bn_sample(int m, double p, int n, std::uint64_t seed) {
    Rng rng(seed);
    BnSample s;
    s.dag = random_dag(m, p, rng);
    s.params.nodes.resize(m);
    for (int i = 0; i < m; ++i) {
        const int k = static_cast<int>(s.dag.parents(i).size());
        NodeParams& node = s.params.nodes[i];
        auto coef = [&] {
            const double mag = 1.0 + uniform01(rng);
            return uniform01(rng) < 0.5 ? -mag : mag;
        };
        node.intercept = coef();
        node.coefficients.resize(k);
        for (int j = 0; j < k; ++j) node.coefficients(j) = coef();
        node.variance = 0.75 + 0.5 * uniform01(rng);
    }
    s.data.resize(n, m);
    for (int r = 0; r < n; ++r) s.data.row(r) = sample_observation(s.dag, s.params, rng).transpose();
    return s;
}

std::map<Dag, double> structure_mcmc_frequencies(const GraphPosteriorTarget& target, int kept,
                                                 int thin, int burn_in, std::uint64_t seed) {
    Rng rng(seed);
    StructureSamplerConfig config;
    config.iterations = 1;
    Dag g(target.nodes());
    std::map<Dag, double> freq;
    auto step = [&] { g = structure_mcmc_step(g, target, rng, config); };
    for (int t = 0; t < burn_in; ++t) step();
    for (int s = 0; s < kept; ++s) {
        for (int t = 0; t < thin; ++t) step();
        freq[g] += 1.0;
    }
    for (auto& [dag, f] : freq) f /= static_cast<double>(kept);
    return freq;
}

}  // namespace mixbn::testing

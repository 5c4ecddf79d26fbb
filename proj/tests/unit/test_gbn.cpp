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

#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "mixbn/gbn.hpp"
#include "oracles.hpp"

using namespace mixbn;

namespace {

using testing::RegressionCase;

RegressionCase random_case(Rng& rng, int n, int d) {
    return testing::random_regression_case(rng, n, d);
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("node marginal matches the variance-quadrature oracle on 50 random cases") {
    Rng rng(2026);
    for (int t = 0; t < 50; ++t) {
        const int n = 1 + uniform_index(rng, 6);
        const int d = 1 + uniform_index(rng, 3);
        const RegressionCase c = random_case(rng, n, d);
        const double closed = node_marginal_loglik(c.y, c.design, c.hyper);
        const double oracle = testing::marginal_by_variance_quadrature(c.y, c.design, c.hyper);
        CAPTURE(t);
        CHECK(rel_err(closed, oracle) < 1e-4);
    }
}

TEST_CASE("node marginal matches brute-force quadrature over coefficients and variance") {
    Rng rng(7);
    // n = 1 with an intercept only, then n = 3 with one parent.
    for (auto [n, d] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{3, 2}}) {
        const RegressionCase c = random_case(rng, n, d);
        const double closed = node_marginal_loglik(c.y, c.design, c.hyper);
        const double oracle = testing::marginal_by_full_quadrature(c.y, c.design, c.hyper);
        CAPTURE(n);
        CAPTURE(d);
        CHECK(rel_err(closed, oracle) < 1e-4);
    }
}

TEST_CASE("node marginal edge cases") {
    const Eigen::VectorXd empty_y(0);
    const Eigen::MatrixXd empty_x(0, 1);
    CHECK(node_marginal_loglik(empty_y, empty_x, {}) == 0.0);
    Eigen::VectorXd y(2);
    y << 1.0, 2.0;
    Eigen::MatrixXd bad(3, 1);
    CHECK_THROWS_AS(node_marginal_loglik(y, bad, {}), ParameterError);
    NigHyper h;
    h.shape = -1.0;
    CHECK_THROWS_AS(node_marginal_loglik(y, Eigen::MatrixXd::Ones(2, 1), h), ParameterError);
}

TEST_CASE("posterior predictive equals the ratio of marginals") {
    Rng rng(11);
    for (int t = 0; t < 10; ++t) {
        const RegressionCase c = random_case(rng, 6, 3);
        FamilyStats stats;
        stats.n = 5;
        stats.xtx = c.design.topRows(5).transpose() * c.design.topRows(5);
        stats.xty = c.design.topRows(5).transpose() * c.y.head(5);
        stats.yty = c.y.head(5).squaredNorm();
        const FamilyPosterior post = family_posterior(stats, c.hyper);
        const double lp = post.log_predictive(c.design.row(5).transpose(), c.y(5));
        const double ratio = node_marginal_loglik(c.y, c.design, c.hyper) -
                             node_marginal_loglik(c.y.head(5), c.design.topRows(5), c.hyper);
        CHECK(lp == doctest::Approx(ratio).epsilon(1e-10));
        CHECK(post.log_marginal ==
              doctest::Approx(node_marginal_loglik(c.y.head(5), c.design.topRows(5), c.hyper))
                  .epsilon(1e-12));
    }
}

TEST_CASE("graph score is equal across Markov-equivalent DAGs, exhaustively for m <= 3") {
    for (int m = 1; m <= 3; ++m) {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const auto sample = testing::random_bn_sample(m, 0.5, 25, seed);
            CHECK(testing::max_equivalence_gap(m, sample.data) < 1e-8);
        }
    }
    // Also with a small sample, a non-default prior and at m = 4.
    const auto small = testing::random_bn_sample(3, 0.5, 2, 9);
    CHECK(testing::max_equivalence_gap(3, small.data) < 1e-8);
    NodePrior wide;
    wide.intercept_scale = 100.0;
    wide.coef_scale = 3.0;
    wide.rate = 1.0 / 6.0;
    CHECK(testing::max_equivalence_gap(3, testing::random_bn_sample(3, 0.5, 30, 4).data, wide) < 1e-8);
    CHECK(testing::max_equivalence_gap(4, testing::random_bn_sample(4, 0.5, 30, 5).data) < 1e-8);
}

TEST_CASE("graph score via scatter statistics equals the data path and decomposes") {
    const auto sample = testing::random_bn_sample(4, 0.5, 40, 12);
    const ScatterStats stats = ScatterStats::from_rows(sample.data);
    for (const Dag& g : {sample.dag, Dag(4)}) {
        const double direct = graph_score(g, sample.data);
        CHECK(graph_score(g, stats) == doctest::Approx(direct).epsilon(1e-12));
        double sum = 0.0;
        for (int i = 0; i < 4; ++i) sum += family_score(stats, i, g.parent_mask(i));
        CHECK(sum == doctest::Approx(direct).epsilon(1e-12));
    }
    CHECK(graph_score(sample.dag, Eigen::MatrixXd(0, 4)) == 0.0);
    CHECK_THROWS_AS(graph_score(sample.dag, Eigen::MatrixXd::Zero(3, 5)), ParameterError);
}

TEST_CASE("scatter statistics add and remove rows") {
    const auto sample = testing::random_bn_sample(3, 0.5, 10, 3);
    ScatterStats s(3);
    for (int r = 0; r < 10; ++r) s.add(sample.data.row(r));
    CHECK(s.count() == 10.0);
    CHECK(s.matrix().isApprox(ScatterStats::from_rows(sample.data).matrix(), 1e-12));
    s.remove(sample.data.row(0));
    const std::vector<int> rows = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    CHECK(s.matrix().isApprox(ScatterStats::from_rows(sample.data, rows).matrix(), 1e-12));
}

TEST_CASE("bn_to_mvn agrees with the factorized density and sampled moments") {
    const auto sample = testing::random_bn_sample(4, 0.6, 1, 21);
    const MvnForm mvn = bn_to_mvn(sample.dag, sample.params);
    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd y(4);
        for (int i = 0; i < 4; ++i) y(i) = 3.0 * standard_normal(rng);
        CHECK(mvn_logpdf(mvn, y) ==
              doctest::Approx(component_logpdf(sample.dag, sample.params, y)).epsilon(1e-10));
    }
    const Eigen::MatrixXd cov = mvn_covariance(mvn);
    const int n = 200000;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(4);
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(4, 4);
    for (int t = 0; t < n; ++t) {
        const Eigen::VectorXd y = sample_observation(sample.dag, sample.params, rng);
        mean += y;
        second += y * y.transpose();
    }
    mean /= n;
    const Eigen::MatrixXd sample_cov = second / n - mean * mean.transpose();
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(mean(i) - mvn.mean(i)) < 5.0 * std::sqrt(cov(i, i) / n));
        for (int j = 0; j < 4; ++j) {
            const double se = std::sqrt((cov(i, i) * cov(j, j) + cov(i, j) * cov(i, j)) / n);
            CHECK(std::abs(sample_cov(i, j) - cov(i, j)) < 5.0 * se);
        }
    }
}

TEST_CASE("node_logpdf is the linear-Gaussian conditional") {
    NodeParams p;
    p.intercept = 1.0;
    p.coefficients = Eigen::Vector2d(2.0, -1.0);
    p.variance = 0.5;
    const std::vector<double> pa = {0.5, 3.0};
    const double mean = 1.0 + 2.0 * 0.5 - 3.0;
    const double expected =
        -0.5 * std::log(2.0 * M_PI * 0.5) - 0.5 * (0.2 - mean) * (0.2 - mean) / 0.5;
    CHECK(node_logpdf(0.2, pa, p) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("posterior parameter draws concentrate on the generating values") {
    const auto sample = testing::random_bn_sample(3, 0.7, 4000, 31);
    Rng rng(8);
    const ComponentParams draw = sample_posterior_params(sample.dag, sample.data, rng);
    validate_params(sample.dag, draw);
    for (int i = 0; i < 3; ++i) {
        CHECK(draw.nodes[i].intercept == doctest::Approx(sample.params.nodes[i].intercept).epsilon(0.15));
        CHECK(draw.nodes[i].variance == doctest::Approx(sample.params.nodes[i].variance).epsilon(0.15));
        for (Eigen::Index j = 0; j < draw.nodes[i].coefficients.size(); ++j) {
            CHECK(draw.nodes[i].coefficients(j) ==
                  doctest::Approx(sample.params.nodes[i].coefficients(j)).epsilon(0.1));
        }
    }
    // No rows: draws come from the prior and stay finite.
    const ComponentParams prior_draw =
        sample_posterior_params(sample.dag, Eigen::MatrixXd(0, 3), rng);
    for (const auto& node : prior_draw.nodes) CHECK(std::isfinite(node.variance));

    ComponentParams broken = draw;
    broken.nodes.pop_back();
    CHECK_THROWS_AS(validate_params(sample.dag, broken), ParameterError);
}

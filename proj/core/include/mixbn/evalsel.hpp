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
#include <vector>

#include <Eigen/Core>

#include "mixbn/dataset.hpp"
#include "mixbn/graphs.hpp"
#include "mixbn/mixture.hpp"

namespace mixbn {

struct MshdReport {
    /// mean_shd(f, t): mean SHD between fitted component f's samples and true graph t.
    Eigen::MatrixXd mean_shd;
    /// Every labelling considered; labellings[l][t] is the fitted component
    /// matched to true component t, or -1 when t is left unmatched.
    std::vector<std::vector<int>> labellings;
    std::vector<double> sums;
    std::size_t best = 0;
    double value = 0.0;
};

/// Minimum over labellings of the summed per-component mean SHD. With more
/// true than fitted components, unmatched true graphs are charged their SHD
/// to the empty graph.
MshdReport mshd(const ChainTrace& trace, const std::vector<Dag>& truth);

struct PredictiveScore {
    double total = 0.0;
    std::vector<double> per_point;
    int samples = 0;
};

/// Pointwise log-mean-exp over kept records of the mixture log-density, summed.
PredictiveScore lmppd(const Dataset& test, const ChainTrace& trace);

/// Watanabe-Akaike criterion on the log predictive density scale (higher is
/// better): elpd = lppd - p_waic, p_waic = sum of pointwise sample variances
/// of the log density across records. `deviance()` gives the -2 * elpd scale.
struct WaicReport {
    double lppd = 0.0;
    double p_waic = 0.0;
    double elpd = 0.0;

    double deviance() const { return -2.0 * elpd; }
};

WaicReport waic(const Dataset& train, const ChainTrace& trace);

/// N_test x S matrix of mixture log-densities, one column per kept record.
Eigen::MatrixXd pointwise_log_density(const Dataset& data, const ChainTrace& trace);

struct SelectionRow {
    int k = 0;
    double lmppd = 0.0;
    double waic_elpd = 0.0;
    double wall_seconds = 0.0;
    /// Held-out log predictive density of each test point.
    std::vector<double> lmppd_points;
    /// Standard error of the paired pointwise LMPPD difference to the best K.
    double se_diff = 0.0;
};

struct SelectionTable {
    std::vector<SelectionRow> rows;
    /// K with the largest held-out LMPPD.
    int best_k = 0;
    /// Smallest K whose LMPPD lies within one se_diff of the best.
    int parsimonious_k = 0;
};

struct SelectionConfig {
    std::vector<int> k_values;
    double test_fraction = 0.1;
    /// Drives the train/test split and every per-K chain seed.
    std::uint64_t seed = 0;
    /// Per-K fits in flight at once; 0 means hardware concurrency.
    int threads = 0;
};

/// Random train/test split of the rows.
void split_rows(int n, double test_fraction, std::uint64_t seed, std::vector<int>& train,
                std::vector<int>& test);

/// Fits one chain per K on the training split, scores held-out LMPPD and
/// in-sample WAIC, and reports the LMPPD-maximising K. `fit` supplies every
/// chain setting except K and the seed.
SelectionTable select_k(const Dataset& data, const SelectionConfig& selection, const FitConfig& fit);
SelectionTable select_k(const Dataset& train, const Dataset& test, const SelectionConfig& selection,
                        const FitConfig& fit);

}  // namespace mixbn

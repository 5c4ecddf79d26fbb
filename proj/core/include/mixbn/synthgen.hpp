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
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mixbn/dataset.hpp"
#include "mixbn/gbn.hpp"
#include "mixbn/graphs.hpp"
#include "mixbn/random.hpp"

namespace mixbn {

enum class Sparsity { kLow, kHigh, kMixed };
enum class ClusterDensity { kSparse, kMid, kDense };

/// Edge probability of a sparsity level (kMixed picks one of these per component).
double edge_probability(Sparsity s);
/// Distance between covariate cluster centres.
double cluster_separation(ClusterDensity c);

std::string to_string(Sparsity s);
std::string to_string(ClusterDensity c);
Sparsity parse_sparsity(const std::string& token);
ClusterDensity parse_cluster_density(const std::string& token);

/// One cell of the synthetic experiment grid.
struct SynthCondition {
    int components = 2;      // true number of mixture components
    int per_component = 100; // rows drawn from each component
    Sparsity sparsity = Sparsity::kLow;
    ClusterDensity density = ClusterDensity::kMid;
    std::uint64_t seed = 0;
    int nodes = 5;
    int covariates = 3;
    /// 0/1 covariates with component-specific Bernoulli rates instead of Gaussian clusters.
    bool binary_covariates = false;

    void validate() const;
};

struct GroundTruth {
    std::vector<Dag> graphs;
    std::vector<ComponentParams> params;
    std::vector<double> edge_probabilities;
    /// components x covariates: Gaussian cluster means, or Bernoulli rates when binary.
    Eigen::MatrixXd covariate_centers;
    bool binary_covariates = false;

    int components() const { return static_cast<int>(graphs.size()); }
};

/// Random structures (Erdős–Rényi), coefficients and intercepts uniform on
/// (-2,-1) U (1,2), variances uniform on (0.75, 1.25), covariate clusters.
GroundTruth generate_model(const SynthCondition& cond, Rng& rng);

/// `per_component` rows per component, shuffled; z_true retained (one-based).
Dataset generate_dataset(const GroundTruth& truth, const SynthCondition& cond, Rng& rng);

inline constexpr int kTruthSchemaVersion = 1;

std::string format_ground_truth(const GroundTruth& truth, const SynthCondition& cond);
GroundTruth parse_ground_truth(const std::string& text, const std::string& origin = "<memory>");
void write_ground_truth(const std::string& path, const GroundTruth& truth, const SynthCondition& cond);
GroundTruth read_ground_truth(const std::string& path);

}  // namespace mixbn

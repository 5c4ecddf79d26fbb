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

#include "mixbn/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "mixbn/error.hpp"
#include "mixbn/trace_io.hpp"

namespace mixbn {

using nlohmann::json;

double edge_probability(Sparsity s) {
    switch (s) {
        case Sparsity::kLow: return 0.25;
        case Sparsity::kHigh: return 0.5;
        case Sparsity::kMixed: break;
    }
    throw ParameterError("edge_probability: mixed sparsity has no single edge probability");
}

double cluster_separation(ClusterDensity c) {
    switch (c) {
        case ClusterDensity::kSparse: return 1.0;
        case ClusterDensity::kMid: return 2.5;
        case ClusterDensity::kDense: return 4.0;
    }
    return 0.0;
}

std::string to_string(Sparsity s) {
    switch (s) {
        case Sparsity::kLow: return "low";
        case Sparsity::kHigh: return "high";
        case Sparsity::kMixed: return "mixed";
    }
    return "?";
}

std::string to_string(ClusterDensity c) {
    switch (c) {
        case ClusterDensity::kSparse: return "sparse";
        case ClusterDensity::kMid: return "mid";
        case ClusterDensity::kDense: return "dense";
    }
    return "?";
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

Sparsity parse_sparsity(const std::string& token) {
    const auto t = lower(token);
    if (t == "low") return Sparsity::kLow;
    if (t == "high") return Sparsity::kHigh;
    if (t == "mixed") return Sparsity::kMixed;
    throw ParameterError("sparsity: expected low|high|mixed, got '" + token + "'");
}

ClusterDensity parse_cluster_density(const std::string& token) {
    const auto t = lower(token);
    if (t == "sparse") return ClusterDensity::kSparse;
    if (t == "mid") return ClusterDensity::kMid;
    if (t == "dense") return ClusterDensity::kDense;
    throw ParameterError("cluster density: expected sparse|mid|dense, got '" + token + "'");
}

void SynthCondition::validate() const {
    if (components < 1) throw ParameterError("components: must be >= 1");
    if (per_component < 1) throw ParameterError("per_component: must be >= 1");
    if (nodes < 1 || nodes > Dag::kMaxNodes) throw ParameterError("nodes: out of range");
    if (covariates < 0) throw ParameterError("covariates: must be >= 0");
    if (!binary_covariates && covariates > 0 && components > covariates + 1) {
        throw ParameterError("components: Gaussian clusters need at most covariates + 1 = " +
                             std::to_string(covariates + 1) + " components");
    }
}

namespace {

double signed_magnitude(Rng& rng) {
    const double mag = 1.0 + uniform01(rng);
    return uniform01(rng) < 0.5 ? -mag : mag;
}

// Regular-simplex vertices with pairwise distance `d`: scaled basis vectors,
// plus the point a*(1,...,1) when one more vertex is needed.
Eigen::MatrixXd simplex_centers(int k, int p, double d) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k, p);
    const double s = d / std::sqrt(2.0);
    for (int i = 0; i < k; ++i) {
        if (i < p) {
            c(i, i) = s;
        } else {
            const double a = (1.0 - std::sqrt(1.0 + p)) / p;
            c.row(i).setConstant(a * s);
        }
    }
    return c;
}

}  // namespace

GroundTruth generate_model(const SynthCondition& cond, Rng& rng) {
    cond.validate();
    GroundTruth truth;
    truth.binary_covariates = cond.binary_covariates;
    for (int k = 0; k < cond.components; ++k) {
        const double p = cond.sparsity == Sparsity::kMixed
                             ? (uniform01(rng) < 0.5 ? edge_probability(Sparsity::kLow)
                                                     : edge_probability(Sparsity::kHigh))
                             : edge_probability(cond.sparsity);
        truth.edge_probabilities.push_back(p);
        Dag g = random_dag(cond.nodes, p, rng);
        ComponentParams params;
        for (int i = 0; i < cond.nodes; ++i) {
            NodeParams node;
            node.intercept = signed_magnitude(rng);
            const int pa = static_cast<int>(g.parents(i).size());
            node.coefficients.resize(pa);
            for (int j = 0; j < pa; ++j) node.coefficients(j) = signed_magnitude(rng);
            node.variance = 0.75 + 0.5 * uniform01(rng);
            params.nodes.push_back(std::move(node));
        }
        truth.graphs.push_back(std::move(g));
        truth.params.push_back(std::move(params));
    }
    if (cond.binary_covariates) {
        // Bernoulli rates pushed away from 1/2 by an amount set by the density level.
        const double shift = 0.1 * cluster_separation(cond.density);
        truth.covariate_centers.resize(cond.components, cond.covariates);
        for (int k = 0; k < cond.components; ++k) {
            for (int j = 0; j < cond.covariates; ++j) {
                truth.covariate_centers(k, j) = 0.5 + (uniform01(rng) < 0.5 ? -shift : shift);
            }
        }
    } else {
        truth.covariate_centers =
            simplex_centers(cond.components, cond.covariates, cluster_separation(cond.density));
    }
    return truth;
}

Dataset generate_dataset(const GroundTruth& truth, const SynthCondition& cond, Rng& rng) {
    cond.validate();
    const int k_true = truth.components();
    const int m = truth.graphs.empty() ? cond.nodes : truth.graphs.front().size();
    const auto p = static_cast<int>(truth.covariate_centers.cols());
    const int n_total = k_true * cond.per_component;

    Eigen::MatrixXd y(n_total, m);
    Eigen::MatrixXd x(n_total, p);
    std::vector<int> z(static_cast<std::size_t>(n_total));
    int row = 0;
    for (int k = 0; k < k_true; ++k) {
        for (int r = 0; r < cond.per_component; ++r, ++row) {
            for (int j = 0; j < p; ++j) {
                const double c = truth.covariate_centers(k, j);
                x(row, j) = truth.binary_covariates ? (uniform01(rng) < c ? 1.0 : 0.0)
                                                    : c + standard_normal(rng);
            }
            y.row(row) = sample_observation(truth.graphs[k], truth.params[k], rng).transpose();
            z[row] = k + 1;
        }
    }

    std::vector<int> order(static_cast<std::size_t>(n_total));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    Dataset data;
    data.y.resize(n_total, m);
    data.x.resize(n_total, p);
    std::vector<int> zs(static_cast<std::size_t>(n_total));
    for (int i = 0; i < n_total; ++i) {
        data.y.row(i) = y.row(order[i]);
        data.x.row(i) = x.row(order[i]);
        zs[i] = z[order[i]];
    }
    for (int i = 0; i < m; ++i) data.y_names.push_back("y" + std::to_string(i + 1));
    for (int j = 0; j < p; ++j) data.x_names.push_back("x" + std::to_string(j + 1));
    data.z_true = std::move(zs);
    return data;
}

std::string format_ground_truth(const GroundTruth& truth, const SynthCondition& cond) {
    json j;
    j["schema"] = "mixbn.truth";
    j["version"] = kTruthSchemaVersion;
    j["condition"] = {{"components", cond.components},
                      {"per_component", cond.per_component},
                      {"sparsity", to_string(cond.sparsity)},
                      {"cluster_density", to_string(cond.density)},
                      {"seed", cond.seed},
                      {"nodes", cond.nodes},
                      {"covariates", cond.covariates},
                      {"binary_covariates", cond.binary_covariates}};
    j["K"] = truth.components();
    j["M"] = truth.graphs.empty() ? 0 : truth.graphs.front().size();
    json graphs = json::array();
    json params = json::array();
    for (int k = 0; k < truth.components(); ++k) {
        graphs.push_back(truth.graphs[k].to_bitstring());
        params.push_back(flatten_params(truth.graphs[k], truth.params[k]));
    }
    j["graphs"] = graphs;
    j["params"] = params;
    j["edge_probabilities"] = truth.edge_probabilities;
    json centers = json::array();
    for (Eigen::Index k = 0; k < truth.covariate_centers.rows(); ++k) {
        std::vector<double> row(truth.covariate_centers.cols());
        for (Eigen::Index c = 0; c < truth.covariate_centers.cols(); ++c) {
            row[c] = truth.covariate_centers(k, c);
        }
        centers.push_back(row);
    }
    j["covariate_centers"] = centers;
    j["binary_covariates"] = truth.binary_covariates;
    return j.dump(2) + "\n";
}

GroundTruth parse_ground_truth(const std::string& text, const std::string& origin) {
    try {
        const json j = json::parse(text);
        if (j.value("schema", "") != "mixbn.truth") {
            throw ParseError(origin + ": not a mixbn ground-truth file");
        }
        const int version = j.at("version").get<int>();
        if (version != kTruthSchemaVersion) {
            throw ParseError(origin + ": unsupported ground-truth schema version " +
                             std::to_string(version));
        }
        GroundTruth truth;
        const auto& graphs = j.at("graphs");
        const auto& params = j.at("params");
        if (graphs.size() != params.size()) {
            throw ParseError(origin + ": graph and parameter counts differ");
        }
        for (std::size_t k = 0; k < graphs.size(); ++k) {
            Dag g = Dag::from_bitstring(graphs.at(k).get<std::string>());
            truth.params.push_back(unflatten_params(g, params.at(k).get<std::vector<double>>()));
            truth.graphs.push_back(std::move(g));
        }
        truth.edge_probabilities = j.value("edge_probabilities", std::vector<double>{});
        const auto centers = j.at("covariate_centers").get<std::vector<std::vector<double>>>();
        const std::size_t p = centers.empty() ? 0 : centers.front().size();
        truth.covariate_centers.resize(static_cast<Eigen::Index>(centers.size()),
                                       static_cast<Eigen::Index>(p));
        for (std::size_t k = 0; k < centers.size(); ++k) {
            if (centers[k].size() != p) throw ParseError(origin + ": ragged covariate centres");
            for (std::size_t c = 0; c < p; ++c) truth.covariate_centers(k, c) = centers[k][c];
        }
        truth.binary_covariates = j.value("binary_covariates", false);
        return truth;
    } catch (const json::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

void write_ground_truth(const std::string& path, const GroundTruth& truth, const SynthCondition& cond) {
    write_file_atomic(path, format_ground_truth(truth, cond));
}

GroundTruth read_ground_truth(const std::string& path) {
    return parse_ground_truth(read_file(path), path);
}

}  // namespace mixbn

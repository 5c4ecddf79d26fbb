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

#include <string>
#include <vector>

#include "mixbn/mixbn.hpp"

namespace mixbn::testing {

/// A metric evaluated on a hand-built fixture next to its hand-computed value.
struct FixtureCheck {
    std::string name;
    double computed = 0.0;
    double expected = 0.0;
};

/// MSHD, LMPPD and WAIC on small traces whose values are worked out by hand.
std::vector<FixtureCheck> metric_fixture_checks();

/// Markov-equivalence key built from the definition: skeleton plus the set
/// of v-structures a -> c <- b with a, b non-adjacent.
std::string equivalence_key(const Dag& g);

/// Largest |graph_score(a) - graph_score(b)| over all Markov-equivalent DAG
/// pairs on m nodes (exhaustive enumeration).
double max_equivalence_gap(int m, const Eigen::MatrixXd& data, const NodePrior& prior = {});

/// A trace whose records carry the given graphs (one vector per record) and
/// placeholder parameters.
ChainTrace trace_with_graphs(int nodes, const std::vector<std::vector<Dag>>& graphs);

}  // namespace mixbn::testing

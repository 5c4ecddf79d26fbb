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

#include "mixbn/graphs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "mixbn/error.hpp"

namespace mixbn {

namespace {

NodeMask bit(int i) { return NodeMask{1} << i; }

}  // namespace

Dag::Dag(int m) {
    if (m < 1 || m > kMaxNodes) {
        throw ParameterError("Dag: node count " + std::to_string(m) + " outside [1, " +
                             std::to_string(kMaxNodes) + "]");
    }
    parents_.assign(static_cast<std::size_t>(m), 0);
}

void Dag::check_node(int i) const {
    if (i < 0 || i >= size()) {
        throw ParameterError("Dag: node index " + std::to_string(i) + " out of range for m=" +
                             std::to_string(size()));
    }
}

int Dag::edge_count() const {
    int e = 0;
    for (NodeMask mask : parents_) e += std::popcount(mask);
    return e;
}

bool Dag::has_edge(int from, int to) const {
    check_node(from);
    check_node(to);
    return (parents_[to] & bit(from)) != 0;
}

bool Dag::reaches(int a, int b) const {
    check_node(a);
    check_node(b);
    // Walk backwards from b through parent masks.
    NodeMask visited = 0;
    NodeMask frontier = parents_[b];
    while (frontier) {
        if (frontier & bit(a)) return true;
        visited |= frontier;
        NodeMask next = 0;
        for (NodeMask f = frontier; f; f &= f - 1) next |= parents_[std::countr_zero(f)];
        frontier = next & ~visited;
    }
    return false;
}

bool Dag::add_would_create_cycle(int from, int to) const {
    if (from == to) return true;
    return reaches(to, from);
}

bool Dag::reverse_would_create_cycle(int from, int to) const {
    if (!has_edge(from, to)) {
        throw ParameterError("Dag: cannot reverse absent edge " + std::to_string(from) + "->" +
                             std::to_string(to));
    }
    // After dropping from->to, adding to->from closes a cycle iff from still reaches to.
    Dag without = *this;
    without.parents_[to] &= ~bit(from);
    return without.reaches(from, to);
}

void Dag::add_edge(int from, int to) {
    check_node(from);
    check_node(to);
    if (from == to) throw StructuralError("Dag: self-loop on node " + std::to_string(from));
    if (has_edge(from, to)) return;
    if (has_edge(to, from) || add_would_create_cycle(from, to)) {
        throw StructuralError("Dag: edge " + std::to_string(from) + "->" + std::to_string(to) +
                              " would create a cycle");
    }
    parents_[to] |= bit(from);
}

void Dag::remove_edge(int from, int to) {
    check_node(from);
    check_node(to);
    parents_[to] &= ~bit(from);
}

void Dag::reverse_edge(int from, int to) {
    if (reverse_would_create_cycle(from, to)) {
        throw StructuralError("Dag: reversing " + std::to_string(from) + "->" +
                              std::to_string(to) + " would create a cycle");
    }
    parents_[to] &= ~bit(from);
    parents_[from] |= bit(to);
}

NodeMask Dag::parent_mask(int i) const {
    check_node(i);
    return parents_[i];
}

std::vector<int> Dag::parents(int i) const {
    check_node(i);
    std::vector<int> out;
    for (NodeMask f = parents_[i]; f; f &= f - 1) out.push_back(std::countr_zero(f));
    return out;
}

std::vector<int> Dag::children(int i) const {
    check_node(i);
    std::vector<int> out;
    for (int c = 0; c < size(); ++c) {
        if (parents_[c] & bit(i)) out.push_back(c);
    }
    return out;
}

std::vector<std::pair<int, int>> Dag::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int from = 0; from < size(); ++from) {
        for (int to = 0; to < size(); ++to) {
            if (parents_[to] & bit(from)) out.emplace_back(from, to);
        }
    }
    return out;
}

std::vector<int> Dag::topological_order() const {
    const int m = size();
    std::vector<int> order;
    order.reserve(m);
    NodeMask placed = 0;
    while (static_cast<int>(order.size()) < m) {
        int next = -1;
        for (int i = 0; i < m; ++i) {
            if (!(placed & bit(i)) && (parents_[i] & ~placed) == 0) {
                next = i;
                break;
            }
        }
        if (next < 0) throw StructuralError("Dag: graph contains a directed cycle");
        order.push_back(next);
        placed |= bit(next);
    }
    return order;
}

std::string Dag::to_bitstring() const {
    const int m = size();
    std::string bits(static_cast<std::size_t>(m) * m, '0');
    for (int to = 0; to < m; ++to) {
        for (NodeMask f = parents_[to]; f; f &= f - 1) {
            bits[static_cast<std::size_t>(std::countr_zero(f)) * m + to] = '1';
        }
    }
    return bits;
}

Dag Dag::from_bitstring(std::string_view bits) {
    const auto m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(bits.size()))));
    if (m < 1 || static_cast<std::size_t>(m) * m != bits.size()) {
        throw ParseError("adjacency bitstring length " + std::to_string(bits.size()) +
                         " is not a positive perfect square");
    }
    std::vector<NodeMask> masks(static_cast<std::size_t>(m), 0);
    for (int from = 0; from < m; ++from) {
        for (int to = 0; to < m; ++to) {
            const char c = bits[static_cast<std::size_t>(from) * m + to];
            if (c == '1') {
                masks[to] |= bit(from);
            } else if (c != '0') {
                throw ParseError(std::string("adjacency bitstring contains '") + c + "'");
            }
        }
    }
    return from_parent_masks(std::move(masks));
}

Dag Dag::from_parent_masks(std::vector<NodeMask> masks) {
    Dag dag(static_cast<int>(masks.size()));
    for (std::size_t i = 0; i < masks.size(); ++i) {
        if (masks[i] & bit(static_cast<int>(i))) {
            throw StructuralError("Dag: self-loop on node " + std::to_string(i));
        }
        if (masks[i] >> masks.size()) {
            throw ParameterError("Dag: parent mask references a node beyond m");
        }
    }
    if (!is_acyclic(masks)) throw StructuralError("Dag: graph contains a directed cycle");
    dag.parents_ = std::move(masks);
    return dag;
}

bool is_acyclic(const std::vector<NodeMask>& parent_masks) {
    const int m = static_cast<int>(parent_masks.size());
    NodeMask placed = 0;
    for (int round = 0; round < m; ++round) {
        bool progressed = false;
        for (int i = 0; i < m; ++i) {
            if (!(placed & bit(i)) && (parent_masks[i] & ~placed) == 0) {
                placed |= bit(i);
                progressed = true;
            }
        }
        if (!progressed) break;
    }
    return std::popcount(placed) == m;
}

void Cpdag::set_undirected(int a, int b) {
    set_mark(a, b, true);
    set_mark(b, a, true);
}

void Cpdag::set_directed(int from, int to) {
    set_mark(from, to, true);
    set_mark(to, from, false);
}

std::vector<std::pair<int, int>> Cpdag::directed_edges() const {
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a < m_; ++a) {
        for (int b = 0; b < m_; ++b) {
            if (is_directed(a, b)) out.emplace_back(a, b);
        }
    }
    return out;
}

std::vector<std::pair<int, int>> Cpdag::undirected_edges() const {
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a < m_; ++a) {
        for (int b = a + 1; b < m_; ++b) {
            if (is_undirected(a, b)) out.emplace_back(a, b);
        }
    }
    return out;
}

Dag random_dag(int m, double p, Rng& rng) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ParameterError("random_dag: edge probability " + std::to_string(p) +
                             " outside [0, 1]");
    }
    Dag dag(m);
    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<NodeMask> masks(static_cast<std::size_t>(m), 0);
    for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
            if (uniform01(rng) < p) masks[order[b]] |= bit(order[a]);
        }
    }
    return Dag::from_parent_masks(std::move(masks));
}

std::vector<int> parents(const Dag& dag, int i) { return dag.parents(i); }

Cpdag to_cpdag(const Dag& dag) {
    const int m = dag.size();
    Cpdag g(m);
    for (auto [from, to] : dag.edges()) g.set_undirected(from, to);

    // v-structures a -> c <- b with a, b non-adjacent
    for (int c = 0; c < m; ++c) {
        const auto pa = dag.parents(c);
        for (std::size_t i = 0; i < pa.size(); ++i) {
            for (std::size_t j = i + 1; j < pa.size(); ++j) {
                if (!dag.adjacent(pa[i], pa[j])) {
                    g.set_directed(pa[i], c);
                    g.set_directed(pa[j], c);
                }
            }
        }
    }

    bool changed = true;
    while (changed) {
        changed = false;
        for (int a = 0; a < m; ++a) {
            for (int b = 0; b < m; ++b) {
                if (a == b || !g.is_undirected(a, b)) continue;
                bool orient = false;
                for (int c = 0; c < m && !orient; ++c) {
                    if (c == a || c == b) continue;
                    // R1: c -> a - b, c and b non-adjacent
                    if (g.is_directed(c, a) && !g.adjacent(c, b)) orient = true;
                    // R2: a -> c -> b with a - b
                    if (g.is_directed(a, c) && g.is_directed(c, b)) orient = true;
                }
                // R3: a - c -> b, a - d -> b, c and d non-adjacent
                for (int c = 0; c < m && !orient; ++c) {
                    if (c == a || c == b || !g.is_undirected(a, c) || !g.is_directed(c, b)) {
                        continue;
                    }
                    for (int d = c + 1; d < m && !orient; ++d) {
                        if (d == a || d == b) continue;
                        if (g.is_undirected(a, d) && g.is_directed(d, b) && !g.adjacent(c, d)) {
                            orient = true;
                        }
                    }
                }
                if (orient) {
                    g.set_directed(a, b);
                    changed = true;
                }
            }
        }
    }
    return g;
}

int shd(const Cpdag& a, const Cpdag& b) {
    if (a.size() != b.size()) {
        throw ParameterError("shd: node counts differ (" + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()) + ")");
    }
    const int m = a.size();
    int distance = 0;
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            const bool same = a.adjacent(i, j) == b.adjacent(i, j) &&
                              a.is_directed(i, j) == b.is_directed(i, j) &&
                              a.is_directed(j, i) == b.is_directed(j, i);
            if (!same) ++distance;
        }
    }
    return distance;
}

int shd(const Dag& a, const Dag& b) {
    if (a.size() != b.size()) {
        throw ParameterError("shd: node counts differ (" + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()) + ")");
    }
    return shd(to_cpdag(a), to_cpdag(b));
}

std::vector<Dag> enumerate_dags(int m) {
    if (m < 1 || m > 5) {
        throw ParameterError("enumerate_dags: m=" + std::to_string(m) + " outside [1, 5]");
    }
    // Each node's parent mask ranges over subsets of the other m-1 nodes.
    const int other = m - 1;
    const std::uint64_t per_node = std::uint64_t{1} << other;
    std::uint64_t total = 1;
    for (int i = 0; i < m; ++i) total *= per_node;

    std::vector<Dag> out;
    std::vector<NodeMask> masks(static_cast<std::size_t>(m));
    for (std::uint64_t code = 0; code < total; ++code) {
        std::uint64_t rest = code;
        for (int i = 0; i < m; ++i) {
            const auto compact = static_cast<NodeMask>(rest % per_node);
            rest /= per_node;
            // Spread the (m-1)-bit compact mask around position i.
            const NodeMask low = compact & (bit(i) - 1);
            const NodeMask high = (compact >> i) << (i + 1);
            masks[i] = low | high;
        }
        if (is_acyclic(masks)) out.push_back(Dag::from_parent_masks(masks));
    }
    return out;
}

double count_dags(int m) {
    // a(n) = sum_{k=1..n} (-1)^{k+1} C(n,k) 2^{k(n-k)} a(n-k)
    std::vector<double> a(static_cast<std::size_t>(m) + 1, 0.0);
    a[0] = 1.0;
    for (int n = 1; n <= m; ++n) {
        double sum = 0.0;
        double binom = 1.0;
        for (int k = 1; k <= n; ++k) {
            binom = binom * (n - k + 1) / k;
            const double sign = (k % 2 == 1) ? 1.0 : -1.0;
            sum += sign * binom * std::pow(2.0, k * (n - k)) * a[n - k];
        }
        a[n] = sum;
    }
    return a[m];
}

}  // namespace mixbn

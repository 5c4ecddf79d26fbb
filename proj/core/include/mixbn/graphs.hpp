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
#include <string_view>
#include <utility>
#include <vector>

#include "mixbn/random.hpp"

namespace mixbn {

/// Bitmask over node indices; bit j set means node j is a member.
using NodeMask = std::uint32_t;

/// Directed acyclic graph over `size()` nodes, stored as one parent mask per node.
///
/// Every mutator preserves acyclicity: an edit that would close a directed
/// cycle throws StructuralError and leaves the graph unchanged.
class Dag {
public:
    static constexpr int kMaxNodes = 15;

    Dag() = default;
    explicit Dag(int m);

    int size() const { return static_cast<int>(parents_.size()); }
    int edge_count() const;

    bool has_edge(int from, int to) const;
    bool adjacent(int a, int b) const { return has_edge(a, b) || has_edge(b, a); }

    void add_edge(int from, int to);
    void remove_edge(int from, int to);
    void reverse_edge(int from, int to);

    /// True when adding from->to would close a cycle, i.e. `to` already reaches `from`.
    bool add_would_create_cycle(int from, int to) const;
    /// True when reversing the existing edge from->to would close a cycle.
    bool reverse_would_create_cycle(int from, int to) const;
    /// Directed path a ~> b of length >= 1.
    bool reaches(int a, int b) const;

    NodeMask parent_mask(int i) const;
    std::vector<int> parents(int i) const;
    std::vector<int> children(int i) const;
    std::vector<std::pair<int, int>> edges() const;

    /// Kahn ordering, ties broken by smallest index.
    std::vector<int> topological_order() const;

    /// Row-major 0/1 string of length m*m; entry (j, i) is 1 iff j -> i.
    std::string to_bitstring() const;
    static Dag from_bitstring(std::string_view bits);

    /// Builds a DAG from raw parent masks; throws StructuralError on cycles.
    static Dag from_parent_masks(std::vector<NodeMask> masks);

    const std::vector<NodeMask>& parent_masks() const { return parents_; }

    friend bool operator==(const Dag&, const Dag&) = default;
    friend bool operator<(const Dag& a, const Dag& b) { return a.parents_ < b.parents_; }

private:
    void check_node(int i) const;

    std::vector<NodeMask> parents_;
};

/// True when the parent masks admit a topological order.
bool is_acyclic(const std::vector<NodeMask>& parent_masks);

/// Completed partially directed acyclic graph (essential graph).
class Cpdag {
public:
    Cpdag() = default;
    explicit Cpdag(int m) : m_(m), marks_(static_cast<std::size_t>(m) * m, 0) {}

    int size() const { return m_; }

    bool adjacent(int a, int b) const { return mark(a, b) || mark(b, a); }
    bool is_directed(int from, int to) const { return mark(from, to) && !mark(to, from); }
    bool is_undirected(int a, int b) const { return mark(a, b) && mark(b, a); }

    void set_undirected(int a, int b);
    void set_directed(int from, int to);

    std::vector<std::pair<int, int>> directed_edges() const;
    /// Pairs (a, b) with a < b.
    std::vector<std::pair<int, int>> undirected_edges() const;

    friend bool operator==(const Cpdag&, const Cpdag&) = default;

private:
    bool mark(int a, int b) const { return marks_[static_cast<std::size_t>(a) * m_ + b] != 0; }
    void set_mark(int a, int b, bool on) {
        marks_[static_cast<std::size_t>(a) * m_ + b] = on ? 1 : 0;
    }

    int m_ = 0;
    // a -> b sets (a, b) only; a - b sets both.
    std::vector<std::uint8_t> marks_;
};

/// Erdős–Rényi DAG: uniform node permutation, then each order-compatible
/// pair joined independently with probability p.
Dag random_dag(int m, double p, Rng& rng);

std::vector<int> parents(const Dag& dag, int i);

/// Orients v-structures and closes under Meek's rules R1-R3.
Cpdag to_cpdag(const Dag& dag);

/// Structural Hamming distance between CPDAGs: one unit per node pair
/// whose CPDAG state (absent, a->b, b->a, a-b) differs.
int shd(const Cpdag& a, const Cpdag& b);
int shd(const Dag& a, const Dag& b);

/// Every DAG on m nodes (m <= 5), in a fixed enumeration order.
std::vector<Dag> enumerate_dags(int m);

/// Number of labelled DAGs on m nodes (Robinson's recurrence), as a double.
double count_dags(int m);

}  // namespace mixbn

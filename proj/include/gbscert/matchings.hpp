/*
 * Copyright 2026 The gbscert Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gbscert/linalg.hpp"

namespace gbscert {

/// Simple undirected graph stored as a 0/1 symmetric adjacency matrix with
/// zero diagonal.
class Graph {
public:
    static Graph from_adjacency(ComplexMatrix adjacency);
    static Graph from_edges(std::size_t nodes, const std::vector<std::pair<int, int>>& edges);
    static Graph complete(std::size_t nodes);

    std::size_t node_count() const { return static_cast<std::size_t>(adjacency_.rows()); }
    const ComplexMatrix& adjacency() const { return adjacency_; }
    bool has_edge(std::size_t i, std::size_t j) const;

private:
    explicit Graph(ComplexMatrix adjacency) : adjacency_(std::move(adjacency)) {}
    ComplexMatrix adjacency_;
};

/// Sum over all partitions of {0..n-1} into unordered pairs of the product of
/// the paired entries. Haf of the 0x0 matrix is 1 and odd sizes give 0.
///
/// Uses the pairing recursion Haf(M) = sum_j M_{0j} Haf(M without {0, j}),
/// (n-1)!! leaves; intended for n <= 16.
Complex hafnian(const ComplexMatrix& m);

/// Largest graph accepted by the enumeration oracle.
inline constexpr std::size_t kMatchingOracleMaxNodes = 14;

/// Counts perfect matchings by listing every pairing of the vertex set and
/// keeping those whose pairs are all edges. Factorial time; reference only.
std::uint64_t count_perfect_matchings(const Graph& g);

inline constexpr std::size_t kPermanentMaxSize = 20;

/// Ryser inclusion-exclusion with Gray-code subset order, O(2^n n).
Complex permanent(const ComplexMatrix& m);

/// [[0, M], [M^T, 0]]: the bipartite adjacency whose hafnian is Per(M).
ComplexMatrix bipartite_block(const ComplexMatrix& m);

}  // namespace gbscert

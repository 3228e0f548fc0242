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

#include "gbscert/matchings.hpp"

#include <bit>
#include <cmath>

#include "gbscert/error.hpp"

namespace gbscert {

Graph Graph::from_adjacency(ComplexMatrix adjacency) {
    require(adjacency.rows() >= 1 && adjacency.rows() == adjacency.cols(),
            ErrorKind::InvalidDimension, "Graph: adjacency must be square and non-empty");
    for (Eigen::Index i = 0; i < adjacency.rows(); ++i)
        for (Eigen::Index j = 0; j < adjacency.cols(); ++j) {
            const Complex v = adjacency(i, j);
            require(v == Complex(0.0) || v == Complex(1.0), ErrorKind::Parameter,
                    "Graph: adjacency entries must be 0 or 1");
            require(v == adjacency(j, i), ErrorKind::SymmetryViolation,
                    "Graph: adjacency must be symmetric");
        }
    for (Eigen::Index i = 0; i < adjacency.rows(); ++i)
        require(adjacency(i, i) == Complex(0.0), ErrorKind::Parameter,
                "Graph: simple graphs have no self loops");
    return Graph(std::move(adjacency));
}

Graph Graph::from_edges(std::size_t nodes, const std::vector<std::pair<int, int>>& edges) {
    const auto n = static_cast<Eigen::Index>(nodes);
    ComplexMatrix a = ComplexMatrix::Zero(n, n);
    for (auto [i, j] : edges) {
        require(i >= 0 && j >= 0 && i < n && j < n && i != j, ErrorKind::Parameter,
                "Graph: invalid edge");
        a(i, j) = a(j, i) = 1.0;
    }
    return from_adjacency(std::move(a));
}

Graph Graph::complete(std::size_t nodes) {
    const auto n = static_cast<Eigen::Index>(nodes);
    ComplexMatrix a = ComplexMatrix::Ones(n, n);
    a.diagonal().setZero();
    return from_adjacency(std::move(a));
}

bool Graph::has_edge(std::size_t i, std::size_t j) const {
    return adjacency_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != Complex(0.0);
}

namespace {

// Pairs the last active index with each other active index in turn. The
// active set is idx[0..len); swapping keeps it contiguous without copies.
Complex hafnian_rec(const ComplexMatrix& m, std::vector<Eigen::Index>& idx, std::size_t len) {
    if (len == 0) return Complex(1.0, 0.0);
    const Eigen::Index a = idx[len - 1];
    Complex sum(0.0, 0.0);
    for (std::size_t p = 0; p + 1 < len; ++p) {
        const Complex w = m(a, idx[p]);
        if (w == Complex(0.0, 0.0)) continue;
        std::swap(idx[p], idx[len - 2]);
        sum += w * hafnian_rec(m, idx, len - 2);
        std::swap(idx[p], idx[len - 2]);
    }
    return sum;
}

}  // namespace

Complex hafnian(const ComplexMatrix& m) {
    require(m.rows() == m.cols(), ErrorKind::InvalidDimension, "hafnian: matrix must be square");
    const auto n = static_cast<std::size_t>(m.rows());
    if (n == 0) return Complex(1.0, 0.0);
    const double tol = 1e-10 * std::max(1.0, m.cwiseAbs().maxCoeff());
    require(is_symmetric(m, tol), ErrorKind::SymmetryViolation, "hafnian: matrix is not symmetric");
    if (n % 2 == 1) return Complex(0.0, 0.0);
    std::vector<Eigen::Index> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<Eigen::Index>(i);
    return hafnian_rec(m, idx, n);
}

namespace {

void enumerate_pairings(const Graph& g, std::vector<bool>& used,
                        std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                        std::uint64_t& count) {
    const std::size_t n = g.node_count();
    std::size_t first = 0;
    while (first < n && used[first]) ++first;
    if (first == n) {
        for (auto [i, j] : pairs)
            if (!g.has_edge(i, j)) return;
        ++count;
        return;
    }
    used[first] = true;
    for (std::size_t j = first + 1; j < n; ++j) {
        if (used[j]) continue;
        used[j] = true;
        pairs.emplace_back(first, j);
        enumerate_pairings(g, used, pairs, count);
        pairs.pop_back();
        used[j] = false;
    }
    used[first] = false;
}

}  // namespace

std::uint64_t count_perfect_matchings(const Graph& g) {
    const std::size_t n = g.node_count();
    require(n <= kMatchingOracleMaxNodes, ErrorKind::SizeLimit,
            "count_perfect_matchings: enumeration oracle is limited to 14 nodes");
    if (n % 2 == 1) return 0;
    std::vector<bool> used(n, false);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::uint64_t count = 0;
    enumerate_pairings(g, used, pairs, count);
    return count;
}

Complex permanent(const ComplexMatrix& m) {
    require(m.rows() == m.cols(), ErrorKind::InvalidDimension, "permanent: matrix must be square");
    const auto n = static_cast<std::size_t>(m.rows());
    if (n == 0) return Complex(1.0, 0.0);
    require(n <= kPermanentMaxSize, ErrorKind::SizeLimit, "permanent: exact evaluation limited to n <= 20");

    // Per(M) = (-1)^n sum_S (-1)^|S| prod_i sum_{j in S} M_ij
    std::vector<Complex> row_sums(n, Complex(0.0, 0.0));
    Complex total(0.0, 0.0);
    std::uint64_t gray = 0;
    const std::uint64_t subsets = std::uint64_t{1} << n;
    for (std::uint64_t k = 1; k < subsets; ++k) {
        const int bit = std::countr_zero(k);
        gray ^= std::uint64_t{1} << bit;
        const bool added = (gray >> bit) & 1U;
        for (std::size_t i = 0; i < n; ++i) {
            const Complex v = m(static_cast<Eigen::Index>(i), bit);
            row_sums[i] += added ? v : -v;
        }
        Complex prod(1.0, 0.0);
        for (const Complex& s : row_sums) prod *= s;
        const bool odd = std::popcount(gray) % 2 == 1;
        total += odd ? -prod : prod;
    }
    return (n % 2 == 1) ? -total : total;
}

ComplexMatrix bipartite_block(const ComplexMatrix& m) {
    require(m.rows() == m.cols(), ErrorKind::InvalidDimension, "bipartite_block: matrix must be square");
    const auto n = m.rows();
    ComplexMatrix out = ComplexMatrix::Zero(2 * n, 2 * n);
    out.topRightCorner(n, n) = m;
    out.bottomLeftCorner(n, n) = m.transpose();
    return out;
}

}  // namespace gbscert

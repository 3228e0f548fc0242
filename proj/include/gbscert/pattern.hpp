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

#include <compare>
#include <cstddef>
#include <numeric>
#include <vector>

namespace gbscert {

/// Photon counts per output mode; the outcome of one detection event.
struct PhotonPattern {
    std::vector<int> counts;

    PhotonPattern() = default;
    explicit PhotonPattern(std::vector<int> c) : counts(std::move(c)) {}
    PhotonPattern(std::initializer_list<int> c) : counts(c) {}

    std::size_t modes() const { return counts.size(); }
    int total() const { return std::accumulate(counts.begin(), counts.end(), 0); }

    static PhotonPattern vacuum(std::size_t m) { return PhotonPattern(std::vector<int>(m, 0)); }

    auto operator<=>(const PhotonPattern&) const = default;
    bool operator==(const PhotonPattern&) const = default;
};

/// Every pattern of `total` photons in `modes` modes, in lexicographically
/// descending order of counts.
std::vector<PhotonPattern> enumerate_patterns(std::size_t modes, int total);

/// Number of patterns with exactly `total` photons, C(total + modes - 1, total),
/// saturating at the largest representable double.
double pattern_count(std::size_t modes, int total);

/// log(n!) summed over the counts.
double log_factorial_product(const PhotonPattern& pattern);
double factorial_product(const PhotonPattern& pattern);

}  // namespace gbscert

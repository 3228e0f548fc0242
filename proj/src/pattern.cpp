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

#include "gbscert/pattern.hpp"

#include <cmath>

#include "gbscert/error.hpp"

namespace gbscert {

namespace {

void fill(std::vector<int>& counts, std::size_t mode, int remaining,
          std::vector<PhotonPattern>& out) {
    if (mode + 1 == counts.size()) {
        counts[mode] = remaining;
        out.emplace_back(counts);
        return;
    }
    for (int k = remaining; k >= 0; --k) {
        counts[mode] = k;
        fill(counts, mode + 1, remaining - k, out);
    }
}

}  // namespace

std::vector<PhotonPattern> enumerate_patterns(std::size_t modes, int total) {
    require(modes >= 1, ErrorKind::InvalidDimension, "enumerate_patterns: need at least one mode");
    require(total >= 0, ErrorKind::Parameter, "enumerate_patterns: negative photon number");
    std::vector<PhotonPattern> out;
    std::vector<int> counts(modes, 0);
    fill(counts, 0, total, out);
    return out;
}

double pattern_count(std::size_t modes, int total) {
    double c = 1.0;
    for (int k = 1; k <= total; ++k) c = c * static_cast<double>(modes - 1 + k) / k;
    return std::round(c);
}

double log_factorial_product(const PhotonPattern& pattern) {
    double s = 0.0;
    for (int k : pattern.counts) s += std::lgamma(static_cast<double>(k) + 1.0);
    return s;
}

double factorial_product(const PhotonPattern& pattern) {
    double p = 1.0;
    for (int k : pattern.counts)
        for (int j = 2; j <= k; ++j) p *= j;
    return p;
}

}  // namespace gbscert

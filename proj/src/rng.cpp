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

#include "gbscert/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gbscert/error.hpp"

namespace gbscert {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> words) {
    std::uint64_t h = splitmix64(seed);
    for (std::uint64_t w : words) h = splitmix64(h ^ splitmix64(w + 0x632be59bd9b4e019ULL));
    return h;
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
    return Rng(derive_seed(seed, {tag, index}));
}

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
    require(bound > 0, ErrorKind::Parameter, "Rng::below: bound must be positive");
    // Rejection keeps the result exactly uniform.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % bound;
}

double Rng::normal() {
    if (has_spare_normal_) {
        has_spare_normal_ = false;
        return spare_normal_;
    }
    // Box-Muller; 1 - u keeps the logarithm finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = radius * std::sin(angle);
    has_spare_normal_ = true;
    return radius * std::cos(angle);
}

std::uint64_t Rng::poisson(double mean) {
    require(mean >= 0.0 && std::isfinite(mean), ErrorKind::Parameter,
            "Rng::poisson: mean must be finite and non-negative");
    if (mean == 0.0) return 0;
    // Inversion loses precision once exp(-mean) gets tiny; Poisson laws are
    // additive so large means are split in halves.
    if (mean > 30.0) return poisson(0.5 * mean) + poisson(0.5 * mean);
    const double u = uniform();
    double term = std::exp(-mean);
    double cumulative = term;
    std::uint64_t k = 0;
    while (u >= cumulative) {
        ++k;
        term *= mean / static_cast<double>(k);
        const double next = cumulative + term;
        if (next == cumulative) break;
        cumulative = next;
    }
    return k;
}

std::size_t Rng::categorical_cdf(std::span<const double> cumulative) {
    require(!cumulative.empty(), ErrorKind::Parameter, "Rng::categorical_cdf: empty table");
    const double u = uniform() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    return static_cast<std::size_t>(it - cumulative.begin());
}

}  // namespace gbscert

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
#include <initializer_list>
#include <random>
#include <span>

namespace gbscert {

/// Seeded generator used everywhere randomness is consumed.
///
/// The engine is std::mt19937_64 (its output sequence is fixed by the C++
/// standard); all distributions are implemented here instead of using the
/// <random> distribution classes, whose algorithms are implementation-defined.
/// Together this makes every sample stream bit-exact across toolchains.
///
/// Independent streams are derived from (seed, stream tag, index) through
/// SplitMix64 so that sample i of a run does not depend on how many samples
/// were drawn before it. Parallel and serial generation are then identical.
class Rng {
public:
    static constexpr const char* kGeneratorName = "mt19937_64+splitmix64";
    static constexpr int kGeneratorVersion = 1;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Stream for (seed, tag, index); tags separate unrelated consumers.
    static Rng stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index = 0);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);
    double normal();
    std::uint64_t poisson(double mean);
    /// Index i with probability weights[i] / sum(weights), by inversion.
    std::size_t categorical_cdf(std::span<const double> cumulative);

    template <typename T>
    void shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Mixes a sequence of words into one 64-bit seed.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> words);

}  // namespace gbscert

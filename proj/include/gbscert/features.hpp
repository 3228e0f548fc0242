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

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "gbscert/gaussian.hpp"
#include "gbscert/orbits.hpp"

namespace gbscert {

/// Orbit probabilities ([1..1], [2,1..1], [2,2,1..1]) of one photon sector.
struct FeatureVector {
    int n = 0;
    std::size_t m = 0;
    std::array<double, 3> values{};
    std::array<double, 3> std_errors{};
    ModelKind label = ModelKind::Smsv;
};

/// Orders three estimates of a common (n, m) sector by doubles 0, 1, 2.
FeatureVector feature_vector(std::span<const OrbitEstimate> estimates, ModelKind label);

enum class Normalization { Euclidean, UnitSum };
std::string_view to_string(Normalization mode);
Normalization parse_normalization(std::string_view name);

/// Rescales the triple to unit Euclidean norm (or unit sum); errors scale with it.
FeatureVector normalize_feature(const FeatureVector& f, Normalization mode = Normalization::Euclidean);

double linear_kernel(const FeatureVector& f, const FeatureVector& g);

struct KernelStats {
    double mean = 0.0;
    double std = 0.0;
    std::uint64_t pair_count = 0;
    int n = 0;
    ModelKind kind = ModelKind::Smsv;
};

/// Kernel values of all unordered pairs i < j, in (i, j) lexicographic order.
std::vector<double> pairwise_kernels(std::span<const FeatureVector> features);

/// Mean and (population) standard deviation over all C(N, 2) pairs.
KernelStats kernel_stats(std::span<const FeatureVector> features);

inline constexpr double kSeparationThreshold = 3.0;

struct SeparationReport {
    double separation = 0.0;
    /// std_a^2 / std_b^2; infinite when b has zero spread and a does not.
    double variance_ratio = 0.0;
    bool discriminated = false;
};

/// |mean_a - mean_b| / sqrt(std_a^2 + std_b^2), discriminated at >= 3.
SeparationReport kernel_separation(const KernelStats& a, const KernelStats& b);

}  // namespace gbscert

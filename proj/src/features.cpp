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

#include "gbscert/features.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gbscert/error.hpp"
#include "gbscert/stats.hpp"

namespace gbscert {

FeatureVector feature_vector(std::span<const OrbitEstimate> estimates, ModelKind label) {
    require(estimates.size() == 3, ErrorKind::Assembly, "feature_vector: exactly three orbit estimates required");
    FeatureVector f;
    f.n = estimates[0].orbit.total_photons();
    f.m = estimates[0].orbit.modes();
    f.label = label;
    std::array<bool, 3> seen{};
    for (const auto& e : estimates) {
        require(e.orbit.total_photons() == f.n && e.orbit.modes() == f.m, ErrorKind::Assembly,
                "feature_vector: estimates belong to different sectors");
        const int d = e.orbit.doubles();
        require(!seen[static_cast<std::size_t>(d)], ErrorKind::Assembly, "feature_vector: duplicate orbit");
        seen[static_cast<std::size_t>(d)] = true;
        f.values[static_cast<std::size_t>(d)] = e.value;
        f.std_errors[static_cast<std::size_t>(d)] = e.std_error;
    }
    return f;
}

std::string_view to_string(Normalization mode) {
    return mode == Normalization::Euclidean ? "euclidean" : "unit_sum";
}

Normalization parse_normalization(std::string_view name) {
    if (name == "euclidean") return Normalization::Euclidean;
    if (name == "unit_sum") return Normalization::UnitSum;
    fail(ErrorKind::Parameter, "unknown normalization '" + std::string(name) + "'");
}

FeatureVector normalize_feature(const FeatureVector& f, Normalization mode) {
    double norm = 0.0;
    if (mode == Normalization::Euclidean) {
        for (double v : f.values) norm += v * v;
        norm = std::sqrt(norm);
    } else {
        for (double v : f.values) norm += v;
    }
    require(norm > 0.0 && std::isfinite(norm), ErrorKind::Normalization, "normalize_feature: zero feature vector");
    FeatureVector out = f;
    for (std::size_t k = 0; k < 3; ++k) {
        out.values[k] = f.values[k] / norm;
        out.std_errors[k] = f.std_errors[k] / norm;
    }
    return out;
}

double linear_kernel(const FeatureVector& f, const FeatureVector& g) {
    require(f.n == g.n && f.m == g.m, ErrorKind::Parameter, "linear_kernel: features from different sectors");
    return f.values[0] * g.values[0] + f.values[1] * g.values[1] + f.values[2] * g.values[2];
}

std::vector<double> pairwise_kernels(std::span<const FeatureVector> features) {
    std::vector<double> out;
    out.reserve(features.size() * (features.size() - (features.empty() ? 0 : 1)) / 2);
    for (std::size_t i = 0; i < features.size(); ++i)
        for (std::size_t j = i + 1; j < features.size(); ++j) out.push_back(linear_kernel(features[i], features[j]));
    return out;
}

KernelStats kernel_stats(std::span<const FeatureVector> features) {
    require(features.size() >= 2, ErrorKind::Parameter, "kernel_stats: need at least two feature vectors");
    for (const auto& f : features)
        require(f.label == features[0].label && f.n == features[0].n, ErrorKind::Parameter,
                "kernel_stats: features must share model kind and sector");
    const auto k = pairwise_kernels(features);
    KernelStats s;
    s.mean = mean_of(k);
    std::vector<double> sq(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) sq[i] = (k[i] - s.mean) * (k[i] - s.mean);
    s.std = std::sqrt(mean_of(sq));
    s.pair_count = k.size();
    s.n = features[0].n;
    s.kind = features[0].label;
    return s;
}

SeparationReport kernel_separation(const KernelStats& a, const KernelStats& b) {
    require(a.n == b.n, ErrorKind::Parameter, "kernel_separation: statistics from different sectors");
    SeparationReport r;
    const double diff = std::abs(a.mean - b.mean);
    const double spread = std::sqrt(a.std * a.std + b.std * b.std);
    if (spread > 0.0)
        r.separation = diff / spread;
    else
        r.separation = diff > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    const double vb = b.std * b.std;
    const double va = a.std * a.std;
    if (vb > 0.0)
        r.variance_ratio = va / vb;
    else
        r.variance_ratio = va > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
    r.discriminated = r.separation >= kSeparationThreshold;
    return r;
}

}  // namespace gbscert

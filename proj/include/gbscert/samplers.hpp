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
#include <string>
#include <vector>

#include "gbscert/gaussian.hpp"

namespace gbscert {

/// How a sampler truncated its per-source or sector distributions.
struct Truncation {
    /// Per-source photon cutoff; residual tail mass is assigned to this bin.
    std::vector<int> source_cutoffs;
    std::vector<double> source_tail_mass;
    /// Largest total photon number enumerated by the brute-force sampler.
    int sector_cutoff = -1;
    /// Probability mass beyond sector_cutoff that the sampler cannot emit.
    double deficit = 0.0;
};

struct SampleSet {
    ModelKind kind = ModelKind::Smsv;
    std::string parameter_digest;
    std::uint64_t seed = 0;
    std::size_t modes = 0;
    std::vector<PhotonPattern> samples;
    Truncation truncation;

    std::size_t sample_count() const { return samples.size(); }
};

/// Tail mass below which per-source photon-number laws are cut.
inline constexpr double kSourceTailTolerance = 1e-9;

/// Thermal light via its P-function: alpha_i complex Gaussian with
/// E|alpha_i|^2 = <n_i>, evolved through U, then Poisson counts per mode.
SampleSet sample_thermal(const UnitaryMatrix& u, const std::vector<double>& mean_photons,
                         std::size_t count, std::uint64_t seed);

SampleSet sample_coherent(const UnitaryMatrix& u, const std::vector<Complex>& alphas,
                          std::size_t count, std::uint64_t seed);

/// Independent sources; each photon routed to output j with probability |U_ji|^2.
SampleSet sample_distinguishable_smsv(const UnitaryMatrix& u, const SqueezingParams& s,
                                      std::size_t count, std::uint64_t seed);
SampleSet sample_distinguishable_thermal(const UnitaryMatrix& u, const std::vector<double>& mean_photons,
                                         std::size_t count, std::uint64_t seed);

/// Exact GBS sampling from the enumerated law of all patterns with total
/// photons <= max_photons. The emitted law is the truncated one renormalized;
/// the discarded mass is recorded in truncation.deficit.
SampleSet sample_gbs_bruteforce(const UnitaryMatrix& u, const SqueezingParams& s, std::size_t count,
                                std::uint64_t seed, int max_photons);

/// Dispatches on the model kind; Smsv uses the brute-force sampler with
/// `max_photons`.
SampleSet sample_model(const GaussianModel& model, std::size_t count, std::uint64_t seed,
                       int max_photons = 8);

/// Fraction of samples with an odd total photon number.
double odd_total_fraction(const SampleSet& samples);
double mean_total_photons(const SampleSet& samples);

}  // namespace gbscert

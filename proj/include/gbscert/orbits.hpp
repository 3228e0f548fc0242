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
#include <optional>
#include <string_view>
#include <vector>

#include "gbscert/gaussian.hpp"
#include "gbscert/samplers.hpp"

namespace gbscert {

/// Largest number of doubly occupied modes in the orbits handled here.
inline constexpr int kMaxOrbitDoubles = 2;

/// The orbit of [2 x d, 1 x (n - 2d), 0 ...] under mode permutations.
class OrbitId {
public:
    OrbitId(int total_photons, int doubles, std::size_t modes);

    int total_photons() const { return n_; }
    int doubles() const { return d_; }
    int singles() const { return n_ - 2 * d_; }
    std::size_t modes() const { return m_; }

    PhotonPattern canonical_pattern() const;

    bool operator==(const OrbitId&) const = default;

private:
    int n_;
    int d_;
    std::size_t m_;
};

/// The in-scope orbits of the n-photon sector that fit in `modes`, ordered by
/// doubles 0, 1, 2.
std::vector<OrbitId> sector_orbits(int total_photons, std::size_t modes);

/// m! / (d! (n-2d)! (m-d-(n-2d))!); throws SizeLimit if it overflows 64 bits.
std::uint64_t orbit_cardinality(const OrbitId& orbit);
/// Same count as a double, usable where the integer would overflow.
double orbit_cardinality_real(const OrbitId& orbit);

std::optional<OrbitId> orbit_membership(const PhotonPattern& pattern);

class Rng;
PhotonPattern uniform_orbit_draw(const OrbitId& orbit, Rng& rng);

/// Every member of the orbit (distinct permutations of the canonical pattern).
std::vector<PhotonPattern> orbit_members(const OrbitId& orbit);

enum class EstimateMethod { Empirical, MonteCarlo, Exact };
std::string_view to_string(EstimateMethod method);
EstimateMethod parse_estimate_method(std::string_view name);

struct OrbitEstimate {
    OrbitId orbit;
    double value = 0.0;
    double std_error = 0.0;
    EstimateMethod method = EstimateMethod::Exact;
    std::uint64_t draws_or_samples = 0;
    std::uint64_t seed = 0;
};

inline constexpr int kDefaultMaxHafnianSize = 16;

/// Pr(O) ~ |O| / N sum_i Pr(n_i) over N members drawn uniformly with
/// replacement; std_error = |O| sd / sqrt(N).
OrbitEstimate mc_orbit_estimate(const UnitaryMatrix& u, const SqueezingParams& s, const OrbitId& orbit,
                                std::size_t draws, std::uint64_t seed,
                                int max_hafnian_size = kDefaultMaxHafnianSize);
OrbitEstimate mc_orbit_estimate(const SmsvLaw& law, const OrbitId& orbit, std::size_t draws,
                                std::uint64_t seed, int max_hafnian_size = kDefaultMaxHafnianSize);

/// The Monte Carlo estimator evaluated on caller-supplied draws.
OrbitEstimate mc_orbit_estimate_from_draws(const PatternLaw& law, const OrbitId& orbit,
                                           const std::vector<PhotonPattern>& draws);

inline constexpr double kMaxExactOrbitMembers = 1e6;

/// Sum of the closed-form law over every orbit member.
OrbitEstimate exact_orbit_prob(const GaussianModel& model, const OrbitId& orbit);
OrbitEstimate exact_orbit_prob(const PatternLaw& law, const OrbitId& orbit);

/// Fraction of the whole sample set in each orbit, with binomial errors.
std::vector<OrbitEstimate> empirical_orbit_probs(const SampleSet& samples, const std::vector<OrbitId>& orbits);

}  // namespace gbscert

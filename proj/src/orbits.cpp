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

#include "gbscert/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gbscert/error.hpp"
#include "gbscert/rng.hpp"
#include "gbscert/stats.hpp"

namespace gbscert {

OrbitId::OrbitId(int total_photons, int doubles, std::size_t modes)
    : n_(total_photons), d_(doubles), m_(modes) {
    require(n_ >= 0 && d_ >= 0 && d_ <= kMaxOrbitDoubles && n_ - 2 * d_ >= 0, ErrorKind::Parameter,
            "invalid orbit: need 0 <= d <= 2 and n >= 2d");
    require(m_ >= 1 && static_cast<std::size_t>(d_ + singles()) <= m_, ErrorKind::Parameter,
            "invalid orbit: pattern occupies more modes than available");
}

PhotonPattern OrbitId::canonical_pattern() const {
    std::vector<int> counts(m_, 0);
    std::size_t i = 0;
    for (int k = 0; k < d_; ++k) counts[i++] = 2;
    for (int k = 0; k < singles(); ++k) counts[i++] = 1;
    return PhotonPattern(std::move(counts));
}

std::vector<OrbitId> sector_orbits(int total_photons, std::size_t modes) {
    std::vector<OrbitId> out;
    for (int d = 0; d <= kMaxOrbitDoubles && 2 * d <= total_photons; ++d)
        if (static_cast<std::size_t>(total_photons - d) <= modes) out.emplace_back(total_photons, d, modes);
    return out;
}

namespace {

std::uint64_t checked_binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 c = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i;
        require(c <= std::numeric_limits<std::uint64_t>::max(), ErrorKind::SizeLimit,
                "orbit_cardinality: count exceeds 64 bits");
    }
    return static_cast<std::uint64_t>(c);
}

double real_binomial(double n, double k) {
    double c = 1.0;
    for (double i = 1.0; i <= k; i += 1.0) c = c * (n - k + i) / i;
    return std::round(c);
}

}  // namespace

std::uint64_t orbit_cardinality(const OrbitId& orbit) {
    const std::uint64_t m = orbit.modes();
    const std::uint64_t d = static_cast<std::uint64_t>(orbit.doubles());
    const std::uint64_t s = static_cast<std::uint64_t>(orbit.singles());
    const unsigned __int128 c = static_cast<unsigned __int128>(checked_binomial(m, d)) * checked_binomial(m - d, s);
    require(c <= std::numeric_limits<std::uint64_t>::max(), ErrorKind::SizeLimit,
            "orbit_cardinality: count exceeds 64 bits");
    return static_cast<std::uint64_t>(c);
}

double orbit_cardinality_real(const OrbitId& orbit) {
    const auto m = static_cast<double>(orbit.modes());
    const auto d = static_cast<double>(orbit.doubles());
    return real_binomial(m, d) * real_binomial(m - d, orbit.singles());
}

std::optional<OrbitId> orbit_membership(const PhotonPattern& pattern) {
    int n = 0;
    int doubles = 0;
    for (int c : pattern.counts) {
        if (c < 0 || c > 2) return std::nullopt;
        if (c == 2) ++doubles;
        n += c;
    }
    if (doubles > kMaxOrbitDoubles || pattern.modes() == 0) return std::nullopt;
    return OrbitId(n, doubles, pattern.modes());
}

PhotonPattern uniform_orbit_draw(const OrbitId& orbit, Rng& rng) {
    PhotonPattern p = orbit.canonical_pattern();
    rng.shuffle(std::span<int>(p.counts));
    return p;
}

std::vector<PhotonPattern> orbit_members(const OrbitId& orbit) {
    require(orbit_cardinality_real(orbit) <= kMaxExactOrbitMembers, ErrorKind::SizeLimit,
            "orbit_members: orbit has more than 1e6 members");
    std::vector<int> counts = orbit.canonical_pattern().counts;
    std::sort(counts.begin(), counts.end());
    std::vector<PhotonPattern> out;
    do {
        out.emplace_back(counts);
    } while (std::next_permutation(counts.begin(), counts.end()));
    return out;
}

std::string_view to_string(EstimateMethod method) {
    switch (method) {
        case EstimateMethod::Empirical: return "empirical";
        case EstimateMethod::MonteCarlo: return "monte_carlo";
        case EstimateMethod::Exact: return "exact";
    }
    return "unknown";
}

EstimateMethod parse_estimate_method(std::string_view name) {
    for (EstimateMethod m : {EstimateMethod::Empirical, EstimateMethod::MonteCarlo, EstimateMethod::Exact})
        if (to_string(m) == name) return m;
    fail(ErrorKind::Parameter, "unknown estimate method '" + std::string(name) + "'");
}

namespace {

constexpr std::uint64_t kOrbitDrawTag = 0x6f7262;

OrbitEstimate summarize_draws(const OrbitId& orbit, const std::vector<double>& probs) {
    const double card = orbit_cardinality_real(orbit);
    const double mean = mean_of(probs);
    double sd = 0.0;
    if (probs.size() > 1) {
        std::vector<double> sq(probs.size());
        for (std::size_t i = 0; i < probs.size(); ++i) sq[i] = (probs[i] - mean) * (probs[i] - mean);
        sd = std::sqrt(pairwise_sum(sq) / static_cast<double>(probs.size() - 1));
    }
    OrbitEstimate e{orbit};
    e.value = std::min(1.0, card * mean);
    e.std_error = card * sd / std::sqrt(static_cast<double>(probs.size()));
    e.method = EstimateMethod::MonteCarlo;
    e.draws_or_samples = probs.size();
    return e;
}

}  // namespace

OrbitEstimate mc_orbit_estimate(const SmsvLaw& law, const OrbitId& orbit, std::size_t draws,
                                std::uint64_t seed, int max_hafnian_size) {
    require(draws >= 1, ErrorKind::Parameter, "mc_orbit_estimate: need at least one draw");
    require(orbit.modes() == law.modes(), ErrorKind::InvalidDimension,
            "mc_orbit_estimate: orbit and circuit mode counts differ");
    require(orbit.total_photons() <= max_hafnian_size, ErrorKind::SizeLimit,
            "mc_orbit_estimate: hafnian size above the configured limit");
    std::vector<double> probs(draws);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(draws); ++i) {
        Rng rng = Rng::stream(seed, kOrbitDrawTag, static_cast<std::uint64_t>(i));
        probs[static_cast<std::size_t>(i)] = law.probability(uniform_orbit_draw(orbit, rng));
    }
    OrbitEstimate e = summarize_draws(orbit, probs);
    e.seed = seed;
    return e;
}

OrbitEstimate mc_orbit_estimate(const UnitaryMatrix& u, const SqueezingParams& s, const OrbitId& orbit,
                                std::size_t draws, std::uint64_t seed, int max_hafnian_size) {
    return mc_orbit_estimate(SmsvLaw(u, s), orbit, draws, seed, max_hafnian_size);
}

OrbitEstimate mc_orbit_estimate_from_draws(const PatternLaw& law, const OrbitId& orbit,
                                           const std::vector<PhotonPattern>& draws) {
    require(!draws.empty(), ErrorKind::Parameter, "mc_orbit_estimate_from_draws: no draws");
    std::vector<double> probs;
    probs.reserve(draws.size());
    for (const auto& p : draws) {
        require(orbit_membership(p) == orbit, ErrorKind::Parameter,
                "mc_orbit_estimate_from_draws: draw outside the orbit");
        probs.push_back(law.probability(p));
    }
    return summarize_draws(orbit, probs);
}

OrbitEstimate exact_orbit_prob(const PatternLaw& law, const OrbitId& orbit) {
    require(orbit.modes() == law.modes(), ErrorKind::InvalidDimension,
            "exact_orbit_prob: orbit and model mode counts differ");
    const auto members = orbit_members(orbit);
    std::vector<double> probs(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) probs[i] = law.probability(members[i]);
    OrbitEstimate e{orbit};
    e.value = std::min(1.0, pairwise_sum(probs));
    e.std_error = 0.0;
    e.method = EstimateMethod::Exact;
    e.draws_or_samples = members.size();
    return e;
}

OrbitEstimate exact_orbit_prob(const GaussianModel& model, const OrbitId& orbit) {
    return exact_orbit_prob(*make_law(model), orbit);
}

std::vector<OrbitEstimate> empirical_orbit_probs(const SampleSet& samples, const std::vector<OrbitId>& orbits) {
    require(samples.sample_count() >= 1, ErrorKind::Parameter, "empirical_orbit_probs: empty sample set");
    std::vector<std::uint64_t> hits(orbits.size(), 0);
    for (const auto& p : samples.samples) {
        const auto id = orbit_membership(p);
        if (!id) continue;
        for (std::size_t k = 0; k < orbits.size(); ++k)
            if (orbits[k] == *id) ++hits[k];
    }
    const auto n = static_cast<double>(samples.sample_count());
    std::vector<OrbitEstimate> out;
    for (std::size_t k = 0; k < orbits.size(); ++k) {
        require(orbits[k].modes() == samples.modes, ErrorKind::InvalidDimension,
                "empirical_orbit_probs: orbit and sample mode counts differ");
        OrbitEstimate e{orbits[k]};
        e.value = static_cast<double>(hits[k]) / n;
        e.std_error = std::sqrt(e.value * (1.0 - e.value) / n);
        e.method = EstimateMethod::Empirical;
        e.draws_or_samples = samples.sample_count();
        e.seed = samples.seed;
        out.push_back(e);
    }
    return out;
}

}  // namespace gbscert

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "gbscert/orbits.hpp"
#include "gbscert/rng.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace gbscert;

namespace {

// Orbit probability by summing the law over every rearrangement of the canonical pattern.
double orbit_sum(const PatternLaw& law, const OrbitId& o) {
    std::vector<int> c = o.canonical_pattern().counts;
    std::sort(c.begin(), c.end());
    double total = 0.0;
    do total += law.probability(PhotonPattern(c));
    while (std::next_permutation(c.begin(), c.end()));
    return total;
}

}  // namespace

TEST_CASE("orbit_cardinality: small cases") {
    CHECK(orbit_cardinality(OrbitId(2, 0, 2)) == 1);
    CHECK(orbit_cardinality(OrbitId(2, 0, 4)) == 6);
    CHECK(orbit_cardinality(OrbitId(4, 1, 4)) == 12);
    CHECK(oracle::count_arrangements({2, 1, 1, 0}) == 12);
}

TEST_CASE("orbit_cardinality: equals arrangement counts for m <= 8, n <= 6") {
    for (std::size_t m = 1; m <= 8; ++m)
        for (int n = 0; n <= 6; ++n)
            for (int d = 0; d <= 2 && 2 * d <= n; ++d) {
                if (static_cast<std::size_t>(n - d) > m) continue;
                const OrbitId o(n, d, m);
                CHECK(orbit_cardinality(o) == oracle::count_arrangements(o.canonical_pattern().counts));
                CHECK(orbit_cardinality_real(o) == static_cast<double>(orbit_cardinality(o)));
                CHECK(orbit_members(o).size() == orbit_cardinality(o));
            }
}

TEST_CASE("OrbitId: invalid orbits") {
    CHECK_ERROR_KIND(OrbitId(4, 1, 2), ErrorKind::Parameter);
    CHECK_ERROR_KIND(OrbitId(2, 2, 6), ErrorKind::Parameter);
    CHECK_ERROR_KIND(OrbitId(6, 3, 6), ErrorKind::Parameter);
    CHECK(OrbitId(5, 2, 4).canonical_pattern() == PhotonPattern{2, 2, 1, 0});
}

TEST_CASE("orbit_membership: reads the multiset") {
    CHECK(orbit_membership(PhotonPattern{1, 0, 1, 0}) == OrbitId(2, 0, 4));
    CHECK(orbit_membership(PhotonPattern{2, 2, 1, 0}) == OrbitId(5, 2, 4));
    CHECK(!orbit_membership(PhotonPattern{3, 1, 0, 0}).has_value());
    CHECK(!orbit_membership(PhotonPattern{2, 2, 2, 0}).has_value());
    CHECK(orbit_membership(PhotonPattern{0, 0, 0}) == OrbitId(0, 0, 3));
}

TEST_CASE("uniform_orbit_draw: full orbit without zeros") {
    Rng rng(1);
    for (int i = 0; i < 20; ++i) CHECK(uniform_orbit_draw(OrbitId(4, 0, 4), rng) == PhotonPattern{1, 1, 1, 1});
}

TEST_CASE("uniform_orbit_draw: uniform over members and closed") {
    Rng rng(2);
    const OrbitId o(2, 0, 3);
    std::map<std::vector<int>, std::uint64_t> counts;
    const int draws = 30000;
    for (int i = 0; i < draws; ++i) {
        const PhotonPattern p = uniform_orbit_draw(o, rng);
        REQUIRE(orbit_membership(p) == o);
        ++counts[p.counts];
    }
    std::map<std::vector<int>, double> expected;
    for (const auto& p : orbit_members(o)) expected[p.counts] = 1.0 / 3.0;
    CHECK(counts.size() == 3);
    for (const auto& [p, c] : counts) CHECK(oracle::within_binomial(c / double(draws), 1.0 / 3.0, draws));
    CHECK(oracle::chi2_gof(counts, expected, draws).p_value > 0.001);

    const OrbitId big(6, 2, 8);
    std::map<std::vector<int>, std::uint64_t> big_counts;
    for (int i = 0; i < 56000; ++i) {
        const PhotonPattern p = uniform_orbit_draw(big, rng);
        REQUIRE(orbit_membership(p) == big);
        ++big_counts[p.counts];
    }
    std::map<std::vector<int>, double> uniform;
    for (const auto& p : orbit_members(big)) uniform[p.counts] = 1.0 / static_cast<double>(orbit_cardinality(big));
    CHECK(oracle::chi2_gof(big_counts, uniform, 56000).p_value > 0.001);
}

TEST_CASE("mc_orbit_estimate: zero squeezing gives exactly zero") {
    const UnitaryMatrix u = haar_unitary(4, 3);
    for (int d = 0; d <= 1; ++d) {
        const OrbitEstimate e = mc_orbit_estimate(u, SqueezingParams::uniform(4, 0.0), OrbitId(2, d, 4), 200, 5);
        CHECK(e.value == 0.0);
        CHECK(e.std_error == 0.0);
        CHECK(e.method == EstimateMethod::MonteCarlo);
    }
}

TEST_CASE("mc_orbit_estimate: agrees with the exact orbit sum") {
    const UnitaryMatrix u = haar_unitary(4, 4);
    const SqueezingParams s({0.2, 0.3, 0.15, 0.25});
    const SmsvLaw law(u, s);
    for (const auto& o : {OrbitId(2, 0, 4), OrbitId(4, 1, 4), OrbitId(4, 0, 4)}) {
        const OrbitEstimate mc = mc_orbit_estimate(u, s, o, 2000, 6);
        const OrbitEstimate exact = exact_orbit_prob(GaussianModel::smsv(u, s), o);
        CHECK(exact.value == doctest::Approx(orbit_sum(law, o)).epsilon(1e-12));
        CHECK(std::abs(mc.value - exact.value) < 3 * mc.std_error + 1e-15);
        CHECK(mc.draws_or_samples == 2000);
        CHECK(mc.seed == 6);
    }
}

TEST_CASE("mc_orbit_estimate: deterministic and unbiased over repeats") {
    const UnitaryMatrix u = haar_unitary(4, 7);
    const SqueezingParams s({0.4, 0.2, 0.3, 0.35});
    const OrbitId o(2, 0, 4);
    CHECK(mc_orbit_estimate(u, s, o, 300, 1).value == mc_orbit_estimate(u, s, o, 300, 1).value);
    const double exact = exact_orbit_prob(GaussianModel::smsv(u, s), o).value;
    double mean = 0.0, var = 0.0;
    const int repeats = 50;
    for (int r = 0; r < repeats; ++r) {
        const OrbitEstimate e = mc_orbit_estimate(u, s, o, 40, 1000 + r);
        mean += e.value / repeats;
        var += e.std_error * e.std_error / (repeats * repeats);
    }
    CHECK(std::abs(mean - exact) < 3 * std::sqrt(var));
}

TEST_CASE("mc_orbit_estimate_from_draws: every member once reproduces the exact value") {
    const UnitaryMatrix u = haar_unitary(4, 8);
    const SqueezingParams s({0.5, 0.2, 0.4, 0.3});
    const SmsvLaw law(u, s);
    for (int n : {2, 4})
        for (const auto& o : sector_orbits(n, 4)) {
            const OrbitEstimate e = mc_orbit_estimate_from_draws(law, o, orbit_members(o));
            const double exact = exact_orbit_prob(law, o).value;
            CHECK(std::abs(e.value - exact) <= 1e-9 * exact);
        }
}

TEST_CASE("mc_orbit_estimate: hafnian size limit") {
    const UnitaryMatrix u = haar_unitary(20, 9);
    CHECK_ERROR_KIND(mc_orbit_estimate(u, SqueezingParams::uniform(20, 0.1), OrbitId(18, 0, 20), 10, 1),
                     ErrorKind::SizeLimit);
}

TEST_CASE("exact_orbit_prob: thermal vacuum and single-mode coherent") {
    const UnitaryMatrix u = haar_unitary(3, 10);
    const GaussianModel dark = GaussianModel::thermal(u, {0, 0, 0});
    for (int n = 1; n <= 4; ++n)
        for (const auto& o : sector_orbits(n, 3)) CHECK(exact_orbit_prob(dark, o).value == 0.0);
    const GaussianModel coh = GaussianModel::coherent(UnitaryMatrix::identity(1), {Complex(0.6, 0.8)});
    const OrbitEstimate e = exact_orbit_prob(coh, OrbitId(2, 1, 1));
    CHECK(e.value == doctest::Approx(oracle::poisson(1.0, 2)).epsilon(1e-13));
    CHECK(e.std_error == 0.0);
    CHECK(e.method == EstimateMethod::Exact);
}

TEST_CASE("exact orbits partition part of each photon sector") {
    for (std::size_t m : {2u, 3u, 4u}) {
        const UnitaryMatrix u = haar_unitary(m, 11 + m);
        const std::vector<double> means(m, 0.6);
        for (const GaussianModel& model : {GaussianModel::thermal(u, means),
                                           GaussianModel::smsv(u, SqueezingParams::uniform(m, 0.5))}) {
            for (int n = 1; n <= 4; ++n) {
                double sector = 0.0;
                for (const auto& [p, prob] : exact_distribution(model, n)) sector += prob;
                double orbits = 0.0;
                for (const auto& o : sector_orbits(n, m)) orbits += exact_orbit_prob(model, o).value;
                CHECK(orbits <= sector + 1e-14);
            }
        }
    }
}

TEST_CASE("empirical_orbit_probs: counting over the whole sample set") {
    SampleSet vac;
    vac.modes = 3;
    vac.samples.assign(50, PhotonPattern::vacuum(3));
    for (const auto& e : empirical_orbit_probs(vac, sector_orbits(2, 3))) CHECK(e.value == 0.0);

    SampleSet hand;
    hand.modes = 3;
    hand.samples = {{1, 1, 0}, {0, 1, 1}, {1, 0, 1}, {2, 0, 0}, {0, 0, 0}, {0, 0, 0},
                    {1, 0, 0}, {3, 0, 0}, {1, 1, 1}, {0, 0, 2}};
    const auto e = empirical_orbit_probs(hand, {OrbitId(2, 0, 3), OrbitId(2, 1, 3)});
    CHECK(e[0].value == doctest::Approx(0.3));
    CHECK(e[0].std_error == doctest::Approx(std::sqrt(0.3 * 0.7 / 10)));
    CHECK(e[1].value == doctest::Approx(0.2));
    CHECK(e[0].method == EstimateMethod::Empirical);
    CHECK(e[0].draws_or_samples == 10);
}

TEST_CASE("empirical_orbit_probs: thermal samples against exact orbit sums") {
    const UnitaryMatrix u = haar_unitary(2, 20);
    const std::vector<double> means{0.8, 0.5};
    const SampleSet set = sample_thermal(u, means, 100000, 20);
    const GaussianModel model = GaussianModel::thermal(u, means);
    for (int n = 1; n <= 4; ++n) {
        std::vector<OrbitId> orbits = sector_orbits(n, 2);
        const auto emp = empirical_orbit_probs(set, orbits);
        for (std::size_t k = 0; k < orbits.size(); ++k)
            CHECK(oracle::within_binomial(emp[k].value, exact_orbit_prob(model, orbits[k]).value, 1e5));
    }
}

TEST_CASE("sector_orbits lists the in-scope orbits in order of doubles") {
    const auto o = sector_orbits(6, 36);
    REQUIRE(o.size() == 3);
    for (int d = 0; d < 3; ++d) CHECK(o[static_cast<std::size_t>(d)] == OrbitId(6, d, 36));
    CHECK(sector_orbits(2, 3).size() == 2);
    for (EstimateMethod m : {EstimateMethod::Empirical, EstimateMethod::MonteCarlo, EstimateMethod::Exact})
        CHECK(parse_estimate_method(to_string(m)) == m);
}

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

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gbscert/io.hpp"
#include "gbscert/samplers.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace gbscert;

namespace {

UnitaryMatrix beamsplitter() { return UnitaryMatrix::from_matrix(oracle::beamsplitter()); }

std::map<std::vector<int>, std::uint64_t> histogram(const SampleSet& set) {
    std::map<std::vector<int>, std::uint64_t> h;
    for (const auto& p : set.samples) ++h[p.counts];
    return h;
}

template <typename Law>
std::map<std::vector<int>, double> law_table(std::size_t m, int max_total, Law&& law) {
    std::map<std::vector<int>, double> t;
    for (int n = 0; n <= max_total; ++n)
        for (const auto& p : enumerate_patterns(m, n)) t[p.counts] = law(p);
    return t;
}

struct Moments {
    double mean = 0.0;
    double se = 0.0;
};

Moments total_moments(const SampleSet& set) {
    const double n = static_cast<double>(set.sample_count());
    double mean = 0.0, var = 0.0;
    for (const auto& p : set.samples) mean += p.total() / n;
    for (const auto& p : set.samples) var += (p.total() - mean) * (p.total() - mean) / (n - 1);
    return {mean, std::sqrt(var / n)};
}

bool all_vacuum(const SampleSet& set) {
    return std::all_of(set.samples.begin(), set.samples.end(), [](const PhotonPattern& p) { return p.total() == 0; });
}

constexpr double kSignificance = 0.001;

}  // namespace

TEST_CASE("samplers: zero intensity gives vacuum") {
    const UnitaryMatrix u = haar_unitary(3, 1);
    CHECK(all_vacuum(sample_thermal(u, {0, 0, 0}, 500, 1)));
    CHECK(all_vacuum(sample_coherent(u, {0.0, 0.0, 0.0}, 500, 1)));
    CHECK(all_vacuum(sample_distinguishable_smsv(u, SqueezingParams::uniform(3, 0.0), 500, 1)));
    CHECK(all_vacuum(sample_distinguishable_thermal(u, {0, 0, 0}, 500, 1)));
    CHECK(all_vacuum(sample_gbs_bruteforce(u, SqueezingParams::uniform(3, 0.0), 500, 1, 4)));
}

TEST_CASE("sample_thermal: single mode vacuum frequency") {
    const SampleSet set = sample_thermal(UnitaryMatrix::identity(1), {1.0}, 100000, 2);
    const double zeros = static_cast<double>(std::count(set.samples.begin(), set.samples.end(), PhotonPattern{0}));
    CHECK(oracle::within_binomial(zeros / 1e5, 0.5, 1e5));
}

TEST_CASE("sample_thermal: beamsplitter fit against the permanent law") {
    const UnitaryMatrix u = beamsplitter();
    const std::vector<double> means{1.0, 0.0};
    const SampleSet set = sample_thermal(u, means, 100000, 3);
    const auto expected = law_table(2, 4, [&](const PhotonPattern& p) { return thermal_probability(u, means, p); });
    const auto chi2 = oracle::chi2_gof(histogram(set), expected, set.sample_count());
    CHECK(chi2.p_value > kSignificance);
}

TEST_CASE("sample_coherent: Poisson means") {
    const SampleSet one = sample_coherent(UnitaryMatrix::identity(1), {1.0}, 100000, 4);
    const Moments m1 = total_moments(one);
    CHECK(std::abs(m1.mean - 1.0) < 3 * m1.se);
    const std::vector<Complex> alpha{Complex(0.5, 0.2), Complex(-0.3, 0.9), Complex(0.0, -0.4)};
    const SampleSet three = sample_coherent(haar_unitary(3, 5), alpha, 100000, 5);
    const Moments m3 = total_moments(three);
    double norm2 = 0.0;
    for (auto a : alpha) norm2 += std::norm(a);
    CHECK(std::abs(m3.mean - norm2) < 3 * m3.se);
}

TEST_CASE("sample_coherent: fit against the Poisson product law") {
    const UnitaryMatrix u = haar_unitary(2, 6);
    const std::vector<Complex> alpha{Complex(0.8, 0.1), Complex(0.2, -0.6)};
    const auto beta = coherent_evolve(u, alpha);
    const SampleSet set = sample_coherent(u, alpha, 100000, 6);
    const auto expected = law_table(2, 8, [&](const PhotonPattern& p) { return coherent_probability(beta, p); });
    CHECK(oracle::chi2_gof(histogram(set), expected, set.sample_count()).p_value > kSignificance);
}

TEST_CASE("sample_distinguishable_smsv: even totals and the uncoupled case") {
    const SampleSet set = sample_distinguishable_smsv(haar_unitary(4, 7), SqueezingParams({0.6, 0.4, 0.8, 0.2}), 10000, 7);
    CHECK(std::all_of(set.samples.begin(), set.samples.end(), [](const PhotonPattern& p) { return p.total() % 2 == 0; }));

    const double r = 0.7;
    const SampleSet uncoupled = sample_distinguishable_smsv(UnitaryMatrix::identity(2), SqueezingParams({r, 0.0}), 100000, 8);
    std::map<int, double> freq;
    for (const auto& p : uncoupled.samples) {
        REQUIRE(p.counts[1] == 0);
        REQUIRE(p.counts[0] % 2 == 0);
        freq[p.counts[0]] += 1e-5;
    }
    for (int k = 0; k <= 6; k += 2) CHECK(oracle::within_binomial(freq[k], oracle::smsv_single_mode(r, k), 1e5));
}

TEST_CASE("sample_distinguishable_smsv: fit against the exact distinguishable law") {
    const UnitaryMatrix u = beamsplitter();
    const SqueezingParams s({0.5, 0.3});
    const SampleSet set = sample_distinguishable_smsv(u, s, 100000, 9);
    const auto expected = law_table(2, 8, [&](const PhotonPattern& p) {
        return distinguishable_probability(u, {smsv_photon_number_dist(0.5, 8).probabilities,
                                               smsv_photon_number_dist(0.3, 8).probabilities}, p);
    });
    CHECK(oracle::chi2_gof(histogram(set), expected, set.sample_count()).p_value > kSignificance);
}

TEST_CASE("sample_distinguishable_thermal: single mode matches the geometric law") {
    const double mu = 0.8;
    const auto expected = law_table(1, 40, [&](const PhotonPattern& p) { return oracle::geometric(mu, p.counts[0]); });
    const SampleSet dist = sample_distinguishable_thermal(UnitaryMatrix::identity(1), {mu}, 100000, 10);
    const SampleSet thermal = sample_thermal(UnitaryMatrix::identity(1), {mu}, 100000, 10);
    CHECK(oracle::chi2_gof(histogram(dist), expected, 100000).p_value > kSignificance);
    CHECK(oracle::chi2_gof(histogram(thermal), expected, 100000).p_value > kSignificance);
}

TEST_CASE("sample_distinguishable_thermal: total mean and exact law") {
    const UnitaryMatrix u = haar_unitary(2, 11);
    const std::vector<double> means{0.6, 1.1};
    const SampleSet set = sample_distinguishable_thermal(u, means, 100000, 11);
    const Moments m = total_moments(set);
    CHECK(std::abs(m.mean - 1.7) < 3 * m.se);
    const GaussianModel model = GaussianModel::distinguishable_thermal(u, means);
    const auto law = make_law(model);
    const auto expected = law_table(2, 8, [&](const PhotonPattern& p) { return law->probability(p); });
    CHECK(oracle::chi2_gof(histogram(set), expected, set.sample_count()).p_value > kSignificance);
}

TEST_CASE("sample_gbs_bruteforce: beamsplitter pattern frequencies") {
    const UnitaryMatrix u = beamsplitter();
    const SqueezingParams s({0.3, 0.3});
    const SampleSet set = sample_gbs_bruteforce(u, s, 100000, 12, 8);
    double kept = 0.0;
    for (int n = 0; n <= 8; n += 2)
        for (const auto& p : enumerate_patterns(2, n)) kept += gbs_probability(u, s, p);
    CHECK(std::abs(set.truncation.deficit - (1.0 - kept)) < 1e-14);
    CHECK(set.truncation.sector_cutoff == 8);
    const auto h = histogram(set);
    for (int n = 0; n <= 4; n += 2)
        for (const auto& p : enumerate_patterns(2, n)) {
            const auto it = h.find(p.counts);
            const double f = it == h.end() ? 0.0 : static_cast<double>(it->second) / 1e5;
            CHECK(oracle::within_binomial(f, gbs_probability(u, s, p) / kept, 1e5));
        }
    CHECK(odd_total_fraction(set) == 0.0);
}

TEST_CASE("sample_gbs_bruteforce: enumeration limit") {
    CHECK_ERROR_KIND(sample_gbs_bruteforce(haar_unitary(30, 1), SqueezingParams::uniform(30, 0.1), 10, 1, 8),
                     ErrorKind::SizeLimit);
}

TEST_CASE("samplers: parity split at 10^4 samples") {
    const UnitaryMatrix u = haar_unitary(4, 13);
    const SqueezingParams s({0.5, 0.4, 0.6, 0.3});
    const auto means = matched_thermal_means(s);
    const auto alpha = matched_coherent_amplitudes(s, {0.0, 1.0, 2.0, 3.0});
    CHECK(odd_total_fraction(sample_gbs_bruteforce(u, s, 10000, 13, 8)) == 0.0);
    CHECK(odd_total_fraction(sample_distinguishable_smsv(u, s, 10000, 13)) == 0.0);
    CHECK(odd_total_fraction(sample_thermal(u, means, 10000, 13)) > 0.0);
    CHECK(odd_total_fraction(sample_coherent(u, alpha, 10000, 13)) > 0.0);
    CHECK(odd_total_fraction(sample_distinguishable_thermal(u, means, 10000, 13)) > 0.0);
}

TEST_CASE("samplers: matched models emit the same mean photon number") {
    const UnitaryMatrix u = haar_unitary(3, 14);
    const SqueezingParams s({0.3, 0.25, 0.35});
    const double flux = s.mean_photons();
    const std::vector<GaussianModel> models{
        GaussianModel::smsv(u, s), GaussianModel::thermal(u, matched_thermal_means(s)),
        GaussianModel::coherent(u, matched_coherent_amplitudes(s, {0.5, 1.5, 2.5})),
        GaussianModel::distinguishable_smsv(u, s), GaussianModel::distinguishable_thermal(u, matched_thermal_means(s))};
    for (const auto& model : models) {
        const SampleSet set = sample_model(model, 100000, 14, 12);
        const Moments m = total_moments(set);
        // The brute-force sampler drops mass above 12 photons; it is far below the tolerance here.
        CHECK(set.truncation.deficit < 1e-6);
        CHECK(std::abs(m.mean - flux) < 3 * m.se);
    }
}

TEST_CASE("samplers: byte-identical output for identical inputs") {
    const UnitaryMatrix u = haar_unitary(3, 15);
    const SqueezingParams s({0.3, 0.5, 0.4});
    for (ModelKind kind : kAllModelKinds) {
        GaussianModel model = kind == ModelKind::Smsv ? GaussianModel::smsv(u, s)
                              : kind == ModelKind::Thermal ? GaussianModel::thermal(u, matched_thermal_means(s))
                              : kind == ModelKind::Coherent
                                  ? GaussianModel::coherent(u, matched_coherent_amplitudes(s, {1, 2, 3}))
                              : kind == ModelKind::DistinguishableSmsv
                                  ? GaussianModel::distinguishable_smsv(u, s)
                                  : GaussianModel::distinguishable_thermal(u, matched_thermal_means(s));
        const std::string a = format_sample_set(sample_model(model, 2000, 99));
        const std::string b = format_sample_set(sample_model(model, 2000, 99));
        CHECK(a == b);
        CHECK(a != format_sample_set(sample_model(model, 2000, 100)));
    }
}

#ifdef _OPENMP
TEST_CASE("samplers: thread count does not change the samples") {
    const UnitaryMatrix u = haar_unitary(3, 16);
    const std::vector<double> means{0.4, 0.9, 0.2};
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const SampleSet serial = sample_thermal(u, means, 3000, 16);
    const SampleSet serial_d = sample_distinguishable_thermal(u, means, 3000, 16);
    omp_set_num_threads(4);
    const SampleSet parallel = sample_thermal(u, means, 3000, 16);
    const SampleSet parallel_d = sample_distinguishable_thermal(u, means, 3000, 16);
    omp_set_num_threads(saved);
    CHECK(serial.samples == parallel.samples);
    CHECK(serial_d.samples == parallel_d.samples);
}
#endif

TEST_CASE("samplers: per-source truncation is recorded") {
    const SampleSet set = sample_distinguishable_smsv(haar_unitary(2, 17), SqueezingParams({0.9, 0.1}), 100, 17);
    REQUIRE(set.truncation.source_cutoffs.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) CHECK(set.truncation.source_tail_mass[i] < kSourceTailTolerance);
    CHECK(set.truncation.source_cutoffs[0] > set.truncation.source_cutoffs[1]);
    CHECK(set.sample_count() == 100);
    CHECK(set.modes == 2);
    CHECK_ERROR_KIND(sample_thermal(haar_unitary(2, 1), {0.1, 0.1}, 0, 1), ErrorKind::Parameter);
}

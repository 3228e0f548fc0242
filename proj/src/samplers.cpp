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

#include "gbscert/samplers.hpp"

#include <cmath>

#include "gbscert/error.hpp"
#include "gbscert/io.hpp"
#include "gbscert/rng.hpp"

namespace gbscert {

namespace {

// Stream tags keep sampler streams disjoint from other consumers of a seed.
constexpr std::uint64_t kThermalTag = 0x7448;
constexpr std::uint64_t kCoherentTag = 0x6348;
constexpr std::uint64_t kDistSmsvTag = 0x6453;
constexpr std::uint64_t kDistThermalTag = 0x6454;
constexpr std::uint64_t kGbsTag = 0x6762;

void check_count(std::size_t count) {
    require(count >= 1, ErrorKind::Parameter, "sampler: sample count must be at least 1");
}

SampleSet make_set(const GaussianModel& model, std::size_t count, std::uint64_t seed) {
    SampleSet set;
    set.kind = model.kind();
    set.parameter_digest = model_digest(model);
    set.seed = seed;
    set.modes = model.modes();
    set.samples.resize(count);
    return set;
}

void poisson_counts(Rng& rng, const ComplexVector& beta, std::vector<int>& counts) {
    for (Eigen::Index j = 0; j < beta.size(); ++j)
        counts[static_cast<std::size_t>(j)] = static_cast<int>(rng.poisson(std::norm(beta(j))));
}

// Cumulative |U_ji|^2 over outputs j for every source column i.
std::vector<std::vector<double>> routing_tables(const UnitaryMatrix& u) {
    const auto m = static_cast<Eigen::Index>(u.modes());
    std::vector<std::vector<double>> tables(u.modes());
    for (Eigen::Index i = 0; i < m; ++i) {
        auto& t = tables[static_cast<std::size_t>(i)];
        t.resize(u.modes());
        double acc = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            acc += std::norm(u(j, i));
            t[static_cast<std::size_t>(j)] = acc;
        }
    }
    return tables;
}

// Per-source cumulative photon-number tables, residual tail in the last bin.
std::vector<std::vector<double>> source_tables(const std::vector<TruncatedDistribution>& laws,
                                               Truncation& truncation) {
    std::vector<std::vector<double>> tables;
    for (const auto& law : laws) {
        truncation.source_cutoffs.push_back(law.cutoff());
        truncation.source_tail_mass.push_back(law.tail_mass);
        std::vector<double> cdf(law.probabilities.size());
        double acc = 0.0;
        for (std::size_t k = 0; k < cdf.size(); ++k) {
            acc += law.probabilities[k];
            cdf[k] = acc;
        }
        cdf.back() += law.tail_mass;
        tables.push_back(std::move(cdf));
    }
    return tables;
}

void sample_distinguishable(SampleSet& set, const UnitaryMatrix& u,
                            const std::vector<TruncatedDistribution>& laws, std::uint64_t tag) {
    const auto routes = routing_tables(u);
    const auto sources = source_tables(laws, set.truncation);
    const auto count = static_cast<std::int64_t>(set.samples.size());
    const std::size_t m = u.modes();
#pragma omp parallel for schedule(static)
    for (std::int64_t idx = 0; idx < count; ++idx) {
        Rng rng = Rng::stream(set.seed, tag, static_cast<std::uint64_t>(idx));
        std::vector<int> counts(m, 0);
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t photons = rng.categorical_cdf(sources[i]);
            for (std::size_t p = 0; p < photons; ++p) ++counts[rng.categorical_cdf(routes[i])];
        }
        set.samples[static_cast<std::size_t>(idx)] = PhotonPattern(std::move(counts));
    }
}

}  // namespace

SampleSet sample_thermal(const UnitaryMatrix& u, const std::vector<double>& mean_photons,
                         std::size_t count, std::uint64_t seed) {
    check_count(count);
    const GaussianModel model = GaussianModel::thermal(u, mean_photons);
    SampleSet set = make_set(model, count, seed);
    const auto m = static_cast<Eigen::Index>(u.modes());
    std::vector<double> sigma(mean_photons.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] = std::sqrt(0.5 * mean_photons[i]);
#pragma omp parallel for schedule(static)
    for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(count); ++idx) {
        Rng rng = Rng::stream(seed, kThermalTag, static_cast<std::uint64_t>(idx));
        ComplexVector alpha(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const double re = rng.normal();
            const double im = rng.normal();
            alpha(i) = sigma[static_cast<std::size_t>(i)] * Complex(re, im);
        }
        const ComplexVector beta = u.matrix() * alpha;
        std::vector<int> counts(u.modes());
        poisson_counts(rng, beta, counts);
        set.samples[static_cast<std::size_t>(idx)] = PhotonPattern(std::move(counts));
    }
    return set;
}

SampleSet sample_coherent(const UnitaryMatrix& u, const std::vector<Complex>& alphas,
                          std::size_t count, std::uint64_t seed) {
    check_count(count);
    const GaussianModel model = GaussianModel::coherent(u, alphas);
    SampleSet set = make_set(model, count, seed);
    const auto betas = coherent_evolve(u, alphas);
    const ComplexVector beta = Eigen::Map<const ComplexVector>(betas.data(), static_cast<Eigen::Index>(betas.size()));
#pragma omp parallel for schedule(static)
    for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(count); ++idx) {
        Rng rng = Rng::stream(seed, kCoherentTag, static_cast<std::uint64_t>(idx));
        std::vector<int> counts(u.modes());
        poisson_counts(rng, beta, counts);
        set.samples[static_cast<std::size_t>(idx)] = PhotonPattern(std::move(counts));
    }
    return set;
}

SampleSet sample_distinguishable_smsv(const UnitaryMatrix& u, const SqueezingParams& s,
                                      std::size_t count, std::uint64_t seed) {
    check_count(count);
    const GaussianModel model = GaussianModel::distinguishable_smsv(u, s);
    SampleSet set = make_set(model, count, seed);
    std::vector<TruncatedDistribution> laws;
    for (double v : s.values()) laws.push_back(smsv_photon_number_dist(v, smsv_cutoff_for(v, kSourceTailTolerance)));
    sample_distinguishable(set, u, laws, kDistSmsvTag);
    return set;
}

SampleSet sample_distinguishable_thermal(const UnitaryMatrix& u, const std::vector<double>& mean_photons,
                                         std::size_t count, std::uint64_t seed) {
    check_count(count);
    const GaussianModel model = GaussianModel::distinguishable_thermal(u, mean_photons);
    SampleSet set = make_set(model, count, seed);
    std::vector<TruncatedDistribution> laws;
    for (double mu : mean_photons)
        laws.push_back(thermal_photon_number_dist(mu, thermal_cutoff_for(mu, kSourceTailTolerance)));
    sample_distinguishable(set, u, laws, kDistThermalTag);
    return set;
}

SampleSet sample_gbs_bruteforce(const UnitaryMatrix& u, const SqueezingParams& s, std::size_t count,
                                std::uint64_t seed, int max_photons) {
    check_count(count);
    require(max_photons >= 0, ErrorKind::Parameter, "sample_gbs_bruteforce: negative photon cap");
    const GaussianModel model = GaussianModel::smsv(u, s);
    double total_patterns = 0.0;
    for (int n = 0; n <= max_photons; n += 2) total_patterns += pattern_count(u.modes(), n);
    require(total_patterns <= kMaxEnumeratedPatterns, ErrorKind::SizeLimit,
            "sample_gbs_bruteforce: more than 1e6 patterns below the photon cap");

    const SmsvLaw law(u, s);
    std::vector<PhotonPattern> support;
    std::vector<double> cdf;
    double acc = 0.0;
    for (int n = 0; n <= max_photons; n += 2)
        for (auto& p : enumerate_patterns(u.modes(), n)) {
            acc += law.probability(p);
            support.push_back(std::move(p));
            cdf.push_back(acc);
        }

    SampleSet set = make_set(model, count, seed);
    set.truncation.sector_cutoff = max_photons;
    set.truncation.deficit = std::max(0.0, 1.0 - acc);
#pragma omp parallel for schedule(static)
    for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(count); ++idx) {
        Rng rng = Rng::stream(seed, kGbsTag, static_cast<std::uint64_t>(idx));
        set.samples[static_cast<std::size_t>(idx)] = support[rng.categorical_cdf(cdf)];
    }
    return set;
}

SampleSet sample_model(const GaussianModel& model, std::size_t count, std::uint64_t seed, int max_photons) {
    switch (model.kind()) {
        case ModelKind::Smsv:
            return sample_gbs_bruteforce(model.circuit(), model.squeezing(), count, seed, max_photons);
        case ModelKind::Thermal: return sample_thermal(model.circuit(), model.mean_photons(), count, seed);
        case ModelKind::Coherent: return sample_coherent(model.circuit(), model.amplitudes(), count, seed);
        case ModelKind::DistinguishableSmsv:
            return sample_distinguishable_smsv(model.circuit(), model.squeezing(), count, seed);
        case ModelKind::DistinguishableThermal:
            return sample_distinguishable_thermal(model.circuit(), model.mean_photons(), count, seed);
    }
    fail(ErrorKind::Parameter, "sample_model: unknown model kind");
}

double odd_total_fraction(const SampleSet& samples) {
    if (samples.samples.empty()) return 0.0;
    std::size_t odd = 0;
    for (const auto& p : samples.samples) odd += static_cast<std::size_t>(p.total() % 2);
    return static_cast<double>(odd) / static_cast<double>(samples.samples.size());
}

double mean_total_photons(const SampleSet& samples) {
    if (samples.samples.empty()) return 0.0;
    double total = 0.0;
    for (const auto& p : samples.samples) total += p.total();
    return total / static_cast<double>(samples.samples.size());
}

}  // namespace gbscert

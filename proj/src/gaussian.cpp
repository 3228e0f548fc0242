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

#include "gbscert/gaussian.hpp"

#include <cmath>
#include <string>

#include "gbscert/error.hpp"
#include "gbscert/matchings.hpp"

namespace gbscert {

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Smsv: return "smsv";
        case ModelKind::Thermal: return "thermal";
        case ModelKind::Coherent: return "coherent";
        case ModelKind::DistinguishableSmsv: return "distinguishable_smsv";
        case ModelKind::DistinguishableThermal: return "distinguishable_thermal";
    }
    return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
    for (ModelKind k : kAllModelKinds)
        if (to_string(k) == name) return k;
    fail(ErrorKind::Parameter, "unknown model kind '" + std::string(name) + "'");
}

bool is_squeezed_kind(ModelKind kind) {
    return kind == ModelKind::Smsv || kind == ModelKind::DistinguishableSmsv;
}

namespace {

void check_modes(const UnitaryMatrix& u, std::size_t n, const char* what) {
    require(u.modes() == n, ErrorKind::InvalidDimension,
            std::string(what) + ": parameter count does not match circuit modes");
}

void check_means(const std::vector<double>& means) {
    for (double v : means)
        require(std::isfinite(v) && v >= 0.0, ErrorKind::Parameter,
                "mean photon numbers must be finite and non-negative");
}

}  // namespace

GaussianModel GaussianModel::smsv(UnitaryMatrix circuit, SqueezingParams squeezing) {
    check_modes(circuit, squeezing.size(), "GaussianModel::smsv");
    GaussianModel g(ModelKind::Smsv, std::move(circuit));
    g.squeezing_ = std::move(squeezing);
    return g;
}

GaussianModel GaussianModel::distinguishable_smsv(UnitaryMatrix circuit, SqueezingParams squeezing) {
    GaussianModel g = smsv(std::move(circuit), std::move(squeezing));
    g.kind_ = ModelKind::DistinguishableSmsv;
    return g;
}

GaussianModel GaussianModel::thermal(UnitaryMatrix circuit, std::vector<double> mean_photons) {
    check_modes(circuit, mean_photons.size(), "GaussianModel::thermal");
    check_means(mean_photons);
    GaussianModel g(ModelKind::Thermal, std::move(circuit));
    g.mean_photons_ = std::move(mean_photons);
    return g;
}

GaussianModel GaussianModel::distinguishable_thermal(UnitaryMatrix circuit, std::vector<double> mean_photons) {
    GaussianModel g = thermal(std::move(circuit), std::move(mean_photons));
    g.kind_ = ModelKind::DistinguishableThermal;
    return g;
}

GaussianModel GaussianModel::coherent(UnitaryMatrix circuit, std::vector<Complex> amplitudes) {
    check_modes(circuit, amplitudes.size(), "GaussianModel::coherent");
    for (const Complex& a : amplitudes)
        require(std::isfinite(a.real()) && std::isfinite(a.imag()), ErrorKind::Parameter,
                "coherent amplitudes must be finite");
    GaussianModel g(ModelKind::Coherent, std::move(circuit));
    g.amplitudes_ = std::move(amplitudes);
    return g;
}

const SqueezingParams& GaussianModel::squeezing() const {
    require(squeezing_.has_value(), ErrorKind::Parameter, "model has no squeezing parameters");
    return *squeezing_;
}

const std::vector<double>& GaussianModel::mean_photons() const {
    require(mean_photons_.has_value(), ErrorKind::Parameter, "model has no thermal mean photon numbers");
    return *mean_photons_;
}

const std::vector<Complex>& GaussianModel::amplitudes() const {
    require(amplitudes_.has_value(), ErrorKind::Parameter, "model has no coherent amplitudes");
    return *amplitudes_;
}

double GaussianModel::total_mean_photons() const {
    double total = 0.0;
    switch (kind_) {
        case ModelKind::Smsv:
        case ModelKind::DistinguishableSmsv: return squeezing_->mean_photons();
        case ModelKind::Thermal:
        case ModelKind::DistinguishableThermal:
            for (double v : *mean_photons_) total += v;
            return total;
        case ModelKind::Coherent:
            for (const Complex& a : *amplitudes_) total += std::norm(a);
            return total;
    }
    return total;
}

// ---------------------------------------------------------------------------

ComplexMatrix smsv_B_matrix(const UnitaryMatrix& u, const SqueezingParams& s) {
    check_modes(u, s.size(), "smsv_B_matrix");
    const auto m = static_cast<Eigen::Index>(s.size());
    ComplexVector t(m);
    for (Eigen::Index i = 0; i < m; ++i) t(i) = std::tanh(s[static_cast<std::size_t>(i)]);
    return u.matrix() * t.asDiagonal() * u.matrix().transpose();
}

double smsv_prefactor(const SqueezingParams& s) {
    double p = 1.0;
    for (double v : s.values()) p /= std::cosh(v);
    return p;
}

double gbs_probability(const UnitaryMatrix& u, const SqueezingParams& s, const PhotonPattern& pattern) {
    return SmsvLaw(u, s).probability(pattern);
}

SmsvLaw::SmsvLaw(const UnitaryMatrix& u, const SqueezingParams& s)
    : b_(smsv_B_matrix(u, s)), prefactor_(smsv_prefactor(s)) {}

double SmsvLaw::probability(const PhotonPattern& pattern) const {
    require(pattern.modes() == modes(), ErrorKind::InvalidDimension,
            "gbs_probability: pattern length does not match mode count");
    const int n = pattern.total();
    if (n % 2 == 1) return 0.0;
    const Complex h = hafnian(repeat_submatrix(b_, pattern));
    return prefactor_ * std::norm(h) / factorial_product(pattern);
}

ComplexMatrix CovarianceMatrix::sigma_q() const {
    return sigma + 0.5 * ComplexMatrix::Identity(sigma.rows(), sigma.cols());
}

namespace {

CovarianceMatrix evolve_covariance(const UnitaryMatrix& u, const std::vector<double>& occupation,
                                   const std::vector<double>& pairing) {
    const auto m = static_cast<Eigen::Index>(occupation.size());
    ComplexMatrix in = ComplexMatrix::Zero(2 * m, 2 * m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto k = static_cast<std::size_t>(i);
        in(i, i) = in(m + i, m + i) = occupation[k] + 0.5;
        in(i, m + i) = in(m + i, i) = pairing[k];
    }
    ComplexMatrix s = ComplexMatrix::Zero(2 * m, 2 * m);
    s.topLeftCorner(m, m) = u.matrix();
    s.bottomRightCorner(m, m) = u.matrix().conjugate();
    return CovarianceMatrix{s * in * s.adjoint()};
}

}  // namespace

CovarianceMatrix build_covariance(const UnitaryMatrix& u, const SqueezingParams& s) {
    check_modes(u, s.size(), "build_covariance");
    std::vector<double> occupation(s.size()), pairing(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        occupation[i] = std::sinh(s[i]) * std::sinh(s[i]);
        pairing[i] = std::sinh(s[i]) * std::cosh(s[i]);
    }
    return evolve_covariance(u, occupation, pairing);
}

CovarianceMatrix build_thermal_covariance(const UnitaryMatrix& u, const std::vector<double>& mean_photons) {
    check_modes(u, mean_photons.size(), "build_thermal_covariance");
    check_means(mean_photons);
    return evolve_covariance(u, mean_photons, std::vector<double>(mean_photons.size(), 0.0));
}

double covariance_prefactor(const CovarianceMatrix& cov) {
    const Complex det = cov.sigma_q().partialPivLu().determinant();
    return 1.0 / std::sqrt(det.real());
}

ComplexMatrix sampling_matrix(const CovarianceMatrix& cov) {
    const auto n = cov.sigma.rows();
    const auto m = n / 2;
    const ComplexMatrix q_inv = cov.sigma_q().partialPivLu().inverse();
    const ComplexMatrix d = ComplexMatrix::Identity(n, n) - q_inv;
    ComplexMatrix a(n, n);
    a.topRows(m) = d.bottomRows(m);
    a.bottomRows(m) = d.topRows(m);
    return a;
}

double hafnian_form_probability(const CovarianceMatrix& cov, const PhotonPattern& pattern) {
    require(pattern.modes() == cov.modes(), ErrorKind::InvalidDimension,
            "hafnian_form_probability: pattern length does not match mode count");
    std::vector<int> doubled = pattern.counts;
    doubled.insert(doubled.end(), pattern.counts.begin(), pattern.counts.end());
    const ComplexMatrix a = sampling_matrix(cov);
    const Complex h = hafnian(repeat_submatrix(a, PhotonPattern(std::move(doubled))));
    return covariance_prefactor(cov) * h.real() / factorial_product(pattern);
}

// ---------------------------------------------------------------------------

ComplexMatrix thermal_C_matrix(const UnitaryMatrix& u, const std::vector<double>& mean_photons) {
    check_modes(u, mean_photons.size(), "thermal_C_matrix");
    check_means(mean_photons);
    const auto m = static_cast<Eigen::Index>(mean_photons.size());
    ComplexVector tau(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double mu = mean_photons[static_cast<std::size_t>(i)];
        tau(i) = mu / (1.0 + mu);
    }
    return u.matrix() * tau.asDiagonal() * u.matrix().adjoint();
}

namespace {

class ThermalLaw final : public PatternLaw {
public:
    ThermalLaw(const UnitaryMatrix& u, const std::vector<double>& mean_photons)
        : c_(thermal_C_matrix(u, mean_photons)) {
        prefactor_ = 1.0;
        for (double mu : mean_photons) prefactor_ /= 1.0 + mu;
    }
    std::size_t modes() const override { return static_cast<std::size_t>(c_.rows()); }
    double probability(const PhotonPattern& pattern) const override {
        require(pattern.modes() == modes(), ErrorKind::InvalidDimension,
                "thermal_probability: pattern length does not match mode count");
        require(pattern.total() <= kThermalMaxPhotons, ErrorKind::SizeLimit,
                "thermal_probability: total photon number above 16");
        const Complex per = permanent(repeat_submatrix(c_, pattern));
        return std::max(0.0, prefactor_ * per.real() / factorial_product(pattern));
    }

private:
    ComplexMatrix c_;
    double prefactor_;
};

class CoherentLaw final : public PatternLaw {
public:
    explicit CoherentLaw(std::vector<Complex> betas) : betas_(std::move(betas)) {}
    std::size_t modes() const override { return betas_.size(); }
    double probability(const PhotonPattern& pattern) const override {
        return coherent_probability(betas_, pattern);
    }

private:
    std::vector<Complex> betas_;
};

class DistinguishableLaw final : public PatternLaw {
public:
    DistinguishableLaw(const GaussianModel& model) : u_(model.circuit()), kind_(model.kind()) {
        if (kind_ == ModelKind::DistinguishableSmsv)
            params_ = model.squeezing().values();
        else
            params_ = model.mean_photons();
    }
    std::size_t modes() const override { return u_.modes(); }
    double probability(const PhotonPattern& pattern) const override {
        const int n = pattern.total();
        std::vector<std::vector<double>> laws;
        laws.reserve(params_.size());
        for (double p : params_) {
            auto d = kind_ == ModelKind::DistinguishableSmsv ? smsv_photon_number_dist(p, n)
                                                             : thermal_photon_number_dist(p, n);
            laws.push_back(std::move(d.probabilities));
        }
        return distinguishable_probability(u_, laws, pattern);
    }

private:
    UnitaryMatrix u_;
    ModelKind kind_;
    std::vector<double> params_;
};

}  // namespace

double thermal_probability(const UnitaryMatrix& u, const std::vector<double>& mean_photons,
                           const PhotonPattern& pattern) {
    return ThermalLaw(u, mean_photons).probability(pattern);
}

std::vector<Complex> coherent_evolve(const UnitaryMatrix& u, const std::vector<Complex>& alphas) {
    check_modes(u, alphas.size(), "coherent_evolve");
    const auto m = static_cast<Eigen::Index>(alphas.size());
    const ComplexVector in = Eigen::Map<const ComplexVector>(alphas.data(), m);
    const ComplexVector out = u.matrix() * in;
    return std::vector<Complex>(out.data(), out.data() + m);
}

double coherent_probability(const std::vector<Complex>& betas, const PhotonPattern& pattern) {
    require(pattern.modes() == betas.size(), ErrorKind::InvalidDimension,
            "coherent_probability: pattern length does not match mode count");
    double log_p = 0.0;
    for (std::size_t j = 0; j < betas.size(); ++j) {
        const double intensity = std::norm(betas[j]);
        const int k = pattern.counts[j];
        if (intensity == 0.0) {
            if (k > 0) return 0.0;
            continue;
        }
        log_p += -intensity + k * std::log(intensity) - std::lgamma(k + 1.0);
    }
    return std::exp(log_p);
}

std::vector<Complex> matched_coherent_amplitudes(const SqueezingParams& s, const std::vector<double>& phases) {
    require(phases.size() == s.size(), ErrorKind::InvalidDimension,
            "matched_coherent_amplitudes: one phase per source required");
    std::vector<Complex> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = std::polar(std::sinh(s[i]), phases[i]);
    return out;
}

std::vector<double> matched_thermal_means(const SqueezingParams& s) {
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = std::sinh(s[i]) * std::sinh(s[i]);
    return out;
}

// ---------------------------------------------------------------------------

double TruncatedDistribution::mean() const {
    double m = 0.0;
    for (std::size_t k = 0; k < probabilities.size(); ++k) m += static_cast<double>(k) * probabilities[k];
    return m;
}

TruncatedDistribution smsv_photon_number_dist(double s, int cutoff) {
    require(std::isfinite(s) && s >= 0.0, ErrorKind::Parameter, "smsv_photon_number_dist: s must be >= 0");
    require(cutoff >= 0, ErrorKind::Parameter, "smsv_photon_number_dist: negative cutoff");
    const double t2 = std::tanh(s) * std::tanh(s);
    TruncatedDistribution d;
    d.probabilities.assign(static_cast<std::size_t>(cutoff) + 1, 0.0);
    double term = 1.0 / std::cosh(s);
    double listed = 0.0;
    for (int k = 0; 2 * k <= cutoff; ++k) {
        if (k > 0) term *= t2 * (2.0 * k - 1.0) / (2.0 * k);
        d.probabilities[static_cast<std::size_t>(2 * k)] = term;
        listed += term;
    }
    d.tail_mass = std::max(0.0, 1.0 - listed);
    return d;
}

TruncatedDistribution thermal_photon_number_dist(double mean, int cutoff) {
    require(std::isfinite(mean) && mean >= 0.0, ErrorKind::Parameter,
            "thermal_photon_number_dist: mean must be >= 0");
    require(cutoff >= 0, ErrorKind::Parameter, "thermal_photon_number_dist: negative cutoff");
    const double q = mean / (1.0 + mean);
    TruncatedDistribution d;
    d.probabilities.resize(static_cast<std::size_t>(cutoff) + 1);
    double term = 1.0 / (1.0 + mean);
    for (int k = 0; k <= cutoff; ++k) {
        d.probabilities[static_cast<std::size_t>(k)] = term;
        term *= q;
    }
    d.tail_mass = std::pow(q, cutoff + 1);
    return d;
}

int smsv_cutoff_for(double s, double tail_tolerance) {
    int cutoff = 0;
    while (smsv_photon_number_dist(s, cutoff).tail_mass >= tail_tolerance) {
        cutoff += 2;
        require(cutoff <= 100000, ErrorKind::Parameter, "smsv_cutoff_for: squeezing too large");
    }
    return cutoff;
}

int thermal_cutoff_for(double mean, double tail_tolerance) {
    int cutoff = 0;
    const double q = mean / (1.0 + mean);
    while (std::pow(q, cutoff + 1) >= tail_tolerance) {
        ++cutoff;
        require(cutoff <= 1000000, ErrorKind::Parameter, "thermal_cutoff_for: mean too large");
    }
    return cutoff;
}

namespace {

void accumulate_source_splits(const Eigen::MatrixXd& w, const std::vector<Eigen::Index>& rows,
                              const std::vector<std::vector<double>>& laws, std::vector<int>& k,
                              std::size_t source, int remaining, double weight, double& total) {
    if (source + 1 == laws.size()) {
        const auto& law = laws[source];
        const double p = remaining < static_cast<int>(law.size()) ? law[static_cast<std::size_t>(remaining)] : 0.0;
        if (p == 0.0) return;
        k[source] = remaining;
        const auto n = static_cast<Eigen::Index>(rows.size());
        ComplexMatrix sub(n, n);
        Eigen::Index col = 0;
        for (std::size_t i = 0; i < k.size(); ++i)
            for (int r = 0; r < k[i]; ++r, ++col)
                for (Eigen::Index a = 0; a < n; ++a) sub(a, col) = w(rows[static_cast<std::size_t>(a)], static_cast<Eigen::Index>(i));
        total += weight * p * permanent(sub).real();
        return;
    }
    const auto& law = laws[source];
    for (int c = 0; c <= remaining; ++c) {
        const double p = c < static_cast<int>(law.size()) ? law[static_cast<std::size_t>(c)] : 0.0;
        if (p == 0.0) continue;
        k[source] = c;
        accumulate_source_splits(w, rows, laws, k, source + 1, remaining - c, weight * p, total);
    }
    k[source] = 0;
}

}  // namespace

double distinguishable_probability(const UnitaryMatrix& u,
                                   const std::vector<std::vector<double>>& source_laws,
                                   const PhotonPattern& pattern) {
    check_modes(u, source_laws.size(), "distinguishable_probability");
    require(pattern.modes() == u.modes(), ErrorKind::InvalidDimension,
            "distinguishable_probability: pattern length does not match mode count");
    const Eigen::MatrixXd w = u.matrix().cwiseAbs2();
    const auto rows = repeated_indices(pattern);
    std::vector<int> k(source_laws.size(), 0);
    double total = 0.0;
    accumulate_source_splits(w, rows, source_laws, k, 0, pattern.total(), 1.0, total);
    return std::max(0.0, total / factorial_product(pattern));
}

std::unique_ptr<PatternLaw> make_law(const GaussianModel& model) {
    switch (model.kind()) {
        case ModelKind::Smsv: return std::make_unique<SmsvLaw>(model.circuit(), model.squeezing());
        case ModelKind::Thermal: return std::make_unique<ThermalLaw>(model.circuit(), model.mean_photons());
        case ModelKind::Coherent:
            return std::make_unique<CoherentLaw>(coherent_evolve(model.circuit(), model.amplitudes()));
        case ModelKind::DistinguishableSmsv:
        case ModelKind::DistinguishableThermal: return std::make_unique<DistinguishableLaw>(model);
    }
    fail(ErrorKind::Parameter, "make_law: unknown model kind");
}

std::vector<std::pair<PhotonPattern, double>> exact_distribution(const GaussianModel& model, int total_photons) {
    require(total_photons >= 0, ErrorKind::Parameter, "exact_distribution: negative photon number");
    require(pattern_count(model.modes(), total_photons) <= kMaxEnumeratedPatterns, ErrorKind::SizeLimit,
            "exact_distribution: more than 1e6 patterns in the sector");
    const auto law = make_law(model);
    std::vector<std::pair<PhotonPattern, double>> out;
    for (auto& p : enumerate_patterns(model.modes(), total_photons)) {
        const double prob = law->probability(p);
        out.emplace_back(std::move(p), prob);
    }
    return out;
}

}  // namespace gbscert

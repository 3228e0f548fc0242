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

#include <memory>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "gbscert/linalg.hpp"
#include "gbscert/pattern.hpp"

namespace gbscert {

/// Input-state classes: genuine GBS (indistinguishable SMSV) and the four
/// classically simulable mock-ups.
enum class ModelKind {
    Smsv,
    Thermal,
    Coherent,
    DistinguishableSmsv,
    DistinguishableThermal,
};

inline constexpr ModelKind kAllModelKinds[] = {
    ModelKind::Smsv, ModelKind::Thermal, ModelKind::Coherent,
    ModelKind::DistinguishableSmsv, ModelKind::DistinguishableThermal,
};

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);
/// True for the two kinds whose sources emit photon pairs.
bool is_squeezed_kind(ModelKind kind);

/// An input-state class with exactly the parameters its kind requires.
class GaussianModel {
public:
    static GaussianModel smsv(UnitaryMatrix circuit, SqueezingParams squeezing);
    static GaussianModel thermal(UnitaryMatrix circuit, std::vector<double> mean_photons);
    static GaussianModel coherent(UnitaryMatrix circuit, std::vector<Complex> amplitudes);
    static GaussianModel distinguishable_smsv(UnitaryMatrix circuit, SqueezingParams squeezing);
    static GaussianModel distinguishable_thermal(UnitaryMatrix circuit, std::vector<double> mean_photons);

    ModelKind kind() const { return kind_; }
    const UnitaryMatrix& circuit() const { return circuit_; }
    std::size_t modes() const { return circuit_.modes(); }

    /// Throws Parameter if the kind does not carry that parameter set.
    const SqueezingParams& squeezing() const;
    const std::vector<double>& mean_photons() const;
    const std::vector<Complex>& amplitudes() const;

    /// Expected total photon number at the output.
    double total_mean_photons() const;

private:
    GaussianModel(ModelKind kind, UnitaryMatrix circuit) : kind_(kind), circuit_(std::move(circuit)) {}

    ModelKind kind_;
    UnitaryMatrix circuit_;
    std::optional<SqueezingParams> squeezing_;
    std::optional<std::vector<double>> mean_photons_;
    std::optional<std::vector<Complex>> amplitudes_;
};

// ---------------------------------------------------------------------------
// Squeezed vacuum

/// B = U diag(tanh s) U^T.
ComplexMatrix smsv_B_matrix(const UnitaryMatrix& u, const SqueezingParams& s);

/// prod_i sech(s_i), the vacuum probability of pure lossless SMSV input.
double smsv_prefactor(const SqueezingParams& s);

/// Pr(n) = prod sech(s_i) |Haf(B_n)|^2 / prod n_i!; exactly 0 for odd totals.
double gbs_probability(const UnitaryMatrix& u, const SqueezingParams& s, const PhotonPattern& pattern);

/// Complex covariance matrix in (a_1..a_m, a_1^dagger..a_m^dagger) ordering,
/// sigma_kl = <{xi_k, xi_l^dagger}>/2.
struct CovarianceMatrix {
    ComplexMatrix sigma;

    std::size_t modes() const { return static_cast<std::size_t>(sigma.rows() / 2); }
    /// sigma + I/2
    ComplexMatrix sigma_q() const;
};

CovarianceMatrix build_covariance(const UnitaryMatrix& u, const SqueezingParams& s);
CovarianceMatrix build_thermal_covariance(const UnitaryMatrix& u, const std::vector<double>& mean_photons);

/// det(sigma_Q)^(-1/2)
double covariance_prefactor(const CovarianceMatrix& cov);

/// A = X (I - sigma_Q^-1) with X the block swap; blocks [[B, C], [C^T, B^*]].
ComplexMatrix sampling_matrix(const CovarianceMatrix& cov);

/// General hafnian law: det(sigma_Q)^(-1/2) Haf(A_{n,n}) / prod n_i!, where the
/// selection repeats index i n_i times in both halves of A.
double hafnian_form_probability(const CovarianceMatrix& cov, const PhotonPattern& pattern);

// ---------------------------------------------------------------------------
// Thermal and coherent light

/// C = U diag(tau) U^dagger, tau_i = <n_i> / (1 + <n_i>).
ComplexMatrix thermal_C_matrix(const UnitaryMatrix& u, const std::vector<double>& mean_photons);

inline constexpr int kThermalMaxPhotons = 16;

/// Per(C_n) / (prod n_j! prod (1 + <n_i>)).
double thermal_probability(const UnitaryMatrix& u, const std::vector<double>& mean_photons,
                           const PhotonPattern& pattern);

/// beta_j = sum_i U_ji alpha_i, the same input/output index convention as the
/// B and C matrices.
std::vector<Complex> coherent_evolve(const UnitaryMatrix& u, const std::vector<Complex>& alphas);

/// Product of independent Poisson laws with means |beta_j|^2.
double coherent_probability(const std::vector<Complex>& betas, const PhotonPattern& pattern);

/// alpha_i = sinh(s_i) e^{i phi_i}: coherent light with the photon flux of the
/// squeezers.
std::vector<Complex> matched_coherent_amplitudes(const SqueezingParams& s, const std::vector<double>& phases);
/// <n_i> = sinh^2(s_i)
std::vector<double> matched_thermal_means(const SqueezingParams& s);

// ---------------------------------------------------------------------------
// Single-source photon-number laws

/// Probabilities P(0..cutoff) together with the mass beyond the cutoff. The
/// tail is reported, never folded back into the listed probabilities.
struct TruncatedDistribution {
    std::vector<double> probabilities;
    double tail_mass = 0.0;

    int cutoff() const { return static_cast<int>(probabilities.size()) - 1; }
    double mean() const;
};

/// P(2k) = (2k)! / (4^k (k!)^2) tanh^{2k}(s) / cosh(s), odd entries 0.
TruncatedDistribution smsv_photon_number_dist(double s, int cutoff);
/// P(k) = <n>^k / (1 + <n>)^{k+1}.
TruncatedDistribution thermal_photon_number_dist(double mean, int cutoff);

/// Smallest cutoff whose tail mass falls below `tail_tolerance`; even for SMSV.
int smsv_cutoff_for(double s, double tail_tolerance);
int thermal_cutoff_for(double mean, double tail_tolerance);

/// Law of independent sources whose photons are routed one by one to output j
/// with probability |U_ji|^2:
/// Pr(n) = sum_k prod_i P_i(k_i) Per(W[n, k]) / prod n_j!,  W_ji = |U_ji|^2.
double distinguishable_probability(const UnitaryMatrix& u,
                                   const std::vector<std::vector<double>>& source_laws,
                                   const PhotonPattern& pattern);

// ---------------------------------------------------------------------------
// Closed-form pattern laws

class PatternLaw {
public:
    virtual ~PatternLaw() = default;
    virtual std::size_t modes() const = 0;
    virtual double probability(const PhotonPattern& pattern) const = 0;
};

/// Caches B and the prefactor for repeated GBS probability evaluation.
class SmsvLaw final : public PatternLaw {
public:
    SmsvLaw(const UnitaryMatrix& u, const SqueezingParams& s);
    std::size_t modes() const override { return static_cast<std::size_t>(b_.rows()); }
    double probability(const PhotonPattern& pattern) const override;
    const ComplexMatrix& b_matrix() const { return b_; }
    double prefactor() const { return prefactor_; }

private:
    ComplexMatrix b_;
    double prefactor_;
};

std::unique_ptr<PatternLaw> make_law(const GaussianModel& model);

inline constexpr double kMaxEnumeratedPatterns = 1e6;

/// Every pattern of the n-photon sector with its probability.
std::vector<std::pair<PhotonPattern, double>> exact_distribution(const GaussianModel& model, int total_photons);

}  // namespace gbscert

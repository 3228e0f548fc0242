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

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "gbscert/pattern.hpp"

namespace gbscert {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Largest entrywise absolute difference; matrices must have equal shape.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double tolerance);
bool is_symmetric(const ComplexMatrix& a, double tolerance);

/// Square matrix with U U^dagger = I to 1e-10 per entry, checked on construction.
class UnitaryMatrix {
public:
    static constexpr double kTolerance = 1e-10;

    static UnitaryMatrix from_matrix(ComplexMatrix matrix, double tolerance = kTolerance);
    static UnitaryMatrix identity(std::size_t modes);

    const ComplexMatrix& matrix() const { return matrix_; }
    std::size_t modes() const { return static_cast<std::size_t>(matrix_.rows()); }
    Complex operator()(Eigen::Index row, Eigen::Index col) const { return matrix_(row, col); }

private:
    explicit UnitaryMatrix(ComplexMatrix matrix) : matrix_(std::move(matrix)) {}
    ComplexMatrix matrix_;
};

/// Per-source squeezing parameters s_i >= 0.
class SqueezingParams {
public:
    SqueezingParams() = default;
    explicit SqueezingParams(std::vector<double> values);

    /// Uniform squeezing on every mode.
    static SqueezingParams uniform(std::size_t modes, double s);

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    /// sum_i sinh^2(s_i): the mean photon number of the sources.
    double mean_photons() const;

private:
    std::vector<double> values_;
};

/// A = U diag(scale * lambda) U^T with lambda in [0, 1] sorted descending.
/// For a nonzero matrix lambda_max = 1 and scale is the spectral radius; the
/// zero matrix has scale 1 and lambda = 0.
struct TakagiFactorization {
    UnitaryMatrix unitary;
    std::vector<double> lambdas;
    double scale = 1.0;

    ComplexMatrix reconstruct() const;
};

UnitaryMatrix haar_unitary(std::size_t modes, std::uint64_t seed);

/// Takagi-Autonne factorization of a real symmetric matrix.
TakagiFactorization takagi(const ComplexMatrix& a);

/// Circuit and squeezing whose SMSV sampling matrix is proportional to a graph
/// adjacency matrix: U diag(tanh s) U^T = scale * A.
struct GraphEncoding {
    UnitaryMatrix circuit;
    SqueezingParams squeezing;
    double scale = 0.0;
};

/// Largest tanh(s_i) an encoding may use; keeps squeezing finite.
inline constexpr double kMaxEncodedTanh = 0.95;

GraphEncoding encode_graph(const ComplexMatrix& adjacency, double mean_photons_target);

/// n x n matrix built by repeating row and column i of `m` pattern[i] times,
/// in ascending mode order with repeats adjacent.
ComplexMatrix repeat_submatrix(const ComplexMatrix& m, const PhotonPattern& pattern);

/// Mode indices of the repeat selection, e.g. (2,0,1) -> {0,0,2}.
std::vector<Eigen::Index> repeated_indices(const PhotonPattern& pattern);

}  // namespace gbscert

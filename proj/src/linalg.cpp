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

#include "gbscert/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gbscert/error.hpp"
#include "gbscert/rng.hpp"

namespace gbscert {

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::InvalidDimension,
            "max_abs_diff: shape mismatch");
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff();
}

bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double tolerance) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return max_abs_diff(a, b) <= tolerance;
}

bool is_symmetric(const ComplexMatrix& a, double tolerance) {
    if (a.rows() != a.cols()) return false;
    return approx_equal(a, a.transpose(), tolerance);
}

UnitaryMatrix UnitaryMatrix::from_matrix(ComplexMatrix matrix, double tolerance) {
    require(matrix.rows() >= 1 && matrix.rows() == matrix.cols(), ErrorKind::InvalidDimension,
            "UnitaryMatrix: matrix must be square and non-empty");
    const ComplexMatrix identity = ComplexMatrix::Identity(matrix.rows(), matrix.cols());
    require(approx_equal(matrix * matrix.adjoint(), identity, tolerance), ErrorKind::Parameter,
            "UnitaryMatrix: U U^dagger deviates from identity");
    return UnitaryMatrix(std::move(matrix));
}

UnitaryMatrix UnitaryMatrix::identity(std::size_t modes) {
    require(modes >= 1, ErrorKind::InvalidDimension, "UnitaryMatrix: zero modes");
    const auto m = static_cast<Eigen::Index>(modes);
    return UnitaryMatrix(ComplexMatrix::Identity(m, m));
}

SqueezingParams::SqueezingParams(std::vector<double> values) : values_(std::move(values)) {
    for (double s : values_)
        require(std::isfinite(s) && s >= 0.0, ErrorKind::Parameter,
                "SqueezingParams: squeezing must be finite and non-negative");
}

SqueezingParams SqueezingParams::uniform(std::size_t modes, double s) {
    return SqueezingParams(std::vector<double>(modes, s));
}

double SqueezingParams::mean_photons() const {
    double total = 0.0;
    for (double s : values_) total += std::sinh(s) * std::sinh(s);
    return total;
}

ComplexMatrix TakagiFactorization::reconstruct() const {
    const auto m = static_cast<Eigen::Index>(lambdas.size());
    ComplexVector diag(m);
    for (Eigen::Index i = 0; i < m; ++i) diag(i) = scale * lambdas[static_cast<std::size_t>(i)];
    const ComplexMatrix& u = unitary.matrix();
    return u * diag.asDiagonal() * u.transpose();
}

UnitaryMatrix haar_unitary(std::size_t modes, std::uint64_t seed) {
    require(modes >= 1, ErrorKind::InvalidDimension, "haar_unitary: zero modes");
    const auto m = static_cast<Eigen::Index>(modes);
    Rng rng(derive_seed(seed, {0x4841415255ULL}));
    ComplexMatrix z(m, m);
    // Column-major fill order is part of the determinism contract.
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < m; ++i) {
            const double re = rng.normal();
            const double im = rng.normal();
            z(i, j) = Complex(re, im) / std::sqrt(2.0);
        }
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(m, m);
    const ComplexMatrix& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < m; ++j) {
        const Complex d = r(j, j);
        const double a = std::abs(d);
        q.col(j) *= (a > 0.0) ? d / a : Complex(1.0, 0.0);
    }
    return UnitaryMatrix::from_matrix(std::move(q));
}

TakagiFactorization takagi(const ComplexMatrix& a) {
    require(a.rows() >= 1 && a.rows() == a.cols(), ErrorKind::InvalidDimension,
            "takagi: matrix must be square and non-empty");
    require(is_symmetric(a, 1e-10), ErrorKind::SymmetryViolation, "takagi: matrix is not symmetric");
    require(a.imag().cwiseAbs().maxCoeff() <= 1e-12, ErrorKind::Parameter,
            "takagi: only real symmetric matrices are supported");

    const Eigen::MatrixXd real = a.real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(real);
    const Eigen::VectorXd& values = eig.eigenvalues();
    const Eigen::MatrixXd& vectors = eig.eigenvectors();
    const auto m = a.rows();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
        return std::abs(values(x)) > std::abs(values(y));
    });

    const double radius = std::abs(values(order.front()));
    const double scale = radius > 0.0 ? radius : 1.0;

    ComplexMatrix u(m, m);
    std::vector<double> lambdas(static_cast<std::size_t>(m));
    for (Eigen::Index k = 0; k < m; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        // Negative eigenvalues: i q |l| (i q)^T = l q q^T.
        const Complex phase = values(src) < 0.0 ? Complex(0.0, 1.0) : Complex(1.0, 0.0);
        u.col(k) = vectors.col(src).cast<Complex>() * phase;
        lambdas[static_cast<std::size_t>(k)] = std::min(1.0, std::abs(values(src)) / scale);
    }
    return TakagiFactorization{UnitaryMatrix::from_matrix(std::move(u)), std::move(lambdas), scale};
}

namespace {

// sum_i sinh^2(atanh(x_i)) = sum_i x_i^2 / (1 - x_i^2)
double encoded_mean_photons(const std::vector<double>& lambdas, double k) {
    double total = 0.0;
    for (double l : lambdas) {
        const double x = k * l;
        total += x * x / (1.0 - x * x);
    }
    return total;
}

}  // namespace

GraphEncoding encode_graph(const ComplexMatrix& adjacency, double mean_photons_target) {
    require(adjacency.rows() >= 1 && adjacency.rows() == adjacency.cols(),
            ErrorKind::InvalidDimension, "encode_graph: adjacency must be square");
    for (Eigen::Index i = 0; i < adjacency.rows(); ++i)
        for (Eigen::Index j = 0; j < adjacency.cols(); ++j) {
            const Complex v = adjacency(i, j);
            const bool binary = v == Complex(0.0) || v == Complex(1.0);
            require(binary && (i != j || v == Complex(0.0)), ErrorKind::Parameter,
                    "encode_graph: adjacency must be 0/1 with zero diagonal");
        }
    require(std::isfinite(mean_photons_target) && mean_photons_target >= 0.0,
            ErrorKind::Parameter, "encode_graph: mean photon target must be non-negative");

    TakagiFactorization t = takagi(adjacency);
    const std::size_t m = t.lambdas.size();
    const double lambda_max = t.lambdas.front();

    if (lambda_max == 0.0) {
        require(mean_photons_target == 0.0, ErrorKind::EncodingInfeasible,
                "encode_graph: empty graph can only encode zero mean photons");
        return GraphEncoding{std::move(t.unitary), SqueezingParams::uniform(m, 0.0), 0.0};
    }

    double lo = 0.0;
    double hi = kMaxEncodedTanh / lambda_max;
    require(encoded_mean_photons(t.lambdas, hi) >= mean_photons_target,
            ErrorKind::EncodingInfeasible,
            "encode_graph: target mean photon number needs tanh(s) above the cap");
    // Monotone in k; bisect to machine resolution.
    for (int iter = 0; iter < 200 && hi - lo > 0.0; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (encoded_mean_photons(t.lambdas, mid) < mean_photons_target)
            lo = mid;
        else
            hi = mid;
    }
    const double k = 0.5 * (lo + hi);

    std::vector<double> s(m);
    for (std::size_t i = 0; i < m; ++i) s[i] = std::atanh(k * t.lambdas[i]);
    return GraphEncoding{std::move(t.unitary), SqueezingParams(std::move(s)), k / t.scale};
}

std::vector<Eigen::Index> repeated_indices(const PhotonPattern& pattern) {
    std::vector<Eigen::Index> idx;
    for (std::size_t i = 0; i < pattern.counts.size(); ++i) {
        require(pattern.counts[i] >= 0, ErrorKind::Parameter, "negative photon count");
        for (int r = 0; r < pattern.counts[i]; ++r) idx.push_back(static_cast<Eigen::Index>(i));
    }
    return idx;
}

ComplexMatrix repeat_submatrix(const ComplexMatrix& m, const PhotonPattern& pattern) {
    require(m.rows() == m.cols() && static_cast<std::size_t>(m.rows()) == pattern.modes(),
            ErrorKind::InvalidDimension, "repeat_submatrix: pattern length must equal matrix size");
    const auto idx = repeated_indices(pattern);
    const auto n = static_cast<Eigen::Index>(idx.size());
    ComplexMatrix out(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) out(a, b) = m(idx[a], idx[b]);
    return out;
}

}  // namespace gbscert

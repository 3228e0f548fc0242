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

#include <random>

#include "gbscert/gaussian.hpp"
#include "gbscert/linalg.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace gbscert;

namespace {

ComplexMatrix cycle_adjacency(int n) {
    ComplexMatrix a = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) a(i, (i + 1) % n) = a((i + 1) % n, i) = 1.0;
    return a;
}

ComplexMatrix complete_adjacency(int n) {
    ComplexMatrix a = ComplexMatrix::Ones(n, n);
    a.diagonal().setZero();
    return a;
}

double sum_sinh2(const SqueezingParams& s) {
    double t = 0.0;
    for (double v : s.values()) t += std::sinh(v) * std::sinh(v);
    return t;
}

// Solves sum_i x_i^2 / (1 - x_i^2) = target with x_i = k mu_i by plain bisection on k.
double bisect_scale(const std::vector<double>& mu, double target) {
    double lo = 0.0, hi = 0.95 / *std::max_element(mu.begin(), mu.end());
    for (int it = 0; it < 200; ++it) {
        const double k = 0.5 * (lo + hi);
        double f = 0.0;
        for (double m : mu) f += (k * m) * (k * m) / (1.0 - (k * m) * (k * m));
        (f < target ? lo : hi) = k;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("haar_unitary: one mode is a pure phase") {
    for (std::uint64_t seed : {0u, 1u, 99u}) {
        UnitaryMatrix u = haar_unitary(1, seed);
        CHECK(std::abs(std::abs(u(0, 0)) - 1.0) < 1e-14);
    }
}

TEST_CASE("haar_unitary: deterministic in the seed") {
    CHECK(haar_unitary(4, 7).matrix() == haar_unitary(4, 7).matrix());
    CHECK(haar_unitary(4, 7).matrix() != haar_unitary(4, 8).matrix());
}

TEST_CASE("haar_unitary: zero modes rejected") { CHECK_ERROR_KIND(haar_unitary(0, 1), ErrorKind::InvalidDimension); }

TEST_CASE("haar_unitary: unitary to 1e-10 up to 64 modes") {
    for (std::size_t m : {1u, 2u, 3u, 5u, 8u, 16u, 33u, 64u}) {
        const ComplexMatrix u = haar_unitary(m, 1000 + m).matrix();
        CHECK(max_abs_diff(u * u.adjoint(), ComplexMatrix::Identity(m, m)) < 1e-10);
    }
}

TEST_CASE("haar_unitary: first and second moments of |U_11|^2") {
    // |U_11|^2 ~ Beta(1, m - 1): mean 1/m, E|U_11|^4 = 2 / (m (m + 1)).
    const int m = 3, draws = 10000;
    std::vector<double> x(draws);
    for (int i = 0; i < draws; ++i) x[i] = std::norm(haar_unitary(m, 5000 + i)(0, 0));
    double mean = 0, sq = 0;
    for (double v : x) mean += v / draws;
    for (double v : x) sq += (v - mean) * (v - mean) / (draws - 1);
    CHECK(std::abs(mean - 1.0 / 3.0) < 3 * std::sqrt(sq / draws));
    double fourth = 0, fourth_var = 0;
    for (double v : x) fourth += v * v / draws;
    for (double v : x) fourth_var += (v * v - fourth) * (v * v - fourth) / (draws - 1);
    CHECK(std::abs(fourth - 2.0 / 12.0) < 3 * std::sqrt(fourth_var / draws));
}

TEST_CASE("haar_unitary: entries of a column are not phase-biased") {
    // With the R-diagonal phases folded in, arg(U_11) is uniform: E[U_11] = 0.
    const int draws = 4000;
    Complex mean = 0.0;
    for (int i = 0; i < draws; ++i) mean += haar_unitary(2, 77000 + i)(0, 0) / double(draws);
    // |U_11|^2 has mean 1/2, so each component has variance 1/4.
    CHECK(std::abs(mean.real()) < 3 * std::sqrt(0.25 / draws));
    CHECK(std::abs(mean.imag()) < 3 * std::sqrt(0.25 / draws));
}

TEST_CASE("takagi: zero matrix") {
    TakagiFactorization t = takagi(ComplexMatrix::Zero(4, 4));
    CHECK(t.lambdas == std::vector<double>(4, 0.0));
    CHECK(max_abs_diff(t.reconstruct(), ComplexMatrix::Zero(4, 4)) < 1e-12);
}

TEST_CASE("takagi: identity") {
    TakagiFactorization t = takagi(ComplexMatrix::Identity(2, 2));
    CHECK(t.lambdas == std::vector<double>{1.0, 1.0});
    CHECK(t.scale == doctest::Approx(1.0));
    CHECK(max_abs_diff(t.reconstruct(), ComplexMatrix::Identity(2, 2)) < 1e-8);
}

TEST_CASE("takagi: four-cycle with eigenvalues 2, 0, 0, -2") {
    const ComplexMatrix a = cycle_adjacency(4);
    TakagiFactorization t = takagi(a);
    CHECK(t.scale == doctest::Approx(2.0).epsilon(1e-12));
    REQUIRE(t.lambdas.size() == 4);
    CHECK(t.lambdas[0] == doctest::Approx(1.0));
    CHECK(t.lambdas[1] == doctest::Approx(1.0));
    CHECK(std::abs(t.lambdas[2]) < 1e-12);
    CHECK(std::abs(t.lambdas[3]) < 1e-12);
    CHECK(max_abs_diff(t.reconstruct(), a) < 1e-8);
}

TEST_CASE("takagi: rejects asymmetric and complex input") {
    ComplexMatrix a = ComplexMatrix::Zero(3, 3);
    a(0, 1) = 1.0;
    CHECK_ERROR_KIND(takagi(a), ErrorKind::SymmetryViolation);
    ComplexMatrix c = ComplexMatrix::Identity(2, 2);
    c(0, 1) = c(1, 0) = Complex(0, 1);
    CHECK_ERROR_KIND(takagi(c), ErrorKind::Parameter);
}

TEST_CASE("takagi: reconstruction property on random real symmetric matrices") {
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const int m = 1 + trial % 12;
        const ComplexMatrix a = oracle::random_real_symmetric(m, gen);
        TakagiFactorization t = takagi(a);
        CHECK(max_abs_diff(t.reconstruct(), a) < 1e-8);
        CHECK(std::is_sorted(t.lambdas.rbegin(), t.lambdas.rend()));
        CHECK(t.lambdas.front() == doctest::Approx(1.0));
        CHECK(t.lambdas.back() >= 0.0);
        const ComplexMatrix u = t.unitary.matrix();
        CHECK(max_abs_diff(u * u.adjoint(), ComplexMatrix::Identity(m, m)) < 1e-10);
    }
}

TEST_CASE("encode_graph: empty graph") {
    GraphEncoding e = encode_graph(ComplexMatrix::Zero(3, 3), 0.0);
    CHECK(e.squeezing.values() == std::vector<double>(3, 0.0));
    CHECK_ERROR_KIND(encode_graph(ComplexMatrix::Zero(3, 3), 0.5), ErrorKind::EncodingInfeasible);
}

TEST_CASE("encode_graph: single edge hits the photon target") {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(0, 1) = a(1, 0) = 1.0;
    GraphEncoding e = encode_graph(a, 0.5);
    // Both Takagi values are 1: 2 k^2 / (1 - k^2) = 0.5 gives k = 1 / sqrt(5).
    const double k = 1.0 / std::sqrt(5.0);
    CHECK(std::abs(sum_sinh2(e.squeezing) - 0.5) < 1e-9);
    for (double s : e.squeezing.values()) CHECK(std::abs(s - std::atanh(k)) < 1e-9);
    CHECK(std::abs(e.scale - k) < 1e-9);
    CHECK(max_abs_diff(smsv_B_matrix(e.circuit, e.squeezing), e.scale * a) < 1e-8);
}

TEST_CASE("encode_graph: complete graph on four nodes") {
    const ComplexMatrix a = complete_adjacency(4);
    GraphEncoding e = encode_graph(a, 2.0);
    CHECK(std::abs(sum_sinh2(e.squeezing) - 2.0) < 1e-9);
    // Spectrum {3, -1, -1, -1}.
    const double k = bisect_scale({3.0, 1.0, 1.0, 1.0}, 2.0);
    std::vector<double> s = e.squeezing.values();
    std::sort(s.begin(), s.end());
    CHECK(std::abs(s[3] - std::atanh(3 * k)) < 1e-8);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(s[i] - std::atanh(k)) < 1e-8);
    CHECK(max_abs_diff(smsv_B_matrix(e.circuit, e.squeezing), e.scale * a) < 1e-8);
}

TEST_CASE("encode_graph: infeasible targets and invalid adjacency") {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(0, 1) = a(1, 0) = 1.0;
    // The cap tanh s <= 0.95 allows at most 2 * 0.9025 / 0.0975 photons.
    CHECK_ERROR_KIND(encode_graph(a, 19.0), ErrorKind::EncodingInfeasible);
    CHECK_NOTHROW(encode_graph(a, 18.0));
    ComplexMatrix bad = a;
    bad(0, 0) = 1.0;
    CHECK_ERROR_KIND(encode_graph(bad, 0.5), ErrorKind::Parameter);
}

TEST_CASE("encode_graph: B matrix reproduces the scaled adjacency on random graphs") {
    std::mt19937_64 gen(7);
    std::bernoulli_distribution edge(0.5);
    for (int trial = 0; trial < 30; ++trial) {
        const int m = 2 + trial % 8;
        ComplexMatrix a = ComplexMatrix::Zero(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                if (edge(gen)) a(i, j) = a(j, i) = 1.0;
        if (a.cwiseAbs().maxCoeff() == 0.0) a(0, 1) = a(1, 0) = 1.0;
        const double target = 0.25 * m;
        GraphEncoding e = encode_graph(a, target);
        CHECK(std::abs(sum_sinh2(e.squeezing) - target) < 1e-9);
        CHECK(max_abs_diff(smsv_B_matrix(e.circuit, e.squeezing), e.scale * a) < 1e-8);
        for (double s : e.squeezing.values()) CHECK(std::tanh(s) <= kMaxEncodedTanh + 1e-12);
    }
}

TEST_CASE("repeat_submatrix: identity and empty selections") {
    std::mt19937_64 gen(3);
    const ComplexMatrix m = oracle::random_complex(4, 4, gen);
    CHECK(repeat_submatrix(m, PhotonPattern{1, 1, 1, 1}) == m);
    CHECK(repeat_submatrix(m, PhotonPattern::vacuum(4)).rows() == 0);
}

TEST_CASE("repeat_submatrix: doubled first mode") {
    ComplexMatrix m(2, 2);
    m << Complex(1, 1), 2.0, 2.0, 4.0;
    ComplexMatrix expected = ComplexMatrix::Constant(2, 2, Complex(1, 1));
    CHECK(repeat_submatrix(m, PhotonPattern{2, 0}) == expected);
}

TEST_CASE("repeat_submatrix: pairs of unit selections give 2x2 minors") {
    std::mt19937_64 gen(11);
    for (int m = 1; m <= 6; ++m) {
        const ComplexMatrix a = oracle::random_complex(m, m, gen);
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                PhotonPattern p = PhotonPattern::vacuum(m);
                ++p.counts[i];
                ++p.counts[j];
                ComplexMatrix minor(2, 2);
                minor << a(i, i), a(i, j), a(j, i), a(j, j);
                CHECK(repeat_submatrix(a, p) == minor);
            }
    }
}

TEST_CASE("repeat_submatrix: length mismatch") {
    CHECK_ERROR_KIND(repeat_submatrix(ComplexMatrix::Zero(3, 3), PhotonPattern{1, 1}), ErrorKind::InvalidDimension);
}

TEST_CASE("UnitaryMatrix and SqueezingParams validate their invariants") {
    ComplexMatrix m = ComplexMatrix::Identity(2, 2);
    m(0, 0) = 1.1;
    CHECK_ERROR_KIND(UnitaryMatrix::from_matrix(m), ErrorKind::Parameter);
    CHECK_NOTHROW(UnitaryMatrix::from_matrix(oracle::beamsplitter()));
    CHECK_ERROR_KIND(SqueezingParams({0.1, -0.1}), ErrorKind::Parameter);
    CHECK_ERROR_KIND(SqueezingParams({NAN}), ErrorKind::Parameter);
    CHECK(SqueezingParams::uniform(3, 0.5).mean_photons() == doctest::Approx(3 * std::sinh(0.5) * std::sinh(0.5)));
}

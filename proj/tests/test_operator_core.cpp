#include "effgibbs/operator_core.hpp"

#include "doctest.h"

#include <cmath>

using namespace effgibbs;

namespace {

Matrix pauli_x() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

Matrix pauli_z() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

}  // namespace

TEST_CASE("hermitian operator construction") {
  Matrix ok = Matrix::Zero(2, 2);
  ok(0, 1) = complexd(0.0, 1.0);
  ok(1, 0) = complexd(0.0, -1.0);
  CHECK_NOTHROW(HermitianOperator{ok});

  Matrix skew = Matrix::Zero(2, 2);
  skew(0, 1) = 1.0;
  skew(1, 0) = -1.0;
  CHECK_THROWS_AS(HermitianOperator{skew}, std::invalid_argument);

  // Tiny asymmetry is symmetrized away.
  Matrix nearly = ok;
  nearly(0, 1) += complexd(1e-14, 0.0);
  const HermitianOperator h(nearly);
  CHECK(max_abs(h.mat() - h.mat().adjoint().eval()) == 0.0);

  CHECK_THROWS_AS(HermitianOperator(Matrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("eigh on small fixed matrices") {
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 3.0, 1.0, 2.0;
  const EighResult es = eigh(HermitianOperator(d));
  CHECK(es.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(es.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(es.eigenvalues[2] == doctest::Approx(3.0).epsilon(1e-14));

  const EighResult sx = eigh(HermitianOperator(pauli_x()));
  CHECK(sx.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(sx.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eigh reconstructs random input") {
  for (const Eigen::Index dim : {8, 32, 64}) {
    const HermitianOperator a = random_hermitian(dim, 1234 + static_cast<std::uint64_t>(dim));
    const EighResult es = eigh(a);
    const Matrix rebuilt =
        es.eigenvectors * es.eigenvalues.asDiagonal() * es.eigenvectors.adjoint();
    CHECK(max_abs(rebuilt - a.mat()) <= 1e-10 * std::max(1.0, max_abs(a.mat())));
    CHECK(max_abs(es.eigenvectors * es.eigenvectors.adjoint() - identity(dim)) < 1e-12);
  }
}

TEST_CASE("hermitian matrix functions") {
  Matrix d = Matrix::Zero(2, 2);
  d(1, 1) = std::log(2.0);
  const HermitianOperator e = herm_exp(HermitianOperator(d));
  CHECK(e.mat()(0, 0).real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.mat()(1, 1).real() == doctest::Approx(2.0).epsilon(1e-14));

  CHECK(max_abs(herm_exp(HermitianOperator(Matrix::Zero(3, 3))).mat() - identity(3)) < 1e-14);

  // log(exp(A)) = A for moderate norms.
  HermitianOperator a = random_hermitian(6, 99);
  const double scale = max_abs(a.mat());
  a = HermitianOperator(a.mat() / std::max(1.0, scale));
  const HermitianOperator round = herm_log(herm_exp(a));
  CHECK(max_abs(round.mat() - a.mat()) < 1e-10);

  // exp then log at the norm-2 contract boundary.
  const HermitianOperator b(2.0 * random_hermitian(5, 7).mat() /
                            max_abs(random_hermitian(5, 7).mat()));
  CHECK(max_abs(herm_log(herm_exp(b)).mat() - b.mat()) < 1e-9);

  const HermitianOperator indefinite(pauli_z());
  CHECK_THROWS_WITH_AS(herm_log(indefinite), doctest::Contains("nonpositive eigenvalue"),
                       numerical_error);
}

TEST_CASE("kron and embed") {
  CHECK(max_abs(kron(identity(2), identity(3)) - identity(6)) == 0.0);

  const ProductSpace space({2, 2});
  CHECK(max_abs(embed(pauli_z(), space, 0) - kron(pauli_z(), identity(2))) == 0.0);
  CHECK(max_abs(embed(pauli_z(), space, 1) - kron(identity(2), pauli_z())) == 0.0);
  CHECK_THROWS_AS(embed(pauli_z(), ProductSpace({3, 2}), 0), std::invalid_argument);

  Rng rng(5);
  const Matrix a = random_matrix(3, rng);
  const Matrix b = random_matrix(4, rng);
  const complexd lhs = kron(a, b).trace();
  const complexd rhs = a.trace() * b.trace();
  CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(rhs));
}

TEST_CASE("partial trace") {
  Rng rng(11);
  const Matrix a = random_matrix(2, rng);
  const Matrix b = random_matrix(3, rng);
  const ProductSpace space({2, 3});

  const Matrix over_b = partial_trace(kron(a, b), space, 1);
  CHECK(max_abs(over_b - a * b.trace()) < 1e-13);
  const Matrix over_a = partial_trace(kron(a, b), space, 0);
  CHECK(max_abs(over_a - b * a.trace()) < 1e-13);

  const Matrix mixed = identity(4) / 4.0;
  CHECK(max_abs(partial_trace(mixed, ProductSpace({2, 2}), 0) - identity(2) / 2.0) < 1e-15);

  const Matrix x = random_matrix(6, rng);
  CHECK(std::abs(partial_trace(x, space, 1).trace() - x.trace()) < 1e-12);

  // Three factors, middle slot.
  const ProductSpace triple({2, 3, 2});
  const Matrix c = random_matrix(2, rng);
  const Matrix abc = kron(kron(a, b), c);
  CHECK(max_abs(partial_trace(abc, triple, 1) - kron(a, c) * b.trace()) < 1e-12);

  CHECK_THROWS_AS(partial_trace(x, ProductSpace({2, 2}), 0), std::invalid_argument);
}

TEST_CASE("hilbert-schmidt inner product") {
  CHECK(hs_inner(identity(2), identity(2)).real() == doctest::Approx(2.0));
  CHECK(std::abs(hs_inner(pauli_x(), pauli_z())) < 1e-15);

  Rng rng(3);
  const Matrix x = random_matrix(4, rng);
  const Matrix y = random_matrix(4, rng);
  CHECK(hs_inner(x, x).real() >= 0.0);
  CHECK(std::abs(std::conj(hs_inner(x, y)) - hs_inner(y, x)) <
        1e-14 * std::abs(hs_inner(x, y)));
  CHECK_THROWS_AS(hs_inner(x, random_matrix(3, rng)), std::invalid_argument);
}

TEST_CASE("random hermitian generation") {
  const HermitianOperator a = random_hermitian(8, 2024);
  const HermitianOperator b = random_hermitian(8, 2024);
  CHECK(max_abs(a.mat() - b.mat()) == 0.0);
  CHECK(max_abs(random_hermitian(8, 2025).mat() - a.mat()) > 1e-3);

  CHECK(max_abs(a.mat() - a.mat().adjoint().eval()) == 0.0);
  const EighResult es = eigh(a);
  for (Eigen::Index i = 0; i < es.eigenvalues.size(); ++i) {
    CHECK(std::isfinite(es.eigenvalues[i]));
  }
}

#include "effgibbs/bohr.hpp"
#include "effgibbs/models.hpp"

#include "doctest.h"

#include <cmath>

using namespace effgibbs;

TEST_CASE("single two-level system decomposes into its ladder operators") {
  const double wa = 0.9;
  const Matrix lower = tls_lower();
  const HermitianOperator h0(wa * (lower.adjoint() * lower).eval());
  const SpectralDecomposition sd = spectral_decompose(h0);
  const BohrDecomposition bd = bohr_decompose((lower + lower.adjoint()).eval(), sd);

  REQUIRE(bd.size() == 2);
  CHECK(max_abs(bd.get_or_zero(wa) - lower) < 1e-14);
  CHECK(max_abs(bd.get_or_zero(-wa) - lower.adjoint()) < 1e-14);
  CHECK(bd.find(0.0) == nullptr);

  // Sign convention [H0, D_w] = -w D_w.
  const Matrix comm = h0.mat() * lower - lower * h0.mat();
  CHECK(max_abs(comm + wa * lower) < 1e-14);
}

TEST_CASE("two off-resonant two-level systems") {
  ModelSpec spec;
  spec.family = ModelFamily::TwoTls;
  spec.omega_a = 1.0;
  spec.omega_b = 2.2;
  spec.g = complexd(0.4, -0.3);
  const BuiltModel built = build(spec);
  const SpectralDecomposition sd = spectral_decompose(built.h0);
  const BohrDecomposition bd = bohr_decompose(built.h_i, sd);

  REQUIRE(bd.size() == 4);
  const double diff = spec.omega_a - spec.omega_b;
  const double sum = spec.omega_a + spec.omega_b;

  const Matrix lower = tls_lower();
  const Matrix expected_diff = spec.g * kron(lower, lower.adjoint().eval());
  const Matrix expected_sum = std::conj(spec.g) * kron(lower, lower);
  CHECK(max_abs(bd.get_or_zero(diff) - expected_diff) < 1e-13);
  CHECK(max_abs(bd.get_or_zero(sum) - expected_sum) < 1e-13);
  CHECK(max_abs(bd.get_or_zero(-diff) - expected_diff.adjoint().eval()) < 1e-13);
  CHECK(max_abs(bd.get_or_zero(-sum) - expected_sum.adjoint().eval()) < 1e-13);
}

TEST_CASE("commuting interaction is a single zero-frequency term") {
  Matrix h0 = Matrix::Zero(3, 3);
  h0.diagonal() << 0.0, 1.0, 2.5;
  Matrix h_i = Matrix::Zero(3, 3);
  h_i.diagonal() << 0.4, -0.1, 0.9;
  const SpectralDecomposition sd = spectral_decompose(HermitianOperator(h0));
  const BohrDecomposition bd = bohr_decompose(h_i, sd);
  REQUIRE(bd.size() == 1);
  CHECK(bd.frequency(0) == 0.0);
  CHECK(max_abs(bd.op(0) - h_i) < 1e-14);
}

TEST_CASE("decomposition invariants on a random model") {
  Matrix h0 = Matrix::Zero(6, 6);
  h0.diagonal() << 0.0, 0.13, 0.39, 0.55, 0.81, 1.0;
  const HermitianOperator h0_op(h0);
  const HermitianOperator h_i = random_hermitian(6, 314);
  const SpectralDecomposition sd = spectral_decompose(h0_op);
  const BohrDecomposition bd = bohr_decompose(h_i.mat(), sd);

  CHECK(max_abs(bd.reconstruct() - h_i.mat()) <= 1e-10 * max_abs(h_i.mat()));
  for (std::size_t i = 0; i < bd.size(); ++i) {
    const Matrix comm = h0 * bd.op(i) - bd.op(i) * h0;
    CHECK(max_abs(comm + bd.frequency(i) * bd.op(i)) <=
          1e-10 * max_abs(h0) * max_abs(h_i.mat()));
    CHECK(max_abs(bd.get_or_zero(-bd.frequency(i)) - bd.op(i).adjoint().eval()) <= 1e-10);
  }
}

TEST_CASE("kms identity under the free Gibbs average") {
  // Single two-level system: both sides are elementary.
  const double wa = 1.1, beta = 0.8;
  const Matrix lower = tls_lower();
  const HermitianOperator h0(wa * (lower.adjoint() * lower).eval());
  const SpectralDecomposition sd = spectral_decompose(h0);
  const BohrDecomposition bd = bohr_decompose((lower + lower.adjoint()).eval(), sd);
  CHECK(kms_check(bd, h0, beta) <= 1e-12);

  // Random six-level model.
  Matrix rd = Matrix::Zero(6, 6);
  rd.diagonal() << 0.0, 0.21, 0.345, 0.62, 0.77, 0.98;
  const HermitianOperator rh0(rd);
  const HermitianOperator h_i = random_hermitian(6, 2718);
  const BohrDecomposition rbd = bohr_decompose(h_i.mat(), spectral_decompose(rh0));
  CHECK(kms_check(rbd, rh0, 0.7) <= 1e-10 * max_abs(h_i.mat()) * max_abs(h_i.mat()));

  CHECK_THROWS_AS(kms_check(rbd, rh0, -1.0), std::invalid_argument);
}

TEST_CASE("pinching selects frequency-balanced eigenoperator products") {
  Matrix h0 = Matrix::Zero(4, 4);
  h0.diagonal() << 0.0, 0.3, 0.75, 1.3;
  const HermitianOperator h0_op(h0);
  const HermitianOperator h_i = random_hermitian(4, 555);
  const SpectralDecomposition sd = spectral_decompose(h0_op);
  const BohrDecomposition bd = bohr_decompose(h_i.mat(), sd);

  for (std::size_t i = 0; i < bd.size(); ++i) {
    for (std::size_t j = 0; j < bd.size(); ++j) {
      const Matrix prod = bd.op(i) * bd.op(j);
      const double total = bd.frequency(i) + bd.frequency(j);
      if (std::abs(total) <= 10.0 * bd.freq_tol()) {
        CHECK(max_abs(pinch(prod, sd) - prod) < 1e-10);
      } else {
        CHECK(max_abs(pinch(prod, sd)) < 1e-10);
      }
    }
  }
}

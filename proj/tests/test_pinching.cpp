#include "effgibbs/pinching.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>

using namespace effgibbs;

namespace {

Matrix diag3(double a, double b, double c) {
  Matrix m = Matrix::Zero(3, 3);
  m.diagonal() << a, b, c;
  return m;
}

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

TEST_CASE("spectral decomposition clusters eigenvalues") {
  const SpectralDecomposition sd =
      spectral_decompose(HermitianOperator(diag3(1.0, 1.0, 2.0)), 1e-9);
  REQUIRE(sd.n_levels() == 2);
  CHECK(sd.levels()[0].energy == doctest::Approx(1.0));
  CHECK(sd.levels()[1].energy == doctest::Approx(2.0));
  CHECK(max_abs(sd.levels()[0].projector - diag3(1.0, 1.0, 0.0)) < 1e-12);
  CHECK(max_abs(sd.levels()[1].projector - diag3(0.0, 0.0, 1.0)) < 1e-12);

  const SpectralDecomposition forced =
      spectral_decompose(HermitianOperator(diag3(0.0, 1e-12, 1.0)), 1e-9);
  REQUIRE(forced.n_levels() == 2);
  CHECK(forced.levels()[0].basis.cols() == 2);

  CHECK_THROWS_AS(spectral_decompose(HermitianOperator(diag3(1, 2, 3)), -1.0),
                  std::invalid_argument);
}

TEST_CASE("degenerate projectors from rotated spectra") {
  const EighResult basis = eigh(random_hermitian(4, 8));
  RealVector spectrum(4);
  spectrum << 1.0, 1.0, 1.0, 3.0;
  const Matrix h0 = basis.eigenvectors * spectrum.asDiagonal() * basis.eigenvectors.adjoint();
  const SpectralDecomposition sd = spectral_decompose(HermitianOperator(h0, 1e-10));

  REQUIRE(sd.n_levels() == 2);
  CHECK(sd.levels()[0].basis.cols() == 3);
  CHECK(sd.levels()[1].basis.cols() == 1);

  Matrix completeness = Matrix::Zero(4, 4);
  Matrix rebuilt = Matrix::Zero(4, 4);
  for (const auto& level : sd.levels()) {
    completeness += level.projector;
    rebuilt += level.energy * level.projector;
    CHECK(max_abs(level.projector * level.projector - level.projector) < 1e-10);
  }
  CHECK(max_abs(completeness - identity(4)) < 1e-10);
  CHECK(max_abs(rebuilt - h0) < 1e-10 * max_abs(h0));
  CHECK(max_abs(sd.levels()[0].projector * sd.levels()[1].projector) < 1e-10);
}

TEST_CASE("pinch fixed points and kernels") {
  const SpectralDecomposition nondeg =
      spectral_decompose(HermitianOperator(diag3(0.3, 1.0, 2.0)));
  const Matrix x = diag3(5.0, -1.0, 0.5);
  CHECK(max_abs(pinch(x, nondeg) - x) < 1e-14);

  const SpectralDecomposition sz = spectral_decompose(HermitianOperator(pauli_z()));
  CHECK(max_abs(pinch(pauli_x(), sz)) < 1e-14);

  // Degenerate block is preserved, cross terms die.
  const SpectralDecomposition deg =
      spectral_decompose(HermitianOperator(diag3(1.0, 1.0, 2.0)));
  Rng rng(17);
  const Matrix y = random_matrix(3, rng);
  const Matrix py = pinch(y, deg);
  CHECK(max_abs(py.topLeftCorner(2, 2) - y.topLeftCorner(2, 2)) < 1e-14);
  CHECK(std::abs(py(2, 2) - y(2, 2)) < 1e-14);
  CHECK(std::abs(py(0, 2)) < 1e-14);
  CHECK(std::abs(py(2, 1)) < 1e-14);

  CHECK_THROWS_AS(pinch(random_matrix(4, rng), deg), std::invalid_argument);
}

TEST_CASE("pinch analytic properties on random inputs") {
  const SpectralDecomposition sd = spectral_decompose(random_hermitian(6, 21));
  Rng rng(22);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix x = random_matrix(6, rng);
    const Matrix px = pinch(x, sd);
    CHECK(max_abs(pinch(px, sd) - px) <= 1e-12 * max_abs(x));
    CHECK(std::abs(px.trace() - x.trace()) <= 1e-12 * std::abs(x.trace()) + 1e-12);
    const Matrix h0 = sd.h0();
    CHECK(max_abs(h0 * px - px * h0) <= 1e-10 * max_abs(h0) * max_abs(x));
    const Matrix y = random_matrix(6, rng);
    CHECK(std::abs(hs_inner(x, pinch(y, sd)) - hs_inner(px, y)) <=
          1e-12 * std::abs(hs_inner(x, y)) + 1e-12);
  }
}

TEST_CASE("time average converges to the pinching") {
  using std::numbers::pi;

  // Commuting observable is exactly stationary.
  const HermitianOperator sz(pauli_z());
  CHECK(max_abs(time_average(pauli_z(), sz, 11.0, 100) - pauli_z()) < 1e-12);

  // Off-diagonal observable averages away.
  const Matrix avg = time_average(pauli_x(), sz, 200.0 * pi, 40000);
  CHECK(max_abs(avg) <= 1e-2);

  // Halving residual under doubled horizon, away from commensurate times.
  Matrix h0 = Matrix::Zero(4, 4);
  h0.diagonal() << 0.0, 1.0, 1.0 + std::sqrt(2.0), 2.0 + std::sqrt(3.0);
  const HermitianOperator h0_op(h0);
  const SpectralDecomposition sd = spectral_decompose(h0_op);
  Rng rng(31);
  const Matrix x = random_matrix(4, rng);
  const Matrix target = pinch(x, sd);
  const double t = 210.0;
  const double e1 = max_abs(time_average(x, h0_op, t, 8192) - target);
  const double e2 = max_abs(time_average(x, h0_op, 2.0 * t, 16384) - target);
  CHECK(e2 <= 0.6 * e1);

  CHECK_THROWS_AS(time_average(pauli_x(), sz, -1.0, 100), std::invalid_argument);
  CHECK_THROWS_AS(time_average(pauli_x(), sz, 1.0, 1), std::invalid_argument);
}

TEST_CASE("projector property report") {
  const SpectralDecomposition nondeg = spectral_decompose(random_hermitian(8, 77));
  for (const auto& check : projector_property_report(nondeg, 20, 123)) {
    INFO(check.name, " deviation ", check.deviation);
    CHECK(check.pass);
  }

  Matrix deg = Matrix::Zero(3, 3);
  deg.diagonal() << 1.0, 1.0, 2.0;
  const SpectralDecomposition dsd = spectral_decompose(HermitianOperator(deg));
  for (const auto& check : projector_property_report(dsd, 20, 124)) {
    INFO(check.name, " deviation ", check.deviation);
    CHECK(check.pass);
  }

  // Negative control: dropping a level breaks trace preservation and unitality.
  std::vector<SpectralLevel> levels(dsd.levels().begin(), dsd.levels().end() - 1);
  const SpectralDecomposition corrupted(std::move(levels), dsd.h0(), dsd.cluster_tol());
  bool trace_failed = false;
  bool unitality_failed = false;
  for (const auto& check : projector_property_report(corrupted, 5, 125)) {
    if (check.name == "trace_preservation" && !check.pass) trace_failed = true;
    if (check.name == "unitality" && !check.pass) unitality_failed = true;
  }
  CHECK(trace_failed);
  CHECK(unitality_failed);
}

TEST_CASE("entropy rises under pinching") {
  const SpectralDecomposition sd = spectral_decompose(random_hermitian(5, 42));
  Rng rng(43);
  for (int i = 0; i < 6; ++i) {
    const Matrix rho = random_density_matrix(5, rng);
    // Spectrum moves toward uniformity; verified through the eigenvalues
    // directly to keep this test free of the thermo module.
    const auto before = eigh(HermitianOperator(rho, 1e-9)).eigenvalues;
    const auto after = eigh(HermitianOperator(pinch(rho, sd), 1e-9)).eigenvalues;
    auto entropy = [](const RealVector& p) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < p.size(); ++k) {
        if (p[k] > 1e-15) s -= p[k] * std::log(p[k]);
      }
      return s;
    };
    CHECK(entropy(after) >= entropy(before) - 1e-10);
  }
}

#include "effgibbs/cumulant.hpp"
#include "effgibbs/exact.hpp"
#include "effgibbs/models.hpp"

#include "doctest.h"

#include <cmath>

using namespace effgibbs;

namespace {

// Frozen reference values, computed with 30-digit nested quadrature.
constexpr double kH3Ref = 0.103297411404369825;       // h_3(0.8; 0.3, -1.1, 0.4)
constexpr double kH2Ref = 0.640663431602937633;       // h_2(1.1; 0.4, -0.9)
constexpr double kG3Ref = 0.231302628020103177;       // g_3(1.3; 0.5, 0.5)
constexpr double kG3SingularRef = 0.141150717809302;  // g_3(1.0; 0.7, -0.7)
constexpr double kG3PrefixZeroRef = 0.106721053824122;  // g_3(0.9; 0.0, 0.6)

struct SmallModel {
  HermitianOperator h0;
  Matrix h_i;
  SpectralDecomposition sd;
  BohrDecomposition bd;
};

SmallModel random_small_model(std::uint64_t seed) {
  Matrix d = Matrix::Zero(4, 4);
  Rng rng(seed);
  RealVector spectrum(4);
  for (Eigen::Index i = 0; i < 4; ++i) spectrum[i] = rng.uniform();
  std::sort(spectrum.data(), spectrum.data() + 4);
  d.diagonal() = spectrum;
  HermitianOperator h0(d);
  Matrix g = random_matrix(4, rng);
  Matrix h_i = 0.5 * (g + g.adjoint().eval());
  h_i /= max_abs(h_i);
  SpectralDecomposition sd = spectral_decompose(h0);
  BohrDecomposition bd = bohr_decompose(h_i, sd);
  return {std::move(h0), std::move(h_i), std::move(sd), std::move(bd)};
}

}  // namespace

TEST_CASE("h_n closed forms against frozen quadrature values") {
  CHECK(h_n(1.0, std::vector<double>{1.0}) ==
        doctest::Approx(0.6321205588285577).epsilon(1e-14));
  CHECK(h_n(1.7, std::vector<double>{0.0}) == doctest::Approx(1.7).epsilon(1e-14));
  CHECK(h_n(0.0, std::vector<double>{0.3, 0.4}) == 0.0);

  CHECK(h_n(1.1, std::vector<double>{0.4, -0.9}) == doctest::Approx(kH2Ref).epsilon(1e-12));
  CHECK(h_n(0.8, std::vector<double>{0.3, -1.1, 0.4}) ==
        doctest::Approx(kH3Ref).epsilon(1e-11));
  CHECK(h_n_quadrature(0.8, std::vector<double>{0.3, -1.1, 0.4}) ==
        doctest::Approx(kH3Ref).epsilon(1e-9));

  // Near-cancelling segment: closed form would divide by ~1e-9.
  const std::vector<double> tricky{0.5, -0.5 + 1e-9, 0.4};
  CHECK(h_n(0.9, tricky) ==
        doctest::Approx(h_n_quadrature(0.9, tricky)).epsilon(1e-9));
}

TEST_CASE("g_k closed forms, limits, and fallback") {
  CHECK(g_k(2.3, std::vector<double>{}) == 2.3);  // g_1 = beta

  for (const double beta : {0.4, 1.0, 2.7}) {
    for (const double w : {-1.3, -0.2, 0.05, 0.9, 2.0}) {
      const double printed = (beta * w + std::exp(-beta * w) - 1.0) / (w * w);
      CHECK(g_k(beta, std::vector<double>{w}) ==
            doctest::Approx(printed).epsilon(1e-12));
    }
  }
  CHECK(g_k(1.7, std::vector<double>{0.0}) ==
        doctest::Approx(0.5 * 1.7 * 1.7).epsilon(1e-14));

  CHECK(g_k(1.3, std::vector<double>{0.5, 0.5}) == doctest::Approx(kG3Ref).epsilon(1e-12));
  CHECK(g_k_quadrature(1.3, std::vector<double>{0.5, 0.5}) ==
        doctest::Approx(kG3Ref).epsilon(1e-9));

  // Exactly vanishing partial sums route through quadrature.
  CHECK(g_k(1.0, std::vector<double>{0.7, -0.7}) ==
        doctest::Approx(kG3SingularRef).epsilon(1e-10));
  CHECK(g_k(0.9, std::vector<double>{0.0, 0.6}) ==
        doctest::Approx(kG3PrefixZeroRef).epsilon(1e-10));

  // A partial sum in the badly conditioned window above the segment
  // threshold: the cancellation guard must reroute to quadrature.
  const std::vector<double> window{0.5, -0.5 + 2e-4};
  CHECK(g_k(0.8, window) ==
        doctest::Approx(g_k_quadrature(0.8, window)).epsilon(1e-10));
}

TEST_CASE("f and f1") {
  CHECK(f(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f1(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f(1.0) == doctest::Approx(0.7357588823428846).epsilon(1e-14));

  double min_f = 1e300, min_f1 = 1e300;
  for (int i = 0; i <= 2000; ++i) {
    const double x = -50.0 + 0.05 * i;
    min_f = std::min(min_f, f(x));
    min_f1 = std::min(min_f1, f1(x));
    if (std::abs(x) >= 1e-3) {
      const double direct = 2.0 * (x + std::exp(-x) - 1.0) / (x * x);
      CHECK(std::abs(f(x) - direct) <= 1e-14);
    }
  }
  CHECK(min_f > 0.0);
  CHECK(min_f1 > 0.0);

  // Series branch continuity across the cut.
  CHECK(f(1e-3 * (1.0 - 1e-9)) == doctest::Approx(f(1e-3 * (1.0 + 1e-9))).epsilon(1e-9));
}

TEST_CASE("explicit moments") {
  const SmallModel m = random_small_model(101);
  const double beta = 1.4;

  CHECK(max_abs(moment_explicit(1, beta, m.bd) + beta * m.bd.get_or_zero(0.0)) <= 1e-12);

  // Hand-assembled M2 for a single two-level pair plus diagonal part.
  {
    const double w = 1.3, b = 0.9, eps = 0.25;
    Matrix h0 = Matrix::Zero(2, 2);
    h0(1, 1) = w;
    Matrix h_i = Matrix::Zero(2, 2);
    h_i(0, 1) = 1.0;
    h_i(1, 0) = 1.0;
    h_i(0, 0) = eps;
    h_i(1, 1) = -eps;
    const SpectralDecomposition sd = spectral_decompose(HermitianOperator(h0));
    const BohrDecomposition bd = bohr_decompose(h_i, sd);

    auto mu2 = [b](double omega) {
      return (b * omega + std::exp(-b * omega) - 1.0) / (omega * omega);
    };
    const Matrix d_plus = bd.get_or_zero(w);
    const Matrix d0 = bd.get_or_zero(0.0);
    const Matrix expected = mu2(w) * d_plus * d_plus.adjoint() +
                            mu2(-w) * d_plus.adjoint() * d_plus +
                            0.5 * b * b * d0 * d0;
    CHECK(max_abs(moment_explicit(2, b, bd) - expected) < 1e-13);
  }

  // Nested-quadrature oracle for k = 1..3.
  for (const double beta2 : {0.3, 1.0, 3.0}) {
    for (int k = 1; k <= 3; ++k) {
      const Matrix expl = moment_explicit(k, beta2, m.bd);
      const Matrix quad = moment_quadrature(k, beta2, m.h0, m.h_i, m.sd, 128);
      const double scale = std::pow(beta2 * max_abs(m.h_i), k);
      CHECK(max_abs(expl - quad) <= 1e-7 * scale);
    }
  }

  CHECK(max_abs(moment_quadrature(2, 0.0, m.h0, m.h_i, m.sd, 16)) == 0.0);
  CHECK_THROWS_WITH_AS(moment_quadrature(5, 1.0, m.h0, m.h_i, m.sd, 16),
                       doctest::Contains("refused"), std::invalid_argument);
  CHECK_THROWS_AS(moment_quadrature(2, 1.0, m.h0, m.h_i, m.sd, 4), std::invalid_argument);
}

TEST_CASE("cumulant combination matches the printed low orders") {
  const SmallModel m = random_small_model(202);
  const double beta = 0.9;
  std::vector<Matrix> moments;
  for (int k = 1; k <= 3; ++k) moments.push_back(moment_explicit(k, beta, m.bd));
  const auto cumulants = cumulant_combine(moments, 3);
  REQUIRE(cumulants.size() == 3);

  CHECK(max_abs(cumulants[0] - moments[0]) == 0.0);
  CHECK(max_abs(cumulants[1] - (moments[1] - 0.5 * moments[0] * moments[0])) < 1e-13);
  const Matrix c3 = moments[2] - 0.5 * moments[1] * moments[0] -
                    0.5 * moments[0] * moments[1] +
                    (1.0 / 3.0) * moments[0] * moments[0] * moments[0];
  CHECK(max_abs(cumulants[2] - c3) < 1e-13);

  // Independently transcribed eigenoperator form of C3: g-coefficients and
  // operator products assembled from scratch.
  {
    Matrix direct = Matrix::Zero(4, 4);
    auto mu2 = [beta](double w) {
      return w == 0.0 ? 0.5 * beta * beta
                      : (beta * w + std::exp(-beta * w) - 1.0) / (w * w);
    };
    auto gamma3 = [beta](double w1, double w2) {
      const double s = w1 + w2;
      return (beta - 1.0 / w1 - 1.0 / s) / (w1 * s) +
             std::exp(-beta * w1) / (w1 * w1 * w2) - std::exp(-beta * s) / (w2 * s * s);
    };
    for (std::size_t i = 0; i < m.bd.size(); ++i) {
      for (std::size_t j = 0; j < m.bd.size(); ++j) {
        const double w1 = m.bd.frequency(i), w2 = m.bd.frequency(j);
        const Matrix* last = m.bd.find(-w1 - w2);
        if (last == nullptr) continue;
        // Generic spectra keep every partial sum away from zero except the
        // all-diagonal tuple, handled through the mu2 limits.
        double coeff;
        if (w1 == 0.0 && w2 == 0.0) {
          coeff = std::pow(beta, 3) / 6.0;
        } else if (w1 == 0.0) {
          coeff = g_k(beta, std::vector<double>{w1, w2});
        } else if (w2 == 0.0 || std::abs(w1 + w2) < 1e-9) {
          coeff = g_k(beta, std::vector<double>{w1, w2});
        } else {
          coeff = gamma3(w1, w2);
        }
        direct -= coeff * (m.bd.op(i) * m.bd.op(j) * (*last));
      }
    }
    const Matrix d0 = m.bd.get_or_zero(0.0);
    Matrix m2_form = Matrix::Zero(4, 4);
    for (std::size_t i = 0; i < m.bd.size(); ++i) {
      m2_form += mu2(m.bd.frequency(i)) * (m.bd.op(i) * m.bd.get_or_zero(-m.bd.frequency(i)));
    }
    direct += 0.5 * beta * (m2_form * d0) + 0.5 * beta * (d0 * m2_form) -
              (1.0 / 3.0) * std::pow(beta, 3) * d0 * d0 * d0;
    CHECK(max_abs(cumulants[2] - direct) < 1e-10);
  }

  const std::vector<Matrix> zeros(3, Matrix::Zero(4, 4));
  for (const auto& c : cumulant_combine(zeros, 3)) CHECK(max_abs(c) == 0.0);
  CHECK_THROWS_AS(cumulant_combine(moments, 4), std::invalid_argument);
}

TEST_CASE("perturbative effective Hamiltonian") {
  ModelSpec spec;
  spec.family = ModelFamily::TwoTls;
  spec.omega_a = 1.0;
  spec.omega_b = 1.7;
  spec.g = complexd(0.6, 0.2);
  spec.lambda = 0.1;
  const BuiltModel built = build(spec);
  const SpectralDecomposition sd = spectral_decompose(built.h0);
  const BohrDecomposition bd = bohr_decompose(built.h_i, sd);
  const double beta = 1.2;

  const auto first = effective_hamiltonian_perturbative(sd, built.h_i, spec.lambda, beta, 1);
  CHECK(max_abs(first.terms[0] - built.h0.mat()) == 0.0);
  CHECK(max_abs(first.terms[1] - bd.get_or_zero(0.0)) < 1e-12);
  CHECK(max_abs(first.assembled() - (built.h0.mat() + spec.lambda * bd.get_or_zero(0.0))) <
        1e-12);

  auto zero_coupling = effective_hamiltonian_perturbative(sd, built.h_i, 0.0, beta, 2);
  CHECK(max_abs(zero_coupling.assembled() - built.h0.mat()) < 1e-13);

  const auto second = effective_hamiltonian_perturbative(sd, built.h_i, spec.lambda, beta, 2);
  CHECK(max_abs(second.terms[2] - second_order_term(bd, beta)) <= 1e-10);
  // Order-2 coefficient is negative semidefinite at positive temperature.
  const double top = eigh(HermitianOperator(second.terms[2], 1e-9)).eigenvalues.maxCoeff();
  CHECK(top <= 1e-10 * max_abs(second.terms[2]));

  CHECK_THROWS_AS(effective_hamiltonian_perturbative(sd, built.h_i, 0.1, beta, 5),
                  std::invalid_argument);
  PerturbativeOptions raised;
  raised.order_cap = 5;
  CHECK_NOTHROW(effective_hamiltonian_perturbative(sd, built.h_i, 0.1, beta, 3, raised));
  CHECK_THROWS_AS(effective_hamiltonian_perturbative(sd, built.h_i, 0.1, -1.0, 2),
                  std::invalid_argument);
}

TEST_CASE("remainder scales with the claimed order") {
  for (const bool resonant : {false, true}) {
    ModelSpec spec;
    spec.family = ModelFamily::TwoTls;
    spec.omega_a = 1.0;
    spec.omega_b = resonant ? 1.0 : 1.6180339887498949;
    spec.g = complexd(0.8, 0.6);
    spec.delta_omega = resonant ? 0.4 : 0.0;
    spec.resonant = resonant;
    const BuiltModel built = build(spec);
    const SpectralDecomposition sd = spectral_decompose(built.h0);
    const double beta = 1.2;
    for (const int order : {1, 2}) {
      std::vector<double> normalized;
      for (const double lambda : {0.1, 0.05, 0.025}) {
        const HermitianOperator h(built.h0.mat() + lambda * built.h_i);
        const Matrix exact = effective_hamiltonian_exact(h, sd, beta).mat();
        const auto pert =
            effective_hamiltonian_perturbative(sd, built.h_i, lambda, beta, order);
        normalized.push_back(max_abs(exact - pert.assembled()) /
                             std::pow(lambda, order + 1));
      }
      // O(lambda^{order+1}): the normalized remainder must not grow under
      // halving; it may shrink when parity kills the next coefficient.
      CHECK(normalized[1] < 2.0 * normalized[0]);
      CHECK(normalized[2] < 2.0 * normalized[1]);
    }
  }
}

TEST_CASE("second order is linear in beta where f is flat") {
  // The beta-linear law -(beta/2) sum D_w D_w^dag holds exactly where
  // f(beta w) sits at its f(0) = 1 plateau, i.e. for beta|w| << 1. (At
  // beta|w| >> 1 the negative-frequency coefficients grow like
  // e^{beta|w|}/(beta w^2), so no linear law can hold there.)
  ModelSpec spec;
  spec.family = ModelFamily::TwoTls;
  spec.omega_a = 1.0;
  spec.omega_b = 1.5;
  spec.g = complexd(1.0, 0.0);
  const BuiltModel built = build(spec);
  const SpectralDecomposition sd = spectral_decompose(built.h0);
  const BohrDecomposition bd = bohr_decompose(built.h_i, sd);
  const double beta = 3e-7;

  Matrix linear = Matrix::Zero(4, 4);
  for (std::size_t i = 0; i < bd.size(); ++i) {
    if (bd.frequency(i) == 0.0) continue;
    linear -= 0.5 * beta * (bd.op(i) * bd.op(i).adjoint());
  }
  CHECK(max_abs(second_order_term(bd, beta) - linear) <= 1e-6 * beta);
}

TEST_CASE("negative temperature flips the second-order sign") {
  // Computation-only support: at beta < 0 the correction turns nonnegative.
  const SmallModel m = random_small_model(505);
  const double min_eig =
      eigh(HermitianOperator(second_order_term(m.bd, -1.3), 1e-9)).eigenvalues.minCoeff();
  CHECK(min_eig >= -1e-12);
}

TEST_CASE("beta derivative of the second order") {
  const SmallModel m = random_small_model(404);
  const double beta = 1.6;
  const double h = 1e-4 * beta;
  const Matrix fd =
      (second_order_term(m.bd, beta + h) - second_order_term(m.bd, beta - h)) / (2.0 * h);
  CHECK(max_abs(fd - second_order_term_beta_derivative(m.bd, beta)) <= 1e-7);
  const double top =
      eigh(HermitianOperator(second_order_term_beta_derivative(m.bd, beta), 1e-9))
          .eigenvalues.maxCoeff();
  CHECK(top <= 1e-8);
}

// Perturbative engine for the effective Hamiltonian: scalar coefficient
// functions h_n and g_k, operator moments M_k(beta) via the eigenoperator
// formula and via nested quadrature, and the cumulant (logarithm-series)
// combination that yields H-tilde order by order.
#pragma once

#include "effgibbs/bohr.hpp"

#include <span>

namespace effgibbs {

// f(x) = 2 (x + e^{-x} - 1) / x^2, continued through x = 0 with f(0) = 1 by
// an 8-term Taylor series for |x| < 1e-3. Strictly positive on the real line.
double f(double x);

// f1(x) = 2 (1 - e^{-x}(1 + x)) / x^2, same continuation, also positive.
double f1(double x);

// Nested exponential integral
//   h_n(beta; w_1..w_n) = int_0^beta db_1 ... int_0^{b_{n-1}} db_n e^{-sum_j b_j w_j}
// by its closed form. When any contiguous partial sum of the frequencies is
// smaller than 1e-6 * max(1, max|w|) the closed form is a cancellation trap
// and evaluation falls back to adaptive nested quadrature of the integral.
double h_n(double beta, std::span<const double> omegas);

// Constrained variant entering the moment formula: the same nested integral
// with the innermost exponent flipped to +b_k (w_1 + ... + w_{k-1}); omegas
// holds the k-1 leading frequencies. g_1 = beta, g_2(beta; w) =
// (beta w + e^{-beta w} - 1) / w^2 with limit beta^2/2 at w = 0.
double g_k(double beta, std::span<const double> omegas);

// Quadrature companions (also the singular-limit fallback). Adaptive Simpson
// per nesting level, absolute tolerance around 1e-12 of the integrand scale.
double h_n_quadrature(double beta, std::span<const double> omegas);
double g_k_quadrature(double beta, std::span<const double> omegas);

// M_k(beta) = (-1)^k sum_{w_1..w_{k-1}} g_k(beta; w) D_{w_1}...D_{w_{k-1}} D_{-sum w};
// tuples whose completing frequency is not present contribute nothing.
Matrix moment_explicit(int k, double beta, const BohrDecomposition& bd);

// Direct evaluation of M_k as the nested integral of P H_I(b_1)...H_I(b_k)
// over the ordered simplex, by iterated composite Simpson with n_grid
// subintervals per level. Independent oracle for moment_explicit. k <= 4.
Matrix moment_quadrature(int k, double beta, const HermitianOperator& h0, const Matrix& h_i,
                         const SpectralDecomposition& sd, int n_grid);

// Logarithm-series coefficients C_1..C_n from the moments (moments[i] is
// M_{i+1}): C_n = sum_{k_0+...+k_m = n} ((-1)^m / (m+1)) M_{k_0}...M_{k_m}
// over all ordered compositions into positive parts.
std::vector<Matrix> cumulant_combine(std::span<const Matrix> moments, int order);

// Closed second-order term -(beta/2) sum_{w != 0} f(beta w) D_w D_w^dag and
// its beta derivative -(1/2) sum_{w != 0} f1(beta w) D_w D_w^dag.
Matrix second_order_term(const BohrDecomposition& bd, double beta);
Matrix second_order_term_beta_derivative(const BohrDecomposition& bd, double beta);

struct EffectiveHamiltonianExpansion {
  double beta = 0.0;
  double lambda = 0.0;
  int order = 0;
  std::vector<Matrix> terms;  // terms[k] multiplies lambda^k; terms[0] is the free part

  Matrix assembled() const;
};

struct PerturbativeOptions {
  // The explicit moment formula is exponential in the number of Bohr
  // frequencies; raise the cap knowingly.
  int order_cap = 4;
  // Cross-check the order-2 term against the closed f-form; catches sign or
  // convention drift between the two routes.
  bool cross_check_order2 = true;
  // Frequency clustering tolerance; negative means "inherit cluster_tol".
  double freq_tol = -1.0;
};

EffectiveHamiltonianExpansion effective_hamiltonian_perturbative(
    const HermitianOperator& h0, const Matrix& h_i, double lambda, double beta, int order,
    const PerturbativeOptions& opts = {});

// Same, reusing a prepared spectral decomposition of h0.
EffectiveHamiltonianExpansion effective_hamiltonian_perturbative(
    const SpectralDecomposition& sd, const Matrix& h_i, double lambda, double beta, int order,
    const PerturbativeOptions& opts = {});

}  // namespace effgibbs

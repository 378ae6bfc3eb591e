// Bipartite systems with subsystem B as reservoir: the mean force
// Hamiltonian of the effective (pinched) Gibbs state, exact via partial
// trace plus blockwise log and perturbative via reservoir-averaged moments,
// with the fully explicit subsystem-eigenoperator second order.
#pragma once

#include "effgibbs/cumulant.hpp"
#include "effgibbs/exact.hpp"
#include "effgibbs/thermo.hpp"

namespace effgibbs {

struct BipartiteModel {
  ProductSpace space;        // exactly two factors, A then B
  HermitianOperator h_a;
  HermitianOperator h_b;
  Matrix h_i;                // interaction on the product space
  double lambda = 0.0;
  double beta = 0.0;
  Matrix h0;                 // H_A (x) I + I (x) H_B
  double z_b = 0.0;          // Tr_B e^{-beta H_B}
  double log_z_b = 0.0;
};

BipartiteModel make_bipartite(const HermitianOperator& h_a, const HermitianOperator& h_b,
                              Matrix h_i, double lambda, double beta);

// H-mf-tilde = -(1/beta) log( Tr_B P(e^{-beta H}) / Z_B ); commutes with H_A.
HermitianOperator mean_force_exact(const BipartiteModel& m);

// Conventional mean force Hamiltonian (no pinching): -(1/beta) log(Tr_B e^{-beta H} / Z_B).
// Kept as a reference point for the effective variant.
HermitianOperator mean_force_standard(const BipartiteModel& m);

// Reservoir-averaged cumulant expansion: the full-space moments are computed
// once and averaged over B, then combined exactly as in the global case.
// The order-2 coefficient is cross-checked against the closed f-form.
EffectiveHamiltonianExpansion mean_force_perturbative(const BipartiteModel& m, int order);

// Eigenoperator splits of a product interaction H_I = A (x) B with respect
// to [H_A, .] and [H_B, .].
struct SubsystemBohr {
  BohrDecomposition a_terms;
  BohrDecomposition b_terms;
};

// Requires h_i to factor as kron(a_factor, b_factor); both factors Hermitian.
SubsystemBohr subsystem_bohr(const BipartiteModel& m, const Matrix& a_factor,
                             const Matrix& b_factor);

// Assembled explicit second-order mean force Hamiltonian
//   H_A + l <B_0>_B A_0
//   - l^2 (beta/2) [ sum_{w1 != 0} ( sum_nu f(beta(nu - w1)) <B_nu B_nu^dag>_B ) A_w1^dag A_w1
//                    + ( sum_nu f(beta nu) <B_nu B_nu^dag>_B - <B_0>_B^2 ) A_0^2 ]
// with f(0) = 1 by continuity. Equals mean_force_perturbative at order 2.
Matrix mean_force_explicit_order2(const SubsystemBohr& sb, const BipartiteModel& m);

// Thermal reservoir averages <X>_B = Tr(X rho_B) for operators on factor B,
// and the full-space reduction Tr_B( X (I (x) rho_B) ).
double reservoir_average(const Matrix& x_on_b, const BipartiteModel& m);
Matrix reservoir_reduce(const Matrix& x_full, const BipartiteModel& m);

}  // namespace effgibbs

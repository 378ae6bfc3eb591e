// Nonperturbative reference route: Gibbs states, the pinched (effective)
// Gibbs state, and the exact effective Hamiltonian via blockwise principal
// logarithm, with the Richter integral as an independent logarithm oracle.
#pragma once

#include "effgibbs/pinching.hpp"

namespace effgibbs {

// Overflow guard; inverse temperatures beyond this are rejected.
inline constexpr double kMaxAbsBeta = 1e4;

struct GibbsPair {
  double beta = 0.0;
  Matrix hamiltonian;
  Matrix rho;    // e^{-beta H} / Z
  double z = 0.0;
  double log_z = 0.0;  // reliable even when z itself under/overflows
};

// Spectral construction with a ground-energy shift before exponentiating.
// Negative beta is meaningful for finite systems but suppresses every
// positivity claim downstream; it must be opted into.
GibbsPair gibbs(const HermitianOperator& h, double beta, bool allow_negative_beta = false);

// rho_tilde = pinch(rho_beta). Shares the exact partition function: pinching
// preserves the trace of e^{-beta H}.
struct EffectiveGibbs {
  Matrix rho_tilde;
  double z = 0.0;
  double log_z = 0.0;
};
EffectiveGibbs effective_gibbs(const HermitianOperator& h, const SpectralDecomposition& sd,
                               double beta);

// H-tilde = -(1/beta) log P(e^{-beta H}), evaluated per spectral block of H0
// with the principal logarithm (each block is Hermitian positive definite).
// Satisfies e^{-beta H-tilde}/Z = rho_tilde and [H0, H-tilde] = 0.
HermitianOperator effective_hamiltonian_exact(const HermitianOperator& h,
                                              const SpectralDecomposition& sd, double beta);

// log M = int_0^1 (M - I)(t(M - I) + I)^{-1} dt by composite Simpson;
// independent of the spectral route. M must be positive definite and
// reasonably conditioned.
Matrix richter_log_oracle(const Matrix& m, int n_grid = 256);

}  // namespace effgibbs

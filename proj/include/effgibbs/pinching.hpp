// Spectral decomposition of the free Hamiltonian into distinct-eigenvalue
// projectors and the induced averaging (pinching) map P X = sum_e P_e X P_e,
// together with the finite-time average it is the limit of.
#pragma once

#include "effgibbs/operator_core.hpp"

namespace effgibbs {

struct SpectralLevel {
  double energy;     // cluster mean
  Matrix projector;  // orthogonal projector onto the cluster eigenspace
  Matrix basis;      // dim x multiplicity, orthonormal columns spanning it
};

class SpectralDecomposition {
public:
  SpectralDecomposition(std::vector<SpectralLevel> levels, Matrix h0, double cluster_tol);

  const std::vector<SpectralLevel>& levels() const { return levels_; }
  Eigen::Index n_levels() const { return static_cast<Eigen::Index>(levels_.size()); }
  Eigen::Index dim() const { return h0_.rows(); }
  double cluster_tol() const { return cluster_tol_; }
  const Matrix& h0() const { return h0_; }

private:
  std::vector<SpectralLevel> levels_;
  Matrix h0_;
  double cluster_tol_;
};

// 1e-9 * max(1, spectral radius): separates deliberate resonances from
// eigensolver noise.
double default_cluster_tol(const HermitianOperator& h0);

// Groups eigenvalues whose neighbours lie within cluster_tol of each other
// into one level; the level energy is the cluster mean. A cluster_tol larger
// than half the smallest intended gap silently merges levels; that cannot be
// detected here.
SpectralDecomposition spectral_decompose(const HermitianOperator& h0);
SpectralDecomposition spectral_decompose(const HermitianOperator& h0, double cluster_tol);

// sum_e P_e X P_e. Linear, trace preserving, unital, idempotent, completely
// positive, and commutes with conjugation by e^{-i H0 t}.
Matrix pinch(const Matrix& x, const SpectralDecomposition& sd);

// (1/T) int_0^T e^{i H0 t} X e^{-i H0 t} dt by composite Simpson. Converges
// to pinch(X) as T -> infinity, with O(1/T) error once all nonzero Bohr
// frequencies are resolved. n_steps is rounded up to an even count; the
// default of at least 40 nodes per fastest Bohr period keeps the quadrature
// error below the averaging remainder.
Matrix time_average(const Matrix& x, const HermitianOperator& h0, double t_final, int n_steps);

// Choi matrix sum_ij |i><j| (x) P(|i><j|) on the doubled space; positive
// semidefinite exactly when the map is completely positive.
Matrix choi_matrix(const SpectralDecomposition& sd);

struct PropertyCheck {
  std::string name;
  double deviation;
  double tolerance;
  bool pass;
};

// Randomized audit of the projector properties: trace preservation,
// idempotence, self-adjointness in the HS inner product, unitality,
// commutation with H0, and complete positivity via the Choi spectrum.
std::vector<PropertyCheck> projector_property_report(const SpectralDecomposition& sd,
                                                     int n_random_trials,
                                                     std::uint64_t seed);

}  // namespace effgibbs

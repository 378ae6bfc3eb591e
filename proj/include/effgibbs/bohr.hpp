// Decomposition of the interaction Hamiltonian into eigenoperators of the
// commutator superoperator [H0, .]: H_I = sum_w D_w with [H0, D_w] = -w D_w
// and D_{-w} = D_w^dag.
#pragma once

#include "effgibbs/pinching.hpp"

namespace effgibbs {

class BohrDecomposition {
public:
  BohrDecomposition(std::vector<double> frequencies, std::vector<Matrix> ops, double freq_tol);

  const std::vector<double>& frequencies() const { return freqs_; }
  std::size_t size() const { return freqs_.size(); }
  const Matrix& op(std::size_t i) const { return ops_[i]; }
  double frequency(std::size_t i) const { return freqs_[i]; }
  double freq_tol() const { return freq_tol_; }
  Eigen::Index dim() const { return ops_.empty() ? 0 : ops_.front().rows(); }

  // Lookup by frequency within freq_tol; nullptr when no such term is stored.
  const Matrix* find(double omega) const;
  Matrix get_or_zero(double omega) const;

  Matrix reconstruct() const;  // sum of all stored D_w

private:
  std::vector<double> freqs_;  // ascending
  std::vector<Matrix> ops_;
  double freq_tol_;
};

// D_w = sum_{e' - e = w} P_e H_I P_e'; pair differences are clustered at
// freq_tol and terms below 1e-13 * max|H_I| are dropped.
BohrDecomposition bohr_decompose(const Matrix& h_i, const SpectralDecomposition& sd);
BohrDecomposition bohr_decompose(const Matrix& h_i, const SpectralDecomposition& sd,
                                 double freq_tol);

// Max over w of |<D_w^dag D_w>_0 - e^{-beta w} <D_w D_w^dag>_0| where <.>_0
// is the free Gibbs average; identically zero in exact arithmetic.
double kms_check(const BohrDecomposition& bd, const HermitianOperator& h0, double beta);

}  // namespace effgibbs

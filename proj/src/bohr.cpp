#include "effgibbs/bohr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace effgibbs {

BohrDecomposition::BohrDecomposition(std::vector<double> frequencies, std::vector<Matrix> ops,
                                     double freq_tol)
    : freqs_(std::move(frequencies)), ops_(std::move(ops)), freq_tol_(freq_tol) {}

const Matrix* BohrDecomposition::find(double omega) const {
  for (std::size_t i = 0; i < freqs_.size(); ++i) {
    if (std::abs(freqs_[i] - omega) <= freq_tol_) return &ops_[i];
  }
  return nullptr;
}

Matrix BohrDecomposition::get_or_zero(double omega) const {
  const Matrix* d = find(omega);
  if (d != nullptr) return *d;
  return Matrix::Zero(dim(), dim());
}

Matrix BohrDecomposition::reconstruct() const {
  Matrix out = Matrix::Zero(dim(), dim());
  for (const auto& d : ops_) out += d;
  return out;
}

BohrDecomposition bohr_decompose(const Matrix& h_i, const SpectralDecomposition& sd) {
  return bohr_decompose(h_i, sd, sd.cluster_tol());
}

BohrDecomposition bohr_decompose(const Matrix& h_i, const SpectralDecomposition& sd,
                                 double freq_tol) {
  if (h_i.rows() != sd.dim() || h_i.cols() != sd.dim()) {
    throw std::invalid_argument("bohr_decompose: dimension mismatch");
  }
  if (freq_tol < 0.0) {
    throw std::invalid_argument("bohr_decompose: freq_tol must be nonnegative");
  }

  // Work blockwise in the concatenated level bases: the (i, j) block of
  // V^dag H_I V belongs to frequency E_j - E_i ([H0, P_i H_I P_j] =
  // -(E_j - E_i) P_i H_I P_j), so each D_w is one masked back-transform.
  const Eigen::Index d = sd.dim();
  Matrix v(d, d);
  std::vector<Eigen::Index> offset;
  {
    Eigen::Index col = 0;
    for (const auto& level : sd.levels()) {
      offset.push_back(col);
      v.middleCols(col, level.basis.cols()) = level.basis;
      col += level.basis.cols();
    }
  }
  const Matrix b = v.adjoint() * h_i * v;

  struct Pair {
    double omega;
    std::size_t from, to;
  };
  std::vector<Pair> pairs;
  const auto& levels = sd.levels();
  for (std::size_t i = 0; i < levels.size(); ++i) {
    for (std::size_t j = 0; j < levels.size(); ++j) {
      pairs.push_back({levels[j].energy - levels[i].energy, i, j});
    }
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const Pair& a, const Pair& b2) { return a.omega < b2.omega; });

  const double drop = 1e-13 * std::max(1e-300, max_abs(h_i));
  std::vector<double> freqs;
  std::vector<Matrix> ops;
  std::size_t start = 0;
  while (start < pairs.size()) {
    std::size_t stop = start + 1;
    while (stop < pairs.size() && pairs[stop].omega - pairs[stop - 1].omega <= freq_tol) {
      ++stop;
    }
    double mean = 0.0;
    Matrix masked = Matrix::Zero(d, d);
    for (std::size_t p = start; p < stop; ++p) {
      mean += pairs[p].omega;
      const auto& from = levels[pairs[p].from];
      const auto& to = levels[pairs[p].to];
      masked.block(offset[pairs[p].from], offset[pairs[p].to], from.basis.cols(),
                   to.basis.cols()) =
          b.block(offset[pairs[p].from], offset[pairs[p].to], from.basis.cols(),
                  to.basis.cols());
    }
    mean /= static_cast<double>(stop - start);
    Matrix d_op = v * masked * v.adjoint();
    if (max_abs(d_op) > drop) {
      // Exact zero for clusters straddling w = 0 keeps D_{-w} = D_w^dag pairing exact.
      freqs.push_back(std::abs(mean) <= freq_tol ? 0.0 : mean);
      ops.push_back(std::move(d_op));
    }
    start = stop;
  }
  return BohrDecomposition(std::move(freqs), std::move(ops), freq_tol);
}

double kms_check(const BohrDecomposition& bd, const HermitianOperator& h0, double beta) {
  if (beta <= 0.0) throw std::invalid_argument("kms_check: beta must be positive");
  const EighResult es = eigh(h0);
  const double w0 = es.eigenvalues.minCoeff();
  RealVector weights(es.eigenvalues.size());
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    weights[i] = std::exp(-beta * (es.eigenvalues[i] - w0));
  }
  const double z = weights.sum();
  const Matrix rho0 =
      es.eigenvectors * (weights / z).asDiagonal() * es.eigenvectors.adjoint();

  double worst = 0.0;
  for (std::size_t i = 0; i < bd.size(); ++i) {
    const Matrix& d = bd.op(i);
    const double lhs = ((d.adjoint() * d) * rho0).trace().real();
    const double rhs = std::exp(-beta * bd.frequency(i)) * ((d * d.adjoint()) * rho0).trace().real();
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

}  // namespace effgibbs

#include "effgibbs/exact.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace effgibbs {

GibbsPair gibbs(const HermitianOperator& h, double beta, bool allow_negative_beta) {
  if (beta == 0.0 || (!allow_negative_beta && beta < 0.0)) {
    throw std::invalid_argument(
        "gibbs: beta must be positive (negative temperatures need the explicit flag)");
  }
  if (std::abs(beta) > kMaxAbsBeta) {
    throw std::invalid_argument("gibbs: |beta| above the overflow guard of 1e4");
  }
  const EighResult es = eigh(h);
  // Shift by the extremal energy so the largest Boltzmann weight is exactly 1.
  const double pivot = beta > 0.0 ? es.eigenvalues.minCoeff() : es.eigenvalues.maxCoeff();
  RealVector weights(es.eigenvalues.size());
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    weights[i] = std::exp(-beta * (es.eigenvalues[i] - pivot));
  }
  const double shifted_z = weights.sum();

  GibbsPair out;
  out.beta = beta;
  out.hamiltonian = h.mat();
  out.rho = es.eigenvectors * (weights / shifted_z).asDiagonal() * es.eigenvectors.adjoint();
  out.log_z = -beta * pivot + std::log(shifted_z);
  out.z = std::exp(out.log_z);
  return out;
}

EffectiveGibbs effective_gibbs(const HermitianOperator& h, const SpectralDecomposition& sd,
                               double beta) {
  if (h.dim() != sd.dim()) throw std::invalid_argument("effective_gibbs: dimension mismatch");
  const GibbsPair gp = gibbs(h, beta);
  return {pinch(gp.rho, sd), gp.z, gp.log_z};
}

HermitianOperator effective_hamiltonian_exact(const HermitianOperator& h,
                                              const SpectralDecomposition& sd, double beta) {
  if (h.dim() != sd.dim()) {
    throw std::invalid_argument("effective_hamiltonian_exact: dimension mismatch");
  }
  if (beta <= 0.0) throw std::invalid_argument("effective_hamiltonian_exact: beta > 0 required");
  if (beta > kMaxAbsBeta) {
    throw std::invalid_argument("effective_hamiltonian_exact: beta above the 1e4 guard");
  }

  // e^{-beta H} = e^{-beta E0} e^{-beta (H - E0)}; the scalar factor re-enters
  // as the shift E0 * I after the log, so no ratio changes.
  const EighResult es = eigh(h);
  const double e0 = es.eigenvalues.minCoeff();
  RealVector weights(es.eigenvalues.size());
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    weights[i] = std::exp(-beta * (es.eigenvalues[i] - e0));
  }
  const Matrix shifted_exp =
      es.eigenvectors * weights.asDiagonal() * es.eigenvectors.adjoint();

  Matrix out = Matrix::Zero(h.dim(), h.dim());
  for (const auto& level : sd.levels()) {
    // Block of P(e^{-beta(H - E0)}) in the level's own basis.
    const Matrix block = level.basis.adjoint() * shifted_exp * level.basis;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (block + block.adjoint()));
    if (solver.info() != Eigen::Success) {
      throw numerical_error("effective_hamiltonian_exact: block eigensolver failed");
    }
    RealVector logs(solver.eigenvalues().size());
    for (Eigen::Index i = 0; i < logs.size(); ++i) {
      const double ev = solver.eigenvalues()[i];
      if (ev <= 0.0) {
        std::ostringstream msg;
        msg << "effective_hamiltonian_exact: nonpositive block eigenvalue " << ev
            << " at level energy " << level.energy << "; input is not a valid Hamiltonian pair";
        throw numerical_error(msg.str());
      }
      logs[i] = std::log(ev);
    }
    const Matrix block_log =
        solver.eigenvectors() * logs.asDiagonal() * solver.eigenvectors().adjoint();
    out += level.basis * block_log * level.basis.adjoint();
  }
  out *= -1.0 / beta;
  out += e0 * identity(h.dim());
  return HermitianOperator(std::move(out), 1e-10);
}

Matrix richter_log_oracle(const Matrix& m, int n_grid) {
  if (m.rows() != m.cols()) throw std::invalid_argument("richter_log_oracle: square input");
  if (n_grid < 4) throw std::invalid_argument("richter_log_oracle: n_grid too small");
  if (n_grid % 2 != 0) ++n_grid;

  const Eigen::Index d = m.rows();
  const Matrix shifted = m - identity(d);
  const double h = 1.0 / n_grid;

  Matrix acc = Matrix::Zero(d, d);
  for (int node = 0; node <= n_grid; ++node) {
    const double t = h * node;
    const double w = (node == 0 || node == n_grid) ? 1.0 : (node % 2 == 1 ? 4.0 : 2.0);
    Matrix resolvent = t * shifted + identity(d);
    Eigen::FullPivLU<Matrix> lu(resolvent);
    if (!lu.isInvertible()) {
      throw numerical_error("richter_log_oracle: singular t(M - I) + I; M is not PD");
    }
    acc += w * (shifted * lu.inverse());
  }
  return (h / 3.0) * acc;
}

}  // namespace effgibbs

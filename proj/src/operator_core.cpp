#include "effgibbs/operator_core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <sstream>

namespace effgibbs {

double max_abs(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

Matrix identity(Eigen::Index dim) { return Matrix::Identity(dim, dim); }

HermitianOperator::HermitianOperator(Matrix entries, double herm_tol)
    : herm_tol_(herm_tol) {
  if (entries.rows() < 1 || entries.rows() != entries.cols()) {
    throw std::invalid_argument("HermitianOperator: matrix must be square with dim >= 1");
  }
  if (herm_tol < 0.0) {
    throw std::invalid_argument("HermitianOperator: herm_tol must be nonnegative");
  }
  const double scale = std::max(1.0, max_abs(entries));
  const double dev = max_abs(entries - entries.adjoint().eval());
  if (dev > herm_tol * scale) {
    std::ostringstream msg;
    msg << "HermitianOperator: max|A - A^dag| = " << dev << " exceeds " << herm_tol
        << " * max(1, max|A|) = " << herm_tol * scale << " for dim " << entries.rows();
    throw std::invalid_argument(msg.str());
  }
  mat_ = 0.5 * (entries + entries.adjoint().eval());
}

ProductSpace::ProductSpace(std::vector<Eigen::Index> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw std::invalid_argument("ProductSpace: need at least one factor");
  total_dim_ = 1;
  for (const auto d : dims_) {
    if (d < 1) throw std::invalid_argument("ProductSpace: factor dims must be >= 1");
    total_dim_ *= d;
  }
}

Eigen::Index ProductSpace::dim(Eigen::Index slot) const {
  if (slot < 0 || slot >= n_factors()) {
    throw std::invalid_argument("ProductSpace: slot out of range");
  }
  return dims_[static_cast<std::size_t>(slot)];
}

EighResult eigh(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.mat());
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigh: eigensolver failed to converge (dim " << a.dim()
        << ", max|A| = " << max_abs(a.mat()) << ")";
    throw numerical_error(msg.str());
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

HermitianOperator herm_func(const HermitianOperator& a,
                            const std::function<double(double)>& f) {
  const EighResult es = eigh(a);
  RealVector fw(es.eigenvalues.size());
  for (Eigen::Index i = 0; i < fw.size(); ++i) fw[i] = f(es.eigenvalues[i]);
  Matrix out = es.eigenvectors * fw.asDiagonal() * es.eigenvectors.adjoint();
  return HermitianOperator(std::move(out), 1e-11);
}

HermitianOperator herm_exp(const HermitianOperator& a) {
  return herm_func(a, [](double x) { return std::exp(x); });
}

HermitianOperator herm_log(const HermitianOperator& a) {
  const EighResult es = eigh(a);
  for (Eigen::Index i = 0; i < es.eigenvalues.size(); ++i) {
    if (es.eigenvalues[i] <= 0.0) {
      std::ostringstream msg;
      msg << "herm_log: nonpositive eigenvalue " << es.eigenvalues[i]
          << " (index " << i << " of " << a.dim() << ")";
      throw numerical_error(msg.str());
    }
  }
  RealVector lw(es.eigenvalues.size());
  for (Eigen::Index i = 0; i < lw.size(); ++i) lw[i] = std::log(es.eigenvalues[i]);
  Matrix out = es.eigenvectors * lw.asDiagonal() * es.eigenvectors.adjoint();
  return HermitianOperator(std::move(out), 1e-11);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix embed(const Matrix& a, const ProductSpace& space, Eigen::Index slot) {
  if (a.rows() != space.dim(slot)) {
    throw std::invalid_argument("embed: operator dim does not match the slot dim");
  }
  Matrix out = Matrix::Identity(1, 1);
  for (Eigen::Index s = 0; s < space.n_factors(); ++s) {
    out = (s == slot) ? kron(out, a) : kron(out, identity(space.dim(s)).eval());
  }
  return out;
}

Matrix partial_trace(const Matrix& x, const ProductSpace& space, Eigen::Index traced_slot) {
  if (x.rows() != space.total_dim() || x.cols() != space.total_dim()) {
    throw std::invalid_argument("partial_trace: matrix dim does not match the space");
  }
  const Eigen::Index dt = space.dim(traced_slot);
  // Strides of the traced factor and of the factors left/right of it.
  Eigen::Index right = 1;
  for (Eigen::Index s = traced_slot + 1; s < space.n_factors(); ++s) right *= space.dim(s);
  Eigen::Index left = space.total_dim() / (dt * right);

  const Eigen::Index out_dim = left * right;
  Matrix out = Matrix::Zero(out_dim, out_dim);
  for (Eigen::Index la = 0; la < left; ++la) {
    for (Eigen::Index ra = 0; ra < right; ++ra) {
      for (Eigen::Index lb = 0; lb < left; ++lb) {
        for (Eigen::Index rb = 0; rb < right; ++rb) {
          complexd acc = 0.0;
          for (Eigen::Index t = 0; t < dt; ++t) {
            acc += x((la * dt + t) * right + ra, (lb * dt + t) * right + rb);
          }
          out(la * right + ra, lb * right + rb) = acc;
        }
      }
    }
  }
  return out;
}

complexd hs_inner(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw std::invalid_argument("hs_inner: dimension mismatch");
  }
  return (x.adjoint() * y).trace();
}

double Rng::uniform() {
  // 53 uniform bits; exact double in [0, 1).
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

Matrix random_matrix(Eigen::Index dim, Rng& rng) {
  Matrix g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      g(i, j) = complexd(rng.normal(), rng.normal());
    }
  }
  return g;
}

Matrix random_density_matrix(Eigen::Index dim, Rng& rng) {
  const Matrix g = random_matrix(dim, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

HermitianOperator random_hermitian(Eigen::Index dim, std::uint64_t seed) {
  Rng rng(seed);
  const Matrix g = random_matrix(dim, rng);
  return HermitianOperator(0.5 * (g + g.adjoint().eval()));
}

}  // namespace effgibbs

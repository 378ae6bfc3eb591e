// Dense complex-matrix substrate: Hermitian operators, tensor algebra,
// spectral matrix functions and reproducible random inputs.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace effgibbs {

using complexd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

// Failure of a numerical routine (eigensolver breakdown, positivity loss, ...).
// Distinct from std::invalid_argument, which signals caller misuse.
class numerical_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Max-norm max_ij |a_ij|.
double max_abs(const Matrix& a);

Matrix identity(Eigen::Index dim);

// Square complex matrix certified Hermitian at construction. Inputs within
// herm_tol (relative to max(1, max|A|)) are symmetrized to (A + A^dag)/2 so
// Hermiticity cannot drift through repeated products; anything worse is
// rejected. Immutable after construction.
class HermitianOperator {
public:
  explicit HermitianOperator(Matrix entries, double herm_tol = 1e-12);

  const Matrix& mat() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }
  double herm_tol() const { return herm_tol_; }

private:
  Matrix mat_;
  double herm_tol_;
};

// Ordered tensor factorization of a Hilbert space, row-major index layout:
// global index i = (...((i_0 d_1 + i_1) d_2 + i_2)...), matching kron().
class ProductSpace {
public:
  explicit ProductSpace(std::vector<Eigen::Index> dims);

  const std::vector<Eigen::Index>& dims() const { return dims_; }
  Eigen::Index n_factors() const { return static_cast<Eigen::Index>(dims_.size()); }
  Eigen::Index total_dim() const { return total_dim_; }
  Eigen::Index dim(Eigen::Index slot) const;

private:
  std::vector<Eigen::Index> dims_;
  Eigen::Index total_dim_;
};

struct EighResult {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // unitary, columns match eigenvalues
};

// A = V diag(w) V^dag with ascending w. Throws numerical_error (with matrix
// norm and dimension in the message) if the solver does not converge.
EighResult eigh(const HermitianOperator& a);

// V diag(f(w)) V^dag. The scalar function receives the eigenvalues only, so
// the result is Hermitian by construction.
HermitianOperator herm_func(const HermitianOperator& a,
                            const std::function<double(double)>& f);

HermitianOperator herm_exp(const HermitianOperator& a);

// Principal logarithm; requires all eigenvalues > 0 and names the offending
// eigenvalue otherwise.
HermitianOperator herm_log(const HermitianOperator& a);

Matrix kron(const Matrix& a, const Matrix& b);

// Places a on the given factor with identities on every other slot.
Matrix embed(const Matrix& a, const ProductSpace& space, Eigen::Index slot);

// Trace over one factor; the result lives on the remaining factors in their
// original order. Linear and trace preserving.
Matrix partial_trace(const Matrix& x, const ProductSpace& space, Eigen::Index traced_slot);

// Hilbert-Schmidt inner product Tr X^dag Y.
complexd hs_inner(const Matrix& x, const Matrix& y);

// Deterministic random source. mt19937_64 plus explicit Box-Muller keeps the
// stream identical across standard libraries (std::normal_distribution is
// implementation-defined).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform();  // [0, 1)
  double normal();

private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

Matrix random_matrix(Eigen::Index dim, Rng& rng);
Matrix random_density_matrix(Eigen::Index dim, Rng& rng);

// (G + G^dag)/2 for Gaussian G; same seed gives the identical matrix.
HermitianOperator random_hermitian(Eigen::Index dim, std::uint64_t seed);

}  // namespace effgibbs

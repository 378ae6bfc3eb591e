#include "effgibbs/cumulant.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace effgibbs {

namespace {

// 8-term Taylor tails; branch point matched to the closed forms at |x| = 1e-3.
constexpr double kSeriesCut = 1e-3;

double f_series(double x) {
  // 2 sum_{m=0..7} (-x)^m / (m+2)!
  double sum = 0.0, pow = 1.0, fact = 2.0;
  for (int m = 0; m < 8; ++m) {
    sum += pow / fact;
    pow *= -x;
    fact *= static_cast<double>(m + 3);
  }
  return 2.0 * sum;
}

double f1_series(double x) {
  // 2 sum_{j=2..9} (-1)^j (j-1)/j! x^{j-2}
  double sum = 0.0, pow = 1.0, fact = 2.0;
  for (int j = 2; j <= 9; ++j) {
    sum += pow * static_cast<double>(j - 1) / fact;
    pow *= -x;
    fact *= static_cast<double>(j + 1);
  }
  return 2.0 * sum;
}

// (1 - e^{-x})/x continued through 0.
double psi(double x) {
  if (std::abs(x) >= kSeriesCut) return (1.0 - std::exp(-x)) / x;
  double sum = 0.0, pow = 1.0, fact = 1.0;
  for (int m = 0; m < 8; ++m) {
    sum += pow / fact;
    pow *= -x;
    fact *= static_cast<double>(m + 2);
  }
  return sum;
}

double singular_threshold(std::span<const double> omegas) {
  double peak = 0.0;
  for (const double w : omegas) peak = std::max(peak, std::abs(w));
  return 1e-6 * std::max(1.0, peak);
}

// Any contiguous segment sum of the frequencies appears as a denominator in
// the closed forms; near-zero segments trigger the quadrature fallback.
bool has_small_segment_sum(std::span<const double> omegas, double tau) {
  const std::size_t n = omegas.size();
  for (std::size_t a = 0; a < n; ++a) {
    double s = 0.0;
    for (std::size_t b = a; b < n; ++b) {
      s += omegas[b];
      if (std::abs(s) < tau) return true;
    }
  }
  return false;
}

// Closed-form evaluation tracking the largest accumulated term; the ratio
// peak/|value| measures how much cancellation the alternating sum suffered.
struct ClosedEval {
  double value;
  double peak;
};

// Cancellation beyond this loses more than ~1e-10 of relative precision and
// the quadrature route takes over. Frequencies just above the segment-sum
// threshold land here.
constexpr double kCancellationCap = 1e6;

// Closed form of the unconstrained nested integral (all segments nonzero).
ClosedEval h_closed(double beta, std::span<const double> w) {
  const std::size_t n = w.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + w[i];
  auto seg = [&prefix](std::size_t a, std::size_t b) {  // w_a + ... + w_b, 1-based
    return prefix[b] - prefix[a - 1];
  };

  double term0 = 1.0;
  for (std::size_t q = 1; q <= n; ++q) term0 /= seg(1, q);

  double value = term0;
  double peak = std::abs(term0);
  double sign = -1.0;
  for (std::size_t p = 1; p <= n; ++p, sign = -sign) {
    double denom = 1.0;
    for (std::size_t m = 1; m <= p; ++m) denom *= seg(m, p);
    for (std::size_t q = p + 1; q <= n; ++q) denom *= seg(p + 1, q);
    const double term = sign * std::exp(-beta * seg(1, p)) / denom;
    value += term;
    peak = std::max(peak, std::abs(term));
  }
  return {value, peak};
}

// Closed form of the constrained integral (innermost exponent flipped).
ClosedEval g_closed(double beta, std::span<const double> w) {
  const std::size_t kk = w.size();  // k - 1 frequencies
  std::vector<double> prefix(kk + 1, 0.0);
  for (std::size_t i = 0; i < kk; ++i) prefix[i + 1] = prefix[i] + w[i];
  auto seg = [&prefix](std::size_t a, std::size_t b) { return prefix[b] - prefix[a - 1]; };

  double lead = beta;
  double prod = 1.0;
  for (std::size_t q = 1; q <= kk; ++q) {
    lead -= 1.0 / seg(1, q);
    prod *= seg(1, q);
  }
  double value = lead / prod;
  double peak = std::abs(value);

  double sign = -1.0;
  for (std::size_t p = 1; p <= kk; ++p, sign = -sign) {
    double denom = seg(1, p) * seg(1, p);
    for (std::size_t m = 2; m <= p; ++m) denom *= seg(m, p);
    for (std::size_t q = p + 1; q <= kk; ++q) denom *= seg(p + 1, q);
    const double term = -sign * std::exp(-beta * seg(1, p)) / denom;
    value += term;
    peak = std::max(peak, std::abs(term));
  }
  return {value, peak};
}

double adaptive_step(const std::function<double(double)>& fn, double a, double m, double b,
                     double fa, double fm, double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = fn(lm);
  const double frm = fn(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_step(fn, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_step(fn, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& fn, double a, double b) {
  if (b <= a) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = fn(a), fm = fn(m), fb = fn(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double tol = 1e-12 * std::max(1e-3, std::abs(whole));
  return adaptive_step(fn, a, m, b, fa, fm, fb, whole, tol, 28);
}

// Recursive levels of the unconstrained integral.
double h_quad_level(double beta, std::span<const double> w, std::size_t level) {
  const double omega = w[level];
  if (level + 1 == w.size()) {
    return adaptive_simpson([omega](double s) { return std::exp(-omega * s); }, 0.0, beta);
  }
  return adaptive_simpson(
      [omega, w, level](double s) { return std::exp(-omega * s) * h_quad_level(s, w, level + 1); },
      0.0, beta);
}

// Constrained integral: the innermost variable integrates analytically to
// (e^{S b} - 1)/S with S the sum of the outer frequencies.
double g_quad_level(double beta, std::span<const double> w, std::size_t level, double total) {
  if (level == w.size()) {
    if (std::abs(total) * beta < 1e-8) return beta * (1.0 + 0.5 * total * beta);
    return std::expm1(total * beta) / total;
  }
  const double omega = w[level];
  return adaptive_simpson(
      [omega, w, level, total](double s) {
        return std::exp(-omega * s) * g_quad_level(s, w, level + 1, total);
      },
      0.0, beta);
}

}  // namespace

double f(double x) {
  if (std::abs(x) < kSeriesCut) return f_series(x);
  return 2.0 * (x + std::exp(-x) - 1.0) / (x * x);
}

double f1(double x) {
  if (std::abs(x) < kSeriesCut) return f1_series(x);
  return 2.0 * (1.0 - std::exp(-x) * (1.0 + x)) / (x * x);
}

double h_n_quadrature(double beta, std::span<const double> omegas) {
  if (omegas.empty()) throw std::invalid_argument("h_n: need n >= 1 frequencies");
  if (beta == 0.0) return 0.0;
  return h_quad_level(beta, omegas, 0);
}

double g_k_quadrature(double beta, std::span<const double> omegas) {
  if (beta == 0.0) return 0.0;
  double total = 0.0;
  for (const double w : omegas) total += w;
  return g_quad_level(beta, omegas, 0, total);
}

double h_n(double beta, std::span<const double> omegas) {
  if (omegas.empty()) throw std::invalid_argument("h_n: need n >= 1 frequencies");
  if (beta == 0.0) return 0.0;
  if (omegas.size() == 1) return beta * psi(beta * omegas[0]);
  if (has_small_segment_sum(omegas, singular_threshold(omegas))) {
    return h_n_quadrature(beta, omegas);
  }
  const ClosedEval closed = h_closed(beta, omegas);
  if (closed.peak > kCancellationCap * std::max(std::abs(closed.value), 1e-300)) {
    return h_n_quadrature(beta, omegas);
  }
  return closed.value;
}

double g_k(double beta, std::span<const double> omegas) {
  if (beta == 0.0) return 0.0;
  if (omegas.empty()) return beta;                                      // g_1
  if (omegas.size() == 1) return 0.5 * beta * beta * f(beta * omegas[0]);  // g_2
  if (has_small_segment_sum(omegas, singular_threshold(omegas))) {
    return g_k_quadrature(beta, omegas);
  }
  const ClosedEval closed = g_closed(beta, omegas);
  if (closed.peak > kCancellationCap * std::max(std::abs(closed.value), 1e-300)) {
    return g_k_quadrature(beta, omegas);
  }
  return closed.value;
}

Matrix moment_explicit(int k, double beta, const BohrDecomposition& bd) {
  if (k < 1) throw std::invalid_argument("moment_explicit: k must be >= 1");
  const Eigen::Index d = bd.dim();
  Matrix out = Matrix::Zero(d, d);
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;

  std::vector<double> tuple(static_cast<std::size_t>(k - 1));
  // Depth-first over ordered (k-1)-tuples of stored frequencies, carrying the
  // operator prefix product; fixed iteration order keeps results reproducible.
  std::function<void(std::size_t, double, const Matrix&)> descend =
      [&](std::size_t pos, double partial_sum, const Matrix& prefix) {
        if (pos == tuple.size()) {
          const Matrix* last = bd.find(-partial_sum);
          if (last == nullptr) return;
          out += sign * g_k(beta, tuple) * (prefix * (*last));
          return;
        }
        for (std::size_t i = 0; i < bd.size(); ++i) {
          tuple[pos] = bd.frequency(i);
          descend(pos + 1, partial_sum + bd.frequency(i), (prefix * bd.op(i)).eval());
        }
      };
  descend(0, 0.0, identity(d));
  return out;
}

Matrix moment_quadrature(int k, double beta, const HermitianOperator& h0, const Matrix& h_i,
                         const SpectralDecomposition& sd, int n_grid) {
  if (k < 1) throw std::invalid_argument("moment_quadrature: k must be >= 1");
  if (k > 4) {
    std::ostringstream msg;
    msg << "moment_quadrature: k = " << k
        << " refused; the nested grid cost grows as (n_grid+1)^k, cap is 4";
    throw std::invalid_argument(msg.str());
  }
  if (n_grid < 8) throw std::invalid_argument("moment_quadrature: n_grid must be >= 8");
  if (h_i.rows() != sd.dim()) throw std::invalid_argument("moment_quadrature: dim mismatch");
  if (n_grid % 2 != 0) ++n_grid;
  (void)h0;

  // Work in the cluster eigenbasis: H_I(s) is an elementwise exponential
  // twist of B, and the pinching keeps exactly the diagonal blocks.
  const Eigen::Index d = sd.dim();
  Matrix v(d, d);
  RealVector energy(d);
  std::vector<int> cluster(static_cast<std::size_t>(d));
  {
    Eigen::Index col = 0;
    int idx = 0;
    for (const auto& level : sd.levels()) {
      const Eigen::Index mult = level.basis.cols();
      v.middleCols(col, mult) = level.basis;
      for (Eigen::Index j = 0; j < mult; ++j) {
        energy[col + j] = level.energy;
        cluster[static_cast<std::size_t>(col + j)] = idx;
      }
      col += mult;
      ++idx;
    }
  }
  const Matrix b = v.adjoint() * h_i * v;

  auto h_int = [&](double s) {
    Matrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        m(i, j) = b(i, j) * std::exp(s * (energy[i] - energy[j]));
      }
    }
    return m;
  };

  // rec(depth, upper) = int_0^upper ds H_I(s) rec(depth-1, s), rec(0) = I.
  std::function<Matrix(int, double)> rec = [&](int depth, double upper) -> Matrix {
    if (depth == 0) return identity(d);
    const double h = upper / n_grid;
    Matrix acc = Matrix::Zero(d, d);
    for (int node = 0; node <= n_grid; ++node) {
      const double s = h * node;
      const double w = (node == 0 || node == n_grid) ? 1.0 : (node % 2 == 1 ? 4.0 : 2.0);
      acc += w * (h_int(s) * rec(depth - 1, s));
    }
    return (h / 3.0) * acc;
  };

  Matrix integral = rec(k, beta);
  // Pinch: zero every entry linking different clusters.
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (cluster[static_cast<std::size_t>(i)] != cluster[static_cast<std::size_t>(j)]) {
        integral(i, j) = 0.0;
      }
    }
  }
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return sign * (v * integral * v.adjoint());
}

std::vector<Matrix> cumulant_combine(std::span<const Matrix> moments, int order) {
  if (order < 0) throw std::invalid_argument("cumulant_combine: order must be >= 0");
  if (static_cast<int>(moments.size()) < order) {
    throw std::invalid_argument("cumulant_combine: order exceeds available moments");
  }
  if (order == 0) return {};
  const Eigen::Index d = moments.empty() ? 0 : moments[0].rows();

  std::vector<Matrix> cumulants;
  cumulants.reserve(static_cast<std::size_t>(order));
  for (int n = 1; n <= order; ++n) {
    Matrix c = Matrix::Zero(d, d);
    // Ordered compositions of n into positive parts; m + 1 = number of parts.
    std::function<void(int, int, const Matrix&)> descend = [&](int remaining, int parts,
                                                               const Matrix& prod) {
      if (remaining == 0) {
        // (m + 1) parts carry weight (-1)^m / (m + 1).
        const double coeff = (parts % 2 == 1 ? 1.0 : -1.0) / static_cast<double>(parts);
        c += coeff * prod;
        return;
      }
      for (int part = 1; part <= remaining; ++part) {
        descend(remaining - part, parts + 1,
                (prod * moments[static_cast<std::size_t>(part - 1)]).eval());
      }
    };
    descend(n, 0, identity(d));
    cumulants.push_back(std::move(c));
  }
  return cumulants;
}

Matrix second_order_term(const BohrDecomposition& bd, double beta) {
  const Eigen::Index d = bd.dim();
  Matrix out = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < bd.size(); ++i) {
    const double w = bd.frequency(i);
    if (w == 0.0) continue;
    out -= 0.5 * beta * f(beta * w) * (bd.op(i) * bd.op(i).adjoint());
  }
  return out;
}

Matrix second_order_term_beta_derivative(const BohrDecomposition& bd, double beta) {
  const Eigen::Index d = bd.dim();
  Matrix out = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < bd.size(); ++i) {
    const double w = bd.frequency(i);
    if (w == 0.0) continue;
    out -= 0.5 * f1(beta * w) * (bd.op(i) * bd.op(i).adjoint());
  }
  return out;
}

Matrix EffectiveHamiltonianExpansion::assembled() const {
  Matrix out = terms.empty() ? Matrix() : Matrix::Zero(terms[0].rows(), terms[0].cols());
  double pow = 1.0;
  for (const auto& term : terms) {
    out += pow * term;
    pow *= lambda;
  }
  return out;
}

EffectiveHamiltonianExpansion effective_hamiltonian_perturbative(
    const HermitianOperator& h0, const Matrix& h_i, double lambda, double beta, int order,
    const PerturbativeOptions& opts) {
  return effective_hamiltonian_perturbative(spectral_decompose(h0), h_i, lambda, beta, order,
                                            opts);
}

EffectiveHamiltonianExpansion effective_hamiltonian_perturbative(
    const SpectralDecomposition& sd, const Matrix& h_i, double lambda, double beta, int order,
    const PerturbativeOptions& opts) {
  if (beta <= 0.0) throw std::invalid_argument("effective_hamiltonian_perturbative: beta > 0");
  if (order < 0) throw std::invalid_argument("effective_hamiltonian_perturbative: order >= 0");
  if (order > opts.order_cap) {
    std::ostringstream msg;
    msg << "effective_hamiltonian_perturbative: order " << order << " above cap "
        << opts.order_cap << " (raise PerturbativeOptions::order_cap knowingly)";
    throw std::invalid_argument(msg.str());
  }

  const BohrDecomposition bd =
      bohr_decompose(h_i, sd, opts.freq_tol < 0.0 ? sd.cluster_tol() : opts.freq_tol);

  EffectiveHamiltonianExpansion exp;
  exp.beta = beta;
  exp.lambda = lambda;
  exp.order = order;
  exp.terms.push_back(sd.h0());

  if (order >= 1) {
    std::vector<Matrix> moments;
    for (int k = 1; k <= order; ++k) moments.push_back(moment_explicit(k, beta, bd));
    const std::vector<Matrix> cumulants = cumulant_combine(moments, order);
    for (int n = 1; n <= order; ++n) {
      // Certify Hermiticity of each coefficient, then store symmetrized.
      exp.terms.push_back(
          HermitianOperator((-1.0 / beta) * cumulants[static_cast<std::size_t>(n - 1)], 1e-9)
              .mat());
    }
  }

  if (order >= 2 && opts.cross_check_order2) {
    const Matrix closed = second_order_term(bd, beta);
    const double dev = max_abs(exp.terms[2] - closed);
    if (dev > 1e-10 * std::max(1.0, max_abs(closed))) {
      std::ostringstream msg;
      msg << "effective_hamiltonian_perturbative: order-2 term deviates from the closed "
             "f-form by "
          << dev << "; moment/cumulant conventions have drifted";
      throw numerical_error(msg.str());
    }
  }
  return exp;
}

}  // namespace effgibbs

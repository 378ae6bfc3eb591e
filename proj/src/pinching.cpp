#include "effgibbs/pinching.hpp"

#include <cmath>

namespace effgibbs {

SpectralDecomposition::SpectralDecomposition(std::vector<SpectralLevel> levels, Matrix h0,
                                             double cluster_tol)
    : levels_(std::move(levels)), h0_(std::move(h0)), cluster_tol_(cluster_tol) {}

double default_cluster_tol(const HermitianOperator& h0) {
  const EighResult es = eigh(h0);
  const double radius = std::max(std::abs(es.eigenvalues[0]),
                                 std::abs(es.eigenvalues[es.eigenvalues.size() - 1]));
  return 1e-9 * std::max(1.0, radius);
}

SpectralDecomposition spectral_decompose(const HermitianOperator& h0) {
  return spectral_decompose(h0, default_cluster_tol(h0));
}

SpectralDecomposition spectral_decompose(const HermitianOperator& h0, double cluster_tol) {
  if (cluster_tol < 0.0) {
    throw std::invalid_argument("spectral_decompose: cluster_tol must be nonnegative");
  }
  const EighResult es = eigh(h0);
  const Eigen::Index n = es.eigenvalues.size();

  std::vector<SpectralLevel> levels;
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index stop = start + 1;
    while (stop < n && es.eigenvalues[stop] - es.eigenvalues[stop - 1] <= cluster_tol) ++stop;
    const Eigen::Index mult = stop - start;

    SpectralLevel level;
    level.energy = es.eigenvalues.segment(start, mult).mean();
    level.basis = es.eigenvectors.middleCols(start, mult);
    level.projector = level.basis * level.basis.adjoint();
    levels.push_back(std::move(level));
    start = stop;
  }
  return SpectralDecomposition(std::move(levels), h0.mat(), cluster_tol);
}

Matrix pinch(const Matrix& x, const SpectralDecomposition& sd) {
  if (x.rows() != sd.dim() || x.cols() != sd.dim()) {
    throw std::invalid_argument("pinch: dimension mismatch");
  }
  // Basis-block form of sum_e P_e X P_e: O(dim^3) in total even when the
  // spectrum splits into many levels.
  Matrix out = Matrix::Zero(sd.dim(), sd.dim());
  for (const auto& level : sd.levels()) {
    const Matrix block = level.basis.adjoint() * x * level.basis;
    out.noalias() += level.basis * block * level.basis.adjoint();
  }
  return out;
}

Matrix time_average(const Matrix& x, const HermitianOperator& h0, double t_final, int n_steps) {
  if (x.rows() != h0.dim() || x.cols() != h0.dim()) {
    throw std::invalid_argument("time_average: dimension mismatch");
  }
  if (t_final <= 0.0) throw std::invalid_argument("time_average: T must be positive");
  if (n_steps < 2) throw std::invalid_argument("time_average: n_steps must be >= 2");
  if (n_steps % 2 != 0) ++n_steps;

  // In the H0 eigenbasis the integrand is an elementwise phase twist of X,
  // so each Simpson node costs O(dim^2).
  const EighResult es = eigh(h0);
  const Matrix xt = es.eigenvectors.adjoint() * x * es.eigenvectors;
  const Eigen::Index d = h0.dim();
  const double h = t_final / n_steps;

  Matrix acc = Matrix::Zero(d, d);
  for (int node = 0; node <= n_steps; ++node) {
    const double t = h * node;
    const double w = (node == 0 || node == n_steps) ? 1.0 : (node % 2 == 1 ? 4.0 : 2.0);
    Matrix term(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        const double phase = (es.eigenvalues[i] - es.eigenvalues[j]) * t;
        term(i, j) = xt(i, j) * complexd(std::cos(phase), std::sin(phase));
      }
    }
    acc += w * term;
  }
  acc *= h / (3.0 * t_final);
  return es.eigenvectors * acc * es.eigenvectors.adjoint();
}

Matrix choi_matrix(const SpectralDecomposition& sd) {
  const Eigen::Index d = sd.dim();
  Matrix choi = Matrix::Zero(d * d, d * d);
  // P(|i><j|)_{kl} = sum_e (P_e)_{ki} (P_e)_{jl}
  for (const auto& level : sd.levels()) {
    const Matrix& p = level.projector;
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index k = 0; k < d; ++k) {
          for (Eigen::Index l = 0; l < d; ++l) {
            choi(i * d + k, j * d + l) += p(k, i) * p(j, l);
          }
        }
      }
    }
  }
  return choi;
}

std::vector<PropertyCheck> projector_property_report(const SpectralDecomposition& sd,
                                                     int n_random_trials,
                                                     std::uint64_t seed) {
  constexpr double kTol = 1e-10;
  Rng rng(seed);
  const Eigen::Index d = sd.dim();
  const HermitianOperator h0(sd.h0());

  double dev_trace = 0.0, dev_idem = 0.0, dev_selfadj = 0.0, dev_commute = 0.0;
  for (int trial = 0; trial < n_random_trials; ++trial) {
    const Matrix x = random_matrix(d, rng);
    const Matrix y = random_matrix(d, rng);
    const Matrix px = pinch(x, sd);
    const double scale = std::max(1.0, max_abs(x));

    dev_trace = std::max(dev_trace, std::abs((px.trace() - x.trace())) / scale);
    dev_idem = std::max(dev_idem, max_abs(pinch(px, sd) - px) / scale);
    dev_selfadj = std::max(dev_selfadj,
                           std::abs(hs_inner(x, pinch(y, sd)) - hs_inner(px, y)) /
                               std::max(1.0, std::abs(hs_inner(x, y))));
    const Matrix comm = sd.h0() * px - px * sd.h0();
    dev_commute = std::max(dev_commute,
                           max_abs(comm) / std::max(1.0, max_abs(sd.h0()) * max_abs(x)));
  }

  const double dev_unital = max_abs(pinch(identity(d), sd) - identity(d));

  const EighResult choi = eigh(HermitianOperator(choi_matrix(sd), 1e-10));
  const double dev_choi = std::max(0.0, -choi.eigenvalues.minCoeff());

  std::vector<PropertyCheck> report;
  auto add = [&report](const std::string& name, double dev) {
    report.push_back({name, dev, kTol, dev <= kTol});
  };
  add("trace_preservation", dev_trace);
  add("idempotence", dev_idem);
  add("self_adjointness", dev_selfadj);
  add("unitality", dev_unital);
  add("h0_commutation", dev_commute);
  add("choi_positivity", dev_choi);
  return report;
}

}  // namespace effgibbs

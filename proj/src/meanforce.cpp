#include "effgibbs/meanforce.hpp"

#include <cmath>
#include <sstream>

namespace effgibbs {

namespace {

Matrix rho_b(const BipartiteModel& m) { return gibbs(m.h_b, m.beta).rho; }

HermitianOperator log_route(const BipartiteModel& m, bool pinched) {
  // Tr_B of (optionally pinched) e^{-beta H}, ground-shifted for overflow
  // hygiene; the scalar shift re-enters after the logarithm.
  const HermitianOperator h(m.h0 + m.lambda * m.h_i);
  const EighResult es = eigh(h);
  const double e0 = es.eigenvalues.minCoeff();
  RealVector weights(es.eigenvalues.size());
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    weights[i] = std::exp(-m.beta * (es.eigenvalues[i] - e0));
  }
  Matrix shifted_exp = es.eigenvectors * weights.asDiagonal() * es.eigenvectors.adjoint();
  if (pinched) {
    shifted_exp = pinch(shifted_exp, spectral_decompose(HermitianOperator(m.h0)));
  }
  const Matrix reduced = partial_trace(shifted_exp, m.space, 1) / m.z_b;

  const EighResult red = eigh(HermitianOperator(reduced, 1e-10));
  RealVector logs(red.eigenvalues.size());
  for (Eigen::Index i = 0; i < logs.size(); ++i) {
    const double ev = red.eigenvalues[i];
    if (ev <= 0.0) {
      std::ostringstream msg;
      msg << "mean_force: reduced operator has nonpositive eigenvalue " << ev
          << "; the model is not a valid Gibbs pair";
      throw numerical_error(msg.str());
    }
    logs[i] = std::log(ev);
  }
  Matrix out = red.eigenvectors * logs.asDiagonal() * red.eigenvectors.adjoint();
  out *= -1.0 / m.beta;
  out += e0 * identity(out.rows());
  return HermitianOperator(std::move(out), 1e-10);
}

}  // namespace

BipartiteModel make_bipartite(const HermitianOperator& h_a, const HermitianOperator& h_b,
                              Matrix h_i, double lambda, double beta) {
  ProductSpace space({h_a.dim(), h_b.dim()});
  if (h_i.rows() != space.total_dim()) {
    throw std::invalid_argument("make_bipartite: interaction dim does not match the product");
  }
  if (beta <= 0.0) throw std::invalid_argument("make_bipartite: beta must be positive");

  const Matrix h0 = kron(h_a.mat(), identity(h_b.dim())) + kron(identity(h_a.dim()), h_b.mat());
  const Matrix h0_embedded = embed(h_a.mat(), space, 0) + embed(h_b.mat(), space, 1);
  if (max_abs(h0 - h0_embedded) > 1e-12 * std::max(1.0, max_abs(h0))) {
    throw numerical_error("make_bipartite: inconsistent free Hamiltonian assembly");
  }

  const GibbsPair gb = gibbs(h_b, beta);
  BipartiteModel m{space, h_a, h_b, std::move(h_i), lambda, beta, h0, gb.z, gb.log_z};
  return m;
}

HermitianOperator mean_force_exact(const BipartiteModel& m) { return log_route(m, true); }

HermitianOperator mean_force_standard(const BipartiteModel& m) { return log_route(m, false); }

double reservoir_average(const Matrix& x_on_b, const BipartiteModel& m) {
  return (x_on_b * rho_b(m)).trace().real();
}

Matrix reservoir_reduce(const Matrix& x_full, const BipartiteModel& m) {
  const Matrix weighted = x_full * kron(identity(m.h_a.dim()), rho_b(m));
  return partial_trace(weighted, m.space, 1);
}

EffectiveHamiltonianExpansion mean_force_perturbative(const BipartiteModel& m, int order) {
  if (order < 0 || order > 4) {
    throw std::invalid_argument("mean_force_perturbative: order must be in [0, 4]");
  }
  const SpectralDecomposition sd = spectral_decompose(HermitianOperator(m.h0));
  const BohrDecomposition bd = bohr_decompose(m.h_i, sd);

  EffectiveHamiltonianExpansion exp;
  exp.beta = m.beta;
  exp.lambda = m.lambda;
  exp.order = order;
  exp.terms.push_back(m.h_a.mat());

  if (order >= 1) {
    std::vector<Matrix> averaged;
    for (int k = 1; k <= order; ++k) {
      averaged.push_back(reservoir_reduce(moment_explicit(k, m.beta, bd), m));
    }
    const std::vector<Matrix> cumulants = cumulant_combine(averaged, order);
    for (int n = 1; n <= order; ++n) {
      exp.terms.push_back(
          HermitianOperator((-1.0 / m.beta) * cumulants[static_cast<std::size_t>(n - 1)], 1e-9)
              .mat());
    }
  }

  if (order >= 2) {
    // Closed second order: -(beta/2)(sum_{w != 0} f(bw) <D_w D_w^dag>_B + <D_0^2>_B - <D_0>_B^2).
    const Eigen::Index da = m.h_a.dim();
    Matrix closed = Matrix::Zero(da, da);
    for (std::size_t i = 0; i < bd.size(); ++i) {
      const double w = bd.frequency(i);
      if (w == 0.0) continue;
      closed += f(m.beta * w) * reservoir_reduce(bd.op(i) * bd.op(i).adjoint(), m);
    }
    const Matrix d0 = bd.get_or_zero(0.0);
    const Matrix d0_avg = reservoir_reduce(d0, m);
    closed += reservoir_reduce(d0 * d0, m) - d0_avg * d0_avg;
    closed *= -0.5 * m.beta;
    const double dev = max_abs(exp.terms[2] - closed);
    if (dev > 1e-10 * std::max(1.0, max_abs(closed))) {
      std::ostringstream msg;
      msg << "mean_force_perturbative: order-2 term deviates from the closed form by " << dev;
      throw numerical_error(msg.str());
    }
  }
  return exp;
}

SubsystemBohr subsystem_bohr(const BipartiteModel& m, const Matrix& a_factor,
                             const Matrix& b_factor) {
  if (max_abs(m.h_i - kron(a_factor, b_factor)) >
      1e-10 * std::max(1.0, max_abs(m.h_i))) {
    throw std::invalid_argument(
        "subsystem_bohr: interaction is not the product of the supplied factors");
  }
  const SpectralDecomposition sd_a = spectral_decompose(m.h_a);
  const SpectralDecomposition sd_b = spectral_decompose(m.h_b);
  return {bohr_decompose(a_factor, sd_a), bohr_decompose(b_factor, sd_b)};
}

Matrix mean_force_explicit_order2(const SubsystemBohr& sb, const BipartiteModel& m) {
  const Eigen::Index da = m.h_a.dim();
  const Matrix rb = rho_b(m);
  auto avg_b = [&rb](const Matrix& x) { return (x * rb).trace().real(); };

  // <B_nu B_nu^dag>_B per stored B-frequency.
  std::vector<double> b_corr(sb.b_terms.size());
  for (std::size_t j = 0; j < sb.b_terms.size(); ++j) {
    b_corr[j] = avg_b(sb.b_terms.op(j) * sb.b_terms.op(j).adjoint());
  }
  const double b0_avg = avg_b(sb.b_terms.get_or_zero(0.0));

  auto coefficient = [&](double w1) {
    double c = 0.0;
    for (std::size_t j = 0; j < sb.b_terms.size(); ++j) {
      c += f(m.beta * (sb.b_terms.frequency(j) - w1)) * b_corr[j];
    }
    return c;
  };

  const Matrix a0 = sb.a_terms.get_or_zero(0.0);
  Matrix second = Matrix::Zero(da, da);
  for (std::size_t i = 0; i < sb.a_terms.size(); ++i) {
    const double w1 = sb.a_terms.frequency(i);
    if (w1 == 0.0) continue;
    second += coefficient(w1) * (sb.a_terms.op(i).adjoint() * sb.a_terms.op(i));
  }
  second += (coefficient(0.0) - b0_avg * b0_avg) * (a0 * a0);

  return m.h_a.mat() + m.lambda * b0_avg * a0 -
         m.lambda * m.lambda * 0.5 * m.beta * second;
}

}  // namespace effgibbs

#include "effgibbs/thermo.hpp"

#include <cmath>
#include <sstream>

namespace effgibbs {

namespace {

constexpr double kEntropyClip = 1e-15;

RealVector density_spectrum(const Matrix& rho, const char* who) {
  const double trace = rho.trace().real();
  if (std::abs(trace - 1.0) > 1e-8) {
    std::ostringstream msg;
    msg << who << ": trace " << trace << " deviates from 1 beyond 1e-8";
    throw std::invalid_argument(msg.str());
  }
  const EighResult es = eigh(HermitianOperator(rho, 1e-9));
  if (es.eigenvalues.minCoeff() < -1e-10) {
    std::ostringstream msg;
    msg << who << ": eigenvalue " << es.eigenvalues.minCoeff() << " below -1e-10";
    throw std::invalid_argument(msg.str());
  }
  return es.eigenvalues;
}

}  // namespace

double von_neumann_entropy(const Matrix& rho) {
  const RealVector p = density_spectrum(rho, "von_neumann_entropy");
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] > kEntropyClip) s -= p[i] * std::log(p[i]);
  }
  return s;
}

double internal_energy(const Matrix& h, const Matrix& rho) {
  if (h.rows() != rho.rows()) throw std::invalid_argument("internal_energy: dim mismatch");
  return (h * rho).trace().real();
}

std::pair<double, double> observable_quantities(const Matrix& h_tilde, const Matrix& rho_tilde) {
  return {von_neumann_entropy(rho_tilde), internal_energy(h_tilde, rho_tilde)};
}

double relative_entropy(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows()) throw std::invalid_argument("relative_entropy: dim mismatch");
  const EighResult es_sigma = eigh(HermitianOperator(sigma, 1e-9));
  if (es_sigma.eigenvalues.minCoeff() <= 1e-14 * std::max(1.0, es_sigma.eigenvalues.maxCoeff())) {
    throw std::invalid_argument("relative_entropy: sigma is singular");
  }
  RealVector logs(es_sigma.eigenvalues.size());
  for (Eigen::Index i = 0; i < logs.size(); ++i) logs[i] = std::log(es_sigma.eigenvalues[i]);
  const Matrix log_sigma =
      es_sigma.eigenvectors * logs.asDiagonal() * es_sigma.eigenvectors.adjoint();

  const RealVector p = density_spectrum(rho, "relative_entropy");
  double tr_rho_log_rho = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] > kEntropyClip) tr_rho_log_rho += p[i] * std::log(p[i]);
  }
  return tr_rho_log_rho - (rho * log_sigma).trace().real();
}

LossReport losses(const HermitianOperator& h, const SpectralDecomposition& sd, double beta) {
  const GibbsPair gp = gibbs(h, beta);
  const Matrix rho_tilde = pinch(gp.rho, sd);
  const HermitianOperator h_eff = effective_hamiltonian_exact(h, sd, beta);

  const double s_exact = von_neumann_entropy(gp.rho);
  const double u_exact = internal_energy(h.mat(), gp.rho);
  const auto [s_obs, u_obs] = observable_quantities(h_eff.mat(), rho_tilde);

  LossReport out;
  out.ds = s_obs - s_exact;
  out.du = u_obs - u_exact;

  // Central difference of H-tilde in beta, Richardson extrapolated (h, h/2).
  const double step = 1e-4 * beta;
  auto diff = [&](double hh) {
    const Matrix plus = effective_hamiltonian_exact(h, sd, beta + hh).mat();
    const Matrix minus = effective_hamiltonian_exact(h, sd, beta - hh).mat();
    return ((plus - minus) / (2.0 * hh)).eval();
  };
  if (step <= 0.0 || beta - step <= 0.0) {
    throw numerical_error("losses: finite-difference step underflow");
  }
  const Matrix d_beta = (4.0 * diff(0.5 * step) - diff(step)) / 3.0;
  out.ds_deriv = -beta * beta * (d_beta * rho_tilde).trace().real();
  out.du_deriv = out.ds_deriv / beta;
  out.route_rel_diff = std::abs(out.ds - out.ds_deriv) / std::max(std::abs(out.ds), 1e-12);
  return out;
}

PerturbativeLossReport perturbative_losses(const BohrDecomposition& bd,
                                           const HermitianOperator& h0, double beta,
                                           double lambda) {
  if (beta <= 0.0) throw std::invalid_argument("perturbative_losses: beta must be positive");
  const GibbsPair free_state = gibbs(h0, beta);

  PerturbativeLossReport out;
  double positive_sum = 0.0;
  for (std::size_t i = 0; i < bd.size(); ++i) {
    const double w = bd.frequency(i);
    if (w <= 0.0) continue;
    const double avg = ((bd.op(i) * bd.op(i).adjoint()) * free_state.rho).trace().real();
    positive_sum += (1.0 - std::exp(-beta * w)) / w * avg;
  }
  out.ds = lambda * lambda * beta * positive_sum;
  out.du = out.ds / beta;

  out.mean_h2 = (second_order_term(bd, beta) * free_state.rho).trace().real();
  out.mean_dh2 =
      (second_order_term_beta_derivative(bd, beta) * free_state.rho).trace().real();
  out.df = -lambda * lambda * out.mean_h2;
  out.du_deriv = -lambda * lambda * beta * out.mean_dh2;
  out.identity_deviation = std::abs(out.mean_dh2 - out.mean_h2 / beta);
  return out;
}

FreeEnergyReport nonequilibrium_free_energies(const Matrix& rho, const HermitianOperator& h,
                                              const Matrix& h_tilde,
                                              const SpectralDecomposition& sd, double beta) {
  const GibbsPair gp = gibbs(h, beta);
  const Matrix rho_tilde = pinch(gp.rho, sd);
  const Matrix pinched = pinch(rho, sd);

  FreeEnergyReport out;
  out.equilibrium = -gp.log_z / beta;
  const double s_exact = relative_entropy(rho, gp.rho);
  const double s_pinched = relative_entropy(pinched, rho_tilde);
  out.f_rho = out.equilibrium + s_exact / beta;
  out.f_tilde_rho = out.equilibrium + s_pinched / beta;
  out.df_rho = (s_exact - s_pinched) / beta;

  // Direct definition <H-tilde>_P + beta^{-1} <ln P rho>_P; equals the
  // relative-entropy form identically.
  const RealVector p = density_spectrum(pinched, "nonequilibrium_free_energies");
  double tr_p_log_p = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] > kEntropyClip) tr_p_log_p += p[i] * std::log(p[i]);
  }
  out.f_tilde_rho_direct = internal_energy(h_tilde, pinched) + tr_p_log_p / beta;
  return out;
}

double entropy_from_partition_derivative(const HermitianOperator& h, double beta) {
  const double step = 1e-4 * beta;
  auto free_energy = [&](double b) { return -gibbs(h, b).log_z / b; };
  auto central = [&](double hh) {
    return (free_energy(beta + hh) - free_energy(beta - hh)) / (2.0 * hh);
  };
  const double df = (4.0 * central(0.5 * step) - central(step)) / 3.0;
  return beta * beta * df;
}

ThermoReport assemble_thermo_report(const HermitianOperator& h0, const Matrix& h_i,
                                    double lambda, double beta, int order) {
  return assemble_thermo_report(spectral_decompose(h0), h_i, lambda, beta, order);
}

ThermoReport assemble_thermo_report(const SpectralDecomposition& sd, const Matrix& h_i,
                                    double lambda, double beta, int order, double freq_tol) {
  const HermitianOperator h0(sd.h0());
  const HermitianOperator h(sd.h0() + lambda * h_i);
  const BohrDecomposition bd =
      bohr_decompose(h_i, sd, freq_tol < 0.0 ? sd.cluster_tol() : freq_tol);

  ThermoReport rep;
  rep.beta = beta;
  rep.lambda = lambda;
  rep.order = order;

  const GibbsPair gp = gibbs(h, beta);
  rep.z = gp.z;
  rep.log_z = gp.log_z;
  rep.free_energy = -gp.log_z / beta;
  rep.entropy = von_neumann_entropy(gp.rho);
  rep.internal = internal_energy(h.mat(), gp.rho);

  const Matrix rho_tilde = pinch(gp.rho, sd);
  rep.h_eff_exact = effective_hamiltonian_exact(h, sd, beta).mat();
  std::tie(rep.entropy_obs, rep.internal_obs) =
      observable_quantities(rep.h_eff_exact, rho_tilde);

  const LossReport loss = losses(h, sd, beta);
  rep.ds = loss.ds;
  rep.du = loss.du;
  rep.ds_deriv = loss.ds_deriv;
  rep.du_deriv = loss.du_deriv;
  rep.loss_route_rel_diff = loss.route_rel_diff;

  const Matrix h_rwa = sd.h0() + lambda * bd.get_or_zero(0.0);
  rep.df_rho_tilde = ((h_rwa - rep.h_eff_exact) * rho_tilde).trace().real();

  const PerturbativeLossReport pert = perturbative_losses(bd, h0, beta, lambda);
  rep.ds_pert = pert.ds;
  rep.du_pert = pert.du;
  rep.pert_identity_deviation = pert.identity_deviation;

  PerturbativeOptions opts;
  opts.freq_tol = freq_tol;
  rep.expansion = effective_hamiltonian_perturbative(sd, h_i, lambda, beta, order, opts);
  for (const auto& term : rep.expansion.terms) rep.term_norms.push_back(max_abs(term));
  return rep;
}

}  // namespace effgibbs

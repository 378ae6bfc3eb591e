// Thermodynamic ledger: entropies, energies, free energies, and the
// information/energy losses caused by restriction to averaged observables,
// each with an independent second route where the theory supplies one.
#pragma once

#include "effgibbs/cumulant.hpp"
#include "effgibbs/exact.hpp"

namespace effgibbs {

// -Tr rho ln rho with eigenvalues clipped at 1e-15 (0 ln 0 = 0). Rejects
// inputs whose trace deviates from 1 by more than 1e-8.
double von_neumann_entropy(const Matrix& rho);

double internal_energy(const Matrix& h, const Matrix& rho);

// (S-tilde, U-tilde) of the effective pair.
std::pair<double, double> observable_quantities(const Matrix& h_tilde, const Matrix& rho_tilde);

// Tr rho (ln rho - ln sigma); sigma must be positive definite.
double relative_entropy(const Matrix& rho, const Matrix& sigma);

struct LossReport {
  double ds = 0.0;              // S-tilde - S
  double du = 0.0;              // U-tilde - U
  double ds_deriv = 0.0;        // -beta^2 <d H-tilde/d beta>_~ (Richardson finite difference)
  double du_deriv = 0.0;        // ds_deriv / beta
  double route_rel_diff = 0.0;  // relative disagreement of the two ds routes
};

// Both loss routes for H = H0 + lambda H_I at inverse temperature beta; sd
// must decompose the free part.
LossReport losses(const HermitianOperator& h, const SpectralDecomposition& sd, double beta);

struct PerturbativeLossReport {
  double ds = 0.0;      // lambda^2 beta sum_{w>0} (1 - e^{-beta w})/w <D_w D_w^dag>_0
  double du = 0.0;      // ds / beta
  double df = 0.0;      // -lambda^2 <H2>_0; also the order-lambda^2 value of dF at rho-tilde
  double du_deriv = 0.0;               // -lambda^2 beta <dH2/dbeta>_0
  double mean_h2 = 0.0;                // <H2>_0
  double mean_dh2 = 0.0;               // <dH2/dbeta>_0
  double identity_deviation = 0.0;     // |<dH2/dbeta>_0 - <H2>_0 / beta|
};

// Leading-order losses from the Bohr data alone; the free-average identity
// <dH2/dbeta>_0 = <H2>_0 / beta ties the three routes together.
PerturbativeLossReport perturbative_losses(const BohrDecomposition& bd,
                                           const HermitianOperator& h0, double beta,
                                           double lambda);

struct FreeEnergyReport {
  double equilibrium = 0.0;         // F = -ln Z / beta
  double f_rho = 0.0;               // F + S(rho || rho_beta)/beta
  double f_tilde_rho = 0.0;         // F + S(P rho || rho-tilde)/beta
  double f_tilde_rho_direct = 0.0;  // <H-tilde>_P + <ln P rho>_P / beta (same value by identity)
  double df_rho = 0.0;              // f_rho - f_tilde_rho >= 0
};

FreeEnergyReport nonequilibrium_free_energies(const Matrix& rho, const HermitianOperator& h,
                                              const Matrix& h_tilde,
                                              const SpectralDecomposition& sd, double beta);

// S via beta^2 dF/dbeta with a Richardson-extrapolated central difference;
// thermodynamic-consistency cross-check for the state-based entropy.
double entropy_from_partition_derivative(const HermitianOperator& h, double beta);

struct ThermoReport {
  double beta = 0.0;
  double lambda = 0.0;
  int order = 2;
  double z = 0.0;
  double log_z = 0.0;
  double free_energy = 0.0;
  double entropy = 0.0;
  double internal = 0.0;
  double entropy_obs = 0.0;
  double internal_obs = 0.0;
  double ds = 0.0;
  double du = 0.0;
  double ds_deriv = 0.0;
  double du_deriv = 0.0;
  double loss_route_rel_diff = 0.0;
  double df_rho_tilde = 0.0;  // <H_RWA - H-tilde>_~
  double ds_pert = 0.0;
  double du_pert = 0.0;
  double pert_identity_deviation = 0.0;
  Matrix h_eff_exact;
  EffectiveHamiltonianExpansion expansion;
  std::vector<double> term_norms;
};

ThermoReport assemble_thermo_report(const HermitianOperator& h0, const Matrix& h_i,
                                    double lambda, double beta, int order);
// freq_tol < 0 inherits the decomposition's cluster tolerance.
ThermoReport assemble_thermo_report(const SpectralDecomposition& sd, const Matrix& h_i,
                                    double lambda, double beta, int order,
                                    double freq_tol = -1.0);

}  // namespace effgibbs

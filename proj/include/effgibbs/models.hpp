// Builders for the example families (two two-level systems, two oscillators,
// two-level system with oscillator; off-resonance and resonance variants)
// plus their closed-form second-order effective Hamiltonians, information
// losses, and resonance-gap formulas used as regression references.
#pragma once

#include "effgibbs/meanforce.hpp"

#include <optional>

namespace effgibbs {

enum class ModelFamily { TwoTls, TwoOsc, TlsOsc, Custom };

struct ModelSpec {
  ModelFamily family = ModelFamily::TwoTls;
  double omega_a = 1.0;
  double omega_b = 2.0;
  complexd g{1.0, 0.0};
  double delta_omega = 0.0;  // detuning, resonance variant only
  double lambda = 0.1;
  int cutoff = 20;           // Fock truncation for oscillator factors
  bool resonant = false;     // omega_b := omega_a; lambda d-omega n_b moves into H_I

  std::vector<Eigen::Index> custom_dims;  // family == Custom only
  Matrix custom_h0;
  Matrix custom_hi;
};

struct BuiltModel {
  HermitianOperator h0;
  Matrix h_i;
  ProductSpace space;
};

// Ladder operators. Truncation keeps [n, a] = -a exact inside the cut space.
Matrix tls_lower();
Matrix osc_lower(int cutoff);

BuiltModel build(const ModelSpec& spec);

// Oscillator families need cutoffs that track the thermal occupation;
// beta < 0.1 is rejected unless cutoff >= 40.
void validate_cutoff_for_beta(const ModelSpec& spec, double beta);

// The lambda^2 coefficient of the effective Hamiltonian in number-operator
// form (matrix on the built product space). Regression reference only.
Matrix closed_form_h2(const ModelSpec& spec, double beta);

// Leading-order information loss at spec.lambda.
double closed_form_ds(const ModelSpec& spec, double beta);

// Family gap between the omega_b -> omega_a limit of the off-resonance loss
// and the resonance loss, at spec.lambda.
double resonance_gap(const ModelSpec& spec, double beta);

// The same gap from the closed forms by Richardson limit extrapolation in
// omega_b; evaluated near the literal ratio 1 + 1e-9 the difference quotient
// is rounding-limited, so the extrapolation uses 1e-5 and 5e-6 instead.
double resonance_gap_extrapolated(const ModelSpec& spec, double beta);

// Zeroes every row/column touching the top `layers` Fock levels of each
// oscillator factor; (a + a^dag) truncation distorts only those edges.
Matrix mask_truncation_edge(const Matrix& x, const ModelSpec& spec, int layers = 2);

// The Hermitian one-factor pieces of H_I = A (x) B when the interaction is a
// pure product (off-resonance, or resonance with zero detuning).
std::optional<std::pair<Matrix, Matrix>> interaction_factors(const ModelSpec& spec);

// Factor Hamiltonians (A carries omega_a, B carries omega_b or its resonant value).
std::pair<HermitianOperator, HermitianOperator> subsystem_hamiltonians(const ModelSpec& spec);

// Bipartite view with the second factor as reservoir.
BipartiteModel to_bipartite(const ModelSpec& spec, double beta);

// Normalized resonance-case losses ds * omega_a / (lambda^2 beta |g|^2) as a
// function of x = beta omega_a alone: tanh(x/2)/2, coth(x/2)/2 and 1/2.
struct Figure1Row {
  double x = 0.0;
  double two_tls = 0.0;
  double two_osc = 0.0;
  double tls_osc = 0.0;
};
Figure1Row figure1_closed_form(double x);

}  // namespace effgibbs

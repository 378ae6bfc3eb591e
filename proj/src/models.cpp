#include "effgibbs/models.hpp"

#include <cmath>
#include <sstream>

namespace effgibbs {

namespace {

bool factor_is_osc(const ModelSpec& spec, int slot) {
  switch (spec.family) {
    case ModelFamily::TwoTls: return false;
    case ModelFamily::TwoOsc: return true;
    case ModelFamily::TlsOsc: return slot == 1;
    case ModelFamily::Custom: return false;
  }
  return false;
}

void check_parameters(const ModelSpec& spec) {
  if (spec.family == ModelFamily::Custom) {
    if (spec.custom_dims.empty() || spec.custom_h0.rows() == 0 || spec.custom_hi.rows() == 0) {
      throw std::invalid_argument("build: custom family needs dims, H0 and HI");
    }
    return;
  }
  if (spec.omega_a <= 0.0 || spec.omega_b <= 0.0) {
    throw std::invalid_argument("build: omega_a and omega_b must be positive");
  }
  if ((factor_is_osc(spec, 0) || factor_is_osc(spec, 1)) && spec.cutoff < 2) {
    throw std::invalid_argument("build: oscillator cutoff must be >= 2");
  }
}

double effective_omega_b(const ModelSpec& spec) {
  return spec.resonant ? spec.omega_a : spec.omega_b;
}

Matrix lower_op(const ModelSpec& spec, int slot) {
  return factor_is_osc(spec, slot) ? osc_lower(spec.cutoff) : tls_lower();
}

// Occupation polynomial multiplying f in the closed forms: 1 - n for the
// lowering-channel of a two-level factor, 1 + n for an oscillator.
Matrix up_channel(const ModelSpec& spec, int slot) {
  const Matrix a = lower_op(spec, slot);
  const Matrix n = a.adjoint() * a;
  const Matrix one = identity(n.rows());
  return factor_is_osc(spec, slot) ? (one + n).eval() : (one - n).eval();
}

double coth(double x) { return 1.0 / std::tanh(x); }

}  // namespace

Matrix tls_lower() {
  Matrix s = Matrix::Zero(2, 2);
  s(0, 1) = 1.0;  // ground state first
  return s;
}

Matrix osc_lower(int cutoff) {
  if (cutoff < 2) throw std::invalid_argument("osc_lower: cutoff must be >= 2");
  Matrix a = Matrix::Zero(cutoff, cutoff);
  for (int k = 1; k < cutoff; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

BuiltModel build(const ModelSpec& spec) {
  check_parameters(spec);
  if (spec.family == ModelFamily::Custom) {
    ProductSpace space(spec.custom_dims);
    if (spec.custom_h0.rows() != space.total_dim() ||
        spec.custom_hi.rows() != space.total_dim()) {
      throw std::invalid_argument("build: custom matrices do not match the declared dims");
    }
    return {HermitianOperator(spec.custom_h0), spec.custom_hi, space};
  }

  const Matrix a = lower_op(spec, 0);
  const Matrix b = lower_op(spec, 1);
  const Matrix na = a.adjoint() * a;
  const Matrix nb = b.adjoint() * b;
  ProductSpace space({na.rows(), nb.rows()});

  // Resonant variant: exactly degenerate free part, detuning rides with the
  // interaction as lambda * d-omega * n_b.
  const double wb = effective_omega_b(spec);
  Matrix h0 = spec.omega_a * kron(na, identity(nb.rows())) + wb * kron(identity(na.rows()), nb);
  Matrix h_i = kron(a + a.adjoint(), std::conj(spec.g) * b + spec.g * b.adjoint());
  if (spec.resonant && spec.delta_omega != 0.0) {
    h_i += spec.delta_omega * kron(identity(na.rows()), nb);
  }
  return {HermitianOperator(std::move(h0)), std::move(h_i), space};
}

void validate_cutoff_for_beta(const ModelSpec& spec, double beta) {
  if (!(factor_is_osc(spec, 0) || factor_is_osc(spec, 1))) return;
  if (beta < 0.1 && spec.cutoff < 40) {
    std::ostringstream msg;
    msg << "beta = " << beta << " needs cutoff >= 40 for oscillator families (have "
        << spec.cutoff << ")";
    throw std::invalid_argument(msg.str());
  }
}

Matrix closed_form_h2(const ModelSpec& spec, double beta) {
  if (spec.family == ModelFamily::Custom) {
    throw std::invalid_argument("closed_form_h2: no closed form for custom models");
  }
  const BuiltModel built = build(spec);
  const ProductSpace& space = built.space;

  const Matrix a = lower_op(spec, 0);
  const Matrix b = lower_op(spec, 1);
  const Matrix na = embed(a.adjoint() * a, space, 0);
  const Matrix nb = embed(b.adjoint() * b, space, 1);
  const Matrix ua = embed(up_channel(spec, 0), space, 0);
  const Matrix ub = embed(up_channel(spec, 1), space, 1);

  const double g2 = std::norm(spec.g);
  const double wa = spec.omega_a;
  Matrix sum;
  if (spec.resonant) {
    sum = f(2.0 * beta * wa) * ua * ub + f(-2.0 * beta * wa) * na * nb;
  } else {
    const double wb = spec.omega_b;
    sum = f(beta * (wa - wb)) * ua * nb + f(beta * (wa + wb)) * ua * ub +
          f(beta * (wb - wa)) * na * ub + f(-beta * (wa + wb)) * na * nb;
  }
  return -0.5 * beta * g2 * sum;
}

double closed_form_ds(const ModelSpec& spec, double beta) {
  if (spec.family == ModelFamily::Custom) {
    throw std::invalid_argument("closed_form_ds: no closed form for custom models");
  }
  const double g2 = std::norm(spec.g);
  const double wa = spec.omega_a;
  const double wb = spec.omega_b;
  const double l2b = spec.lambda * spec.lambda * beta;

  if (spec.resonant) {
    switch (spec.family) {
      case ModelFamily::TwoTls: return l2b * g2 * std::tanh(0.5 * beta * wa) / (2.0 * wa);
      case ModelFamily::TwoOsc: return l2b * g2 * coth(0.5 * beta * wa) / (2.0 * wa);
      case ModelFamily::TlsOsc: return l2b * g2 / (2.0 * wa);
      default: break;
    }
  } else {
    const double denom = wa * wa - wb * wb;
    switch (spec.family) {
      case ModelFamily::TwoTls:
        return l2b * g2 * (wa * std::tanh(0.5 * beta * wa) - wb * std::tanh(0.5 * beta * wb)) /
               denom;
      case ModelFamily::TwoOsc:
        return l2b * g2 * (wa * coth(0.5 * beta * wb) - wb * coth(0.5 * beta * wa)) / denom;
      case ModelFamily::TlsOsc:
        return l2b * g2 * (wa * std::tanh(0.5 * beta * wa) * coth(0.5 * beta * wb) - wb) / denom;
      default: break;
    }
  }
  throw std::invalid_argument("closed_form_ds: unknown family");
}

double resonance_gap(const ModelSpec& spec, double beta) {
  if (spec.family == ModelFamily::Custom) {
    throw std::invalid_argument("resonance_gap: no closed form for custom models");
  }
  const double g2 = std::norm(spec.g);
  const double l2 = spec.lambda * spec.lambda;
  const double x = 0.5 * beta * spec.omega_a;
  switch (spec.family) {
    case ModelFamily::TwoTls: {
      const double r = 0.5 * beta * std::sqrt(g2) / std::cosh(x);
      return l2 * r * r;
    }
    case ModelFamily::TwoOsc: {
      const double r = 0.5 * beta * std::sqrt(g2) / std::sinh(x);
      return l2 * r * r;
    }
    case ModelFamily::TlsOsc:
      // The omega_b -> omega_a limit of the off-resonance loss forces a
      // beta^2 here (the difference quotient differentiates coth in omega_b).
      return l2 * beta * beta * g2 / (2.0 * std::sinh(beta * spec.omega_a));
    default: break;
  }
  throw std::invalid_argument("resonance_gap: unknown family");
}

double resonance_gap_extrapolated(const ModelSpec& spec, double beta) {
  ModelSpec res = spec;
  res.resonant = true;
  const double ds_res = closed_form_ds(res, beta);

  auto gap_at = [&](double h) {
    ModelSpec off = spec;
    off.resonant = false;
    off.omega_b = spec.omega_a * (1.0 + h);
    return closed_form_ds(off, beta) - ds_res;
  };
  const double h = 1e-5;
  return 2.0 * gap_at(0.5 * h) - gap_at(h);
}

Matrix mask_truncation_edge(const Matrix& x, const ModelSpec& spec, int layers) {
  const BuiltModel built = build(spec);
  const Eigen::Index da = built.space.dim(0);
  const Eigen::Index db = built.space.dim(1);

  auto keep = [&](Eigen::Index index) {
    const Eigen::Index ia = index / db;
    const Eigen::Index ib = index % db;
    if (factor_is_osc(spec, 0) && ia >= da - layers) return false;
    if (factor_is_osc(spec, 1) && ib >= db - layers) return false;
    return true;
  };

  Matrix out = x;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      if (!keep(r) || !keep(c)) out(r, c) = 0.0;
    }
  }
  return out;
}

std::optional<std::pair<Matrix, Matrix>> interaction_factors(const ModelSpec& spec) {
  if (spec.family == ModelFamily::Custom) return std::nullopt;
  if (spec.resonant && spec.delta_omega != 0.0) return std::nullopt;
  const Matrix a = lower_op(spec, 0);
  const Matrix b = lower_op(spec, 1);
  return std::make_pair((a + a.adjoint()).eval(),
                        (std::conj(spec.g) * b + spec.g * b.adjoint()).eval());
}

std::pair<HermitianOperator, HermitianOperator> subsystem_hamiltonians(const ModelSpec& spec) {
  if (spec.family == ModelFamily::Custom) {
    throw std::invalid_argument("subsystem_hamiltonians: custom models carry no factor split");
  }
  const Matrix a = lower_op(spec, 0);
  const Matrix b = lower_op(spec, 1);
  Matrix h_a = spec.omega_a * (a.adjoint() * a);
  Matrix h_b = effective_omega_b(spec) * (b.adjoint() * b);
  return {HermitianOperator(std::move(h_a)), HermitianOperator(std::move(h_b))};
}

BipartiteModel to_bipartite(const ModelSpec& spec, double beta) {
  const BuiltModel built = build(spec);
  auto [h_a, h_b] = subsystem_hamiltonians(spec);
  return make_bipartite(h_a, h_b, built.h_i, spec.lambda, beta);
}

Figure1Row figure1_closed_form(double x) {
  if (x <= 0.0) throw std::invalid_argument("figure1_closed_form: x must be positive");
  return {x, 0.5 * std::tanh(0.5 * x), 0.5 * coth(0.5 * x), 0.5};
}

}  // namespace effgibbs

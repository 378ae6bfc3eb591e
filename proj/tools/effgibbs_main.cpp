// effgibbs command line: thermodynamic reports for effective Gibbs states,
// inverse-temperature sweeps, the resonance-loss comparison figure, and the
// self-verification suites.
//
// Exit codes: 0 ok, 1 verify failure, 2 configuration error, 3 numerical error.

#include "effgibbs/model_json.hpp"
#include "effgibbs/thermo.hpp"
#include "effgibbs/verify.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace effgibbs;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

struct CommonOptions {
  std::string family = "two_tls";
  std::string model_json_path;
  double omega_a = 1.0;
  double omega_b = 2.0;
  double g_re = 1.0;
  double g_im = 0.0;
  double delta_omega = 0.0;
  double lambda = 0.1;
  int cutoff = 0;  // 0: default (env override or 20)
  bool resonant = false;
  int order = 2;
  double cluster_tol = -1.0;
  double freq_tol = -1.0;
  std::uint64_t seed = 42;
  std::string output_path;
  std::string format = "json";
};

void add_model_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--model", opt.family, "Model family: two_tls, two_osc, tls_osc");
  cmd->add_option("--model-json", opt.model_json_path, "Path to a ModelSpec JSON file");
  cmd->add_option("--omega-a", opt.omega_a, "Energy of subsystem a");
  cmd->add_option("--omega-b", opt.omega_b, "Energy of subsystem b (off-resonance)");
  cmd->add_option("--g-re", opt.g_re, "Re g");
  cmd->add_option("--g-im", opt.g_im, "Im g");
  cmd->add_option("--delta-omega", opt.delta_omega, "Resonant detuning");
  cmd->add_option("--lambda", opt.lambda, "Coupling strength");
  cmd->add_option("--cutoff", opt.cutoff, "Fock cutoff for oscillator factors");
  cmd->add_flag("--resonant", opt.resonant, "Resonance variant");
  cmd->add_option("--order", opt.order, "Perturbative order (default 2)");
  cmd->add_option("--cluster-tol", opt.cluster_tol, "Eigenvalue clustering tolerance");
  cmd->add_option("--freq-tol", opt.freq_tol, "Bohr frequency clustering tolerance");
  cmd->add_option("--seed", opt.seed, "Random seed recorded in outputs");
  cmd->add_option("-o,--output", opt.output_path, "Output path (default stdout)");
}

double env_double(const char* name, double fallback) {
  const char* raw = std::getenv(name);
  if (raw == nullptr) return fallback;
  try {
    return std::stod(raw);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(name) + ": cannot parse '" + raw + "'");
  }
}

int env_int(const char* name, int fallback) {
  const char* raw = std::getenv(name);
  if (raw == nullptr) return fallback;
  try {
    return std::stoi(raw);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(name) + ": cannot parse '" + raw + "'");
  }
}

// Flags win over environment overrides which win over built-in defaults.
void apply_environment(CommonOptions& opt) {
  if (opt.cluster_tol < 0.0) opt.cluster_tol = env_double("EFFGIBBS_CLUSTER_TOL", -1.0);
  if (opt.freq_tol < 0.0) opt.freq_tol = env_double("EFFGIBBS_FREQ_TOL", -1.0);
  if (opt.cutoff <= 0) opt.cutoff = env_int("EFFGIBBS_FOCK_CUTOFF", 20);
}

ModelSpec spec_from_options(const CommonOptions& opt) {
  if (!opt.model_json_path.empty()) {
    std::ifstream in(opt.model_json_path);
    if (!in) throw std::invalid_argument("cannot open model file " + opt.model_json_path);
    nlohmann::json j;
    in >> j;
    return model_spec_from_json(j);
  }
  ModelSpec spec;
  spec.family = family_from_string(opt.family);
  spec.omega_a = opt.omega_a;
  spec.omega_b = opt.omega_b;
  spec.g = complexd(opt.g_re, opt.g_im);
  spec.delta_omega = opt.delta_omega;
  spec.lambda = opt.lambda;
  spec.cutoff = opt.cutoff;
  spec.resonant = opt.resonant;
  return spec;
}

void write_output(const std::string& path, const std::string& payload) {
  if (path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output path " + path);
  out << payload;
}

std::string json_pair(const std::string& key, const std::string& raw) {
  return "\"" + key + "\":" + raw;
}

std::string json_num(const std::string& key, double value) {
  return json_pair(key, format_float(value));
}

std::string model_json_fragment(const ModelSpec& spec) {
  std::ostringstream out;
  out << "{" << json_pair("family", "\"" + family_to_string(spec.family) + "\"") << ","
      << json_num("omega_a", spec.omega_a) << "," << json_num("omega_b", spec.omega_b) << ","
      << json_pair("g", "[" + format_float(spec.g.real()) + "," + format_float(spec.g.imag()) +
                            "]")
      << "," << json_num("delta_omega", spec.delta_omega) << ","
      << json_num("lambda", spec.lambda) << ","
      << json_pair("cutoff", std::to_string(spec.cutoff)) << ","
      << json_pair("resonant", spec.resonant ? "true" : "false") << "}";
  return out.str();
}

std::string report_to_json(const ModelSpec& spec, const ThermoReport& rep,
                           const CommonOptions& opt, double cluster_tol_used) {
  std::ostringstream out;
  out << "{";
  out << json_pair("meta", std::string("{") +
                               json_pair("tool", "\"effgibbs\"") + "," +
                               json_pair("version", std::string("\"") + kToolVersion + "\"") +
                               "," + json_pair("seed", std::to_string(opt.seed)) + "," +
                               json_pair("order", std::to_string(rep.order)) + "," +
                               json_num("cluster_tol", cluster_tol_used) + "," +
                               json_num("freq_tol", opt.freq_tol < 0.0 ? cluster_tol_used
                                                                       : opt.freq_tol) +
                               "}")
      << ",";
  out << json_pair("model", model_json_fragment(spec)) << ",";
  out << json_num("beta", rep.beta) << "," << json_num("lambda", rep.lambda) << ",";
  out << json_num("z", rep.z) << "," << json_num("log_z", rep.log_z) << ","
      << json_num("free_energy", rep.free_energy) << ",";
  out << json_num("entropy", rep.entropy) << "," << json_num("internal_energy", rep.internal)
      << ",";
  out << json_num("entropy_observable", rep.entropy_obs) << ","
      << json_num("internal_energy_observable", rep.internal_obs) << ",";
  out << json_num("ds", rep.ds) << "," << json_num("du", rep.du) << ","
      << json_num("ds_deriv", rep.ds_deriv) << "," << json_num("du_deriv", rep.du_deriv) << ","
      << json_num("loss_route_rel_diff", rep.loss_route_rel_diff) << ",";
  out << json_num("df_rho_tilde", rep.df_rho_tilde) << ",";
  out << json_num("ds_pert", rep.ds_pert) << "," << json_num("du_pert", rep.du_pert) << ","
      << json_num("pert_identity_deviation", rep.pert_identity_deviation) << ",";
  out << json_pair("effective_hamiltonian_exact", matrix_to_json_string(rep.h_eff_exact))
      << ",";
  out << "\"effective_hamiltonian_orders\":[";
  for (std::size_t i = 0; i < rep.expansion.terms.size(); ++i) {
    if (i > 0) out << ",";
    out << matrix_to_json_string(rep.expansion.terms[i]);
  }
  out << "],";
  out << "\"term_norms\":[";
  for (std::size_t i = 0; i < rep.term_norms.size(); ++i) {
    if (i > 0) out << ",";
    out << format_float(rep.term_norms[i]);
  }
  out << "]}";
  out << "\n";
  return out.str();
}

struct PreparedModel {
  ModelSpec spec;
  BuiltModel built;
  SpectralDecomposition sd;
  double cluster_tol_used;
};

PreparedModel prepare(const CommonOptions& opt, double beta) {
  ModelSpec spec = spec_from_options(opt);
  validate_cutoff_for_beta(spec, beta);
  BuiltModel built = build(spec);
  const double cluster_tol =
      opt.cluster_tol >= 0.0 ? opt.cluster_tol : default_cluster_tol(built.h0);
  SpectralDecomposition sd = spectral_decompose(built.h0, cluster_tol);
  return {std::move(spec), std::move(built), std::move(sd), cluster_tol};
}

int cmd_report(const CommonOptions& opt, double beta) {
  PreparedModel prep = prepare(opt, beta);
  const ThermoReport rep = assemble_thermo_report(prep.sd, prep.built.h_i, prep.spec.lambda,
                                                  beta, opt.order, opt.freq_tol);
  write_output(opt.output_path, report_to_json(prep.spec, rep, opt, prep.cluster_tol_used));
  return kExitOk;
}

int cmd_sweep(const CommonOptions& opt, double beta_min, double beta_max, int steps,
              const std::string& spacing) {
  if (steps < 1 || beta_min >= beta_max || beta_min <= 0.0) {
    throw std::invalid_argument("sweep: need 0 < beta-min < beta-max and steps >= 1");
  }
  PreparedModel prep = prepare(opt, beta_min);

  std::vector<double> grid;
  for (int i = 0; i <= steps; ++i) {
    const double t = steps == 0 ? 0.0 : static_cast<double>(i) / steps;
    grid.push_back(spacing == "log"
                       ? beta_min * std::pow(beta_max / beta_min, t)
                       : beta_min + (beta_max - beta_min) * t);
  }

  std::ostringstream out;
  if (opt.format == "csv") {
    out << "beta,z,free_energy,entropy,internal_energy,entropy_observable,"
           "internal_energy_observable,ds,du,ds_pert,du_pert,df_rho_tilde\r\n";
  }
  bool first = true;
  if (opt.format == "json") out << "[";
  for (const double beta : grid) {
    const ThermoReport rep = assemble_thermo_report(prep.sd, prep.built.h_i, prep.spec.lambda,
                                                    beta, opt.order, opt.freq_tol);
    if (opt.format == "csv") {
      out << format_float(rep.beta) << "," << format_float(rep.z) << ","
          << format_float(rep.free_energy) << "," << format_float(rep.entropy) << ","
          << format_float(rep.internal) << "," << format_float(rep.entropy_obs) << ","
          << format_float(rep.internal_obs) << "," << format_float(rep.ds) << ","
          << format_float(rep.du) << "," << format_float(rep.ds_pert) << ","
          << format_float(rep.du_pert) << "," << format_float(rep.df_rho_tilde) << "\r\n";
    } else {
      if (!first) out << ",";
      out << report_to_json(prep.spec, rep, opt, prep.cluster_tol_used);
      first = false;
    }
  }
  if (opt.format == "json") out << "]\n";
  write_output(opt.output_path, out.str());
  return kExitOk;
}

// Normalized resonance-case information losses: ds * omega_a / (lambda^2
// beta |g|^2) depends on x = beta omega_a alone, giving tanh(x/2)/2,
// coth(x/2)/2 and 1/2 for the three families.
int cmd_figure1(const CommonOptions& opt, double x_min, double x_max, int points, bool exact,
                int exact_points, double exact_min, double exact_lambda) {
  if (points < 1 || x_min <= 0.0 || x_min >= x_max) {
    throw std::invalid_argument("figure1: need 0 < x-min < x-max and points >= 1");
  }

  std::vector<double> exact_grid;
  if (exact) {
    for (int i = 0; i < exact_points; ++i) {
      const double t = exact_points == 1 ? 0.0 : static_cast<double>(i) / (exact_points - 1);
      exact_grid.push_back(exact_min * std::pow(x_max / exact_min, t));
    }
  }

  auto exact_normalized = [&](ModelFamily family, double x) {
    ModelSpec spec;
    spec.family = family;
    spec.resonant = true;
    spec.delta_omega = 0.0;
    spec.omega_a = x;  // beta = 1, so x = beta omega_a and g = 1 gives beta|g| = 1
    spec.omega_b = x;
    spec.g = complexd(1.0, 0.0);
    spec.lambda = exact_lambda;
    spec.cutoff = std::max(10, static_cast<int>(std::ceil(14.0 / x)) + 6);
    const double beta = 1.0;
    const BuiltModel built = build(spec);
    const SpectralDecomposition sd = spectral_decompose(built.h0);
    const HermitianOperator h(built.h0.mat() + spec.lambda * built.h_i);
    const GibbsPair gp = gibbs(h, beta);
    const double ds =
        von_neumann_entropy(pinch(gp.rho, sd)) - von_neumann_entropy(gp.rho);
    return ds * spec.omega_a / (spec.lambda * spec.lambda * beta);
  };

  std::ostringstream out;
  out << "# effgibbs figure1: normalized resonance information loss vs beta*omega_a\r\n";
  out << "# columns are ds * omega_a / (lambda^2 * beta * |g|^2) at beta*|g| = 1;\r\n";
  out << "# closed forms: two_tls = tanh(x/2)/2, two_osc = coth(x/2)/2, tls_osc = 1/2\r\n";
  if (exact) {
    out << "# exact_* columns: exact-pipeline value at lambda = " << format_float(exact_lambda)
        << ", subsampled for x >= " << format_float(exact_min) << "\r\n";
    out << "# (they track the closed forms only where the lambda^2 order dominates;\r\n";
    out << "#  the remainder grows like e^{beta omega} at large x)\r\n";
  }
  out << "beta_omega_a,ds_two_tls,ds_two_osc,ds_tls_osc";
  if (exact) out << ",exact_two_tls,exact_two_osc,exact_tls_osc";
  out << "\r\n";

  for (int i = 0; i <= points; ++i) {
    const double t = points == 0 ? 0.0 : static_cast<double>(i) / points;
    const double x = x_min * std::pow(x_max / x_min, t);
    const Figure1Row row = figure1_closed_form(x);
    out << format_float(row.x) << "," << format_float(row.two_tls) << ","
        << format_float(row.two_osc) << "," << format_float(row.tls_osc);
    if (exact) {
      bool sampled = false;
      for (const double xs : exact_grid) {
        if (std::abs(std::log(xs / x)) < 0.5 * std::log(x_max / x_min) / points) {
          sampled = true;
          break;
        }
      }
      if (sampled && x >= exact_min) {
        out << "," << format_float(exact_normalized(ModelFamily::TwoTls, x)) << ","
            << format_float(exact_normalized(ModelFamily::TwoOsc, x)) << ","
            << format_float(exact_normalized(ModelFamily::TlsOsc, x));
      } else {
        out << ",,,";
      }
    }
    out << "\r\n";
  }
  write_output(opt.output_path, out.str());
  return kExitOk;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, const std::string& output_path) {
  std::vector<verify::SuiteResult> results;
  if (suite == "all") {
    results = verify::run_all(seed);
  } else {
    results.push_back(verify::run_suite(suite, seed));
  }

  bool all_pass = true;
  std::ostringstream out;
  out << "{\"seed\":" << seed << ",\"suites\":[";
  for (std::size_t s = 0; s < results.size(); ++s) {
    if (s > 0) out << ",";
    out << "{\"suite\":\"" << results[s].suite << "\",\"checks\":[";
    for (std::size_t c = 0; c < results[s].checks.size(); ++c) {
      const auto& check = results[s].checks[c];
      if (c > 0) out << ",";
      out << "{\"name\":\"" << check.name << "\",\"deviation\":" << format_float(check.deviation)
          << ",\"tolerance\":" << format_float(check.tolerance)
          << ",\"pass\":" << (check.pass ? "true" : "false") << "}";
    }
    out << "],\"pass\":" << (results[s].all_pass() ? "true" : "false") << "}";
    all_pass = all_pass && results[s].all_pass();
  }
  out << "],\"pass\":" << (all_pass ? "true" : "false") << "}\n";
  write_output(output_path, out.str());

  for (const auto& result : results) {
    for (const auto& check : result.checks) {
      if (!check.pass) {
        std::cerr << "verify: " << result.suite << "/" << check.name << " deviation "
                  << check.deviation << " exceeds " << check.tolerance << "\n";
      }
    }
  }
  return all_pass ? kExitOk : kExitVerifyFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effective Gibbs states and effective Hamiltonians for averaged observables"};
  app.require_subcommand(1);

  CommonOptions report_opt;
  double report_beta = 1.0;
  CLI::App* report = app.add_subcommand("report", "Thermodynamic report at one temperature");
  add_model_flags(report, report_opt);
  report->add_option("--beta", report_beta, "Inverse temperature")->required();

  CommonOptions sweep_opt;
  double beta_min = 0.2, beta_max = 10.0;
  int beta_steps = 20;
  std::string spacing = "log";
  CLI::App* sweep = app.add_subcommand("sweep", "Report over an inverse-temperature grid");
  add_model_flags(sweep, sweep_opt);
  sweep->add_option("--beta-min", beta_min, "Grid start");
  sweep->add_option("--beta-max", beta_max, "Grid end");
  sweep->add_option("--beta-steps", beta_steps, "Number of grid intervals");
  sweep->add_option("--spacing", spacing, "linear or log")
      ->check(CLI::IsMember({"linear", "log"}));
  sweep->add_option("--format", sweep_opt.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  CommonOptions fig_opt;
  double x_min = 0.2, x_max = 10.0;
  int points = 50;
  bool exact = false;
  int exact_points = 8;
  double exact_min = 1.0;
  double exact_lambda = 0.05;
  CLI::App* fig = app.add_subcommand("figure1", "Normalized resonance losses vs beta*omega_a");
  fig->add_option("--x-min", x_min, "Smallest beta*omega_a");
  fig->add_option("--x-max", x_max, "Largest beta*omega_a");
  fig->add_option("--points", points, "Number of grid intervals");
  fig->add_flag("--exact", exact, "Add exact-pipeline columns (subsampled)");
  fig->add_option("--exact-points", exact_points, "Exact column sample count");
  fig->add_option("--exact-min", exact_min, "Smallest x computed exactly");
  fig->add_option("--exact-lambda", exact_lambda, "Coupling for the exact columns");
  fig->add_option("-o,--output", fig_opt.output_path, "Output path (default stdout)");

  std::string suite = "all";
  std::uint64_t verify_seed = 42;
  std::string verify_output;
  CLI::App* ver = app.add_subcommand("verify", "Run the self-verification suites");
  ver->add_option("--suite", suite, "pinching|bohr|cumulant|exact|thermo|meanforce|models|all");
  ver->add_option("--seed", verify_seed, "Random seed");
  ver->add_option("-o,--output", verify_output, "Summary path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (report->parsed()) {
      apply_environment(report_opt);
      return cmd_report(report_opt, report_beta);
    }
    if (sweep->parsed()) {
      apply_environment(sweep_opt);
      return cmd_sweep(sweep_opt, beta_min, beta_max, beta_steps, spacing);
    }
    if (fig->parsed()) {
      return cmd_figure1(fig_opt, x_min, x_max, points, exact, exact_points, exact_min,
                         exact_lambda);
    }
    if (ver->parsed()) {
      return cmd_verify(suite, verify_seed, verify_output);
    }
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "effgibbs: config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "effgibbs: config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const numerical_error& e) {
    std::cerr << "effgibbs: numerical error: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "effgibbs: error: " << e.what() << "\n";
    return kExitNumericalError;
  }
  return kExitConfigError;
}

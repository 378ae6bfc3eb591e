#include "effgibbs/model_json.hpp"

#include <cstdio>

namespace effgibbs {

std::string family_to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::TwoTls: return "two_tls";
    case ModelFamily::TwoOsc: return "two_osc";
    case ModelFamily::TlsOsc: return "tls_osc";
    case ModelFamily::Custom: return "custom";
  }
  throw std::invalid_argument("family_to_string: unknown family");
}

ModelFamily family_from_string(const std::string& name) {
  if (name == "two_tls") return ModelFamily::TwoTls;
  if (name == "two_osc") return ModelFamily::TwoOsc;
  if (name == "tls_osc") return ModelFamily::TlsOsc;
  if (name == "custom") return ModelFamily::Custom;
  throw std::invalid_argument("unknown model family '" + name + "'");
}

std::string format_float(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", value);
  return buf;
}

Matrix matrix_from_json(const nlohmann::json& entries, Eigen::Index dim) {
  if (!entries.is_array() || entries.size() != static_cast<std::size_t>(dim * dim)) {
    throw std::invalid_argument("matrix_from_json: need dim*dim [re, im] pairs");
  }
  Matrix m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      const auto& cell = entries[static_cast<std::size_t>(r * dim + c)];
      if (!cell.is_array() || cell.size() != 2) {
        throw std::invalid_argument("matrix_from_json: each entry must be [re, im]");
      }
      m(r, c) = complexd(cell[0].get<double>(), cell[1].get<double>());
    }
  }
  return m;
}

std::string matrix_to_json_string(const Matrix& m) {
  std::string out = "{\"dim\":" + std::to_string(m.rows()) + ",\"entries\":[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (r != 0 || c != 0) out += ',';
      out += '[';
      out += format_float(m(r, c).real());
      out += ',';
      out += format_float(m(r, c).imag());
      out += ']';
    }
  }
  out += "]}";
  return out;
}

ModelSpec model_spec_from_json(const nlohmann::json& j) {
  ModelSpec spec;
  spec.family = family_from_string(j.at("family").get<std::string>());
  if (j.contains("omega_a")) spec.omega_a = j.at("omega_a").get<double>();
  if (j.contains("omega_b")) spec.omega_b = j.at("omega_b").get<double>();
  if (j.contains("g")) {
    const auto& g = j.at("g");
    if (!g.is_array() || g.size() != 2) {
      throw std::invalid_argument("model json: g must be [re, im]");
    }
    spec.g = complexd(g[0].get<double>(), g[1].get<double>());
  }
  if (j.contains("delta_omega")) spec.delta_omega = j.at("delta_omega").get<double>();
  if (j.contains("lambda")) spec.lambda = j.at("lambda").get<double>();
  if (j.contains("cutoff")) spec.cutoff = j.at("cutoff").get<int>();
  if (j.contains("resonant")) spec.resonant = j.at("resonant").get<bool>();

  if (spec.family == ModelFamily::Custom) {
    const auto& custom = j.at("custom");
    for (const auto& d : custom.at("dims")) {
      spec.custom_dims.push_back(d.get<Eigen::Index>());
    }
    Eigen::Index total = 1;
    for (const auto d : spec.custom_dims) total *= d;
    spec.custom_h0 = matrix_from_json(custom.at("H0"), total);
    spec.custom_hi = matrix_from_json(custom.at("HI"), total);
  }
  return spec;
}

nlohmann::json model_spec_to_json(const ModelSpec& spec) {
  nlohmann::json j;
  j["family"] = family_to_string(spec.family);
  j["omega_a"] = spec.omega_a;
  j["omega_b"] = spec.omega_b;
  j["g"] = {spec.g.real(), spec.g.imag()};
  j["delta_omega"] = spec.delta_omega;
  j["lambda"] = spec.lambda;
  j["cutoff"] = spec.cutoff;
  j["resonant"] = spec.resonant;
  if (spec.family == ModelFamily::Custom) {
    nlohmann::json custom;
    custom["dims"] = spec.custom_dims;
    auto pack = [](const Matrix& m) {
      nlohmann::json entries = nlohmann::json::array();
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          entries.push_back({m(r, c).real(), m(r, c).imag()});
        }
      }
      return entries;
    };
    custom["H0"] = pack(spec.custom_h0);
    custom["HI"] = pack(spec.custom_hi);
    j["custom"] = custom;
  }
  return j;
}

}  // namespace effgibbs

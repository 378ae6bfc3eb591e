// JSON schema for model specifications and deterministic serialization of
// results. Matrices travel as row-major arrays of [re, im] pairs; all floats
// are emitted with 17 significant digits in scientific notation so identical
// inputs produce byte-identical files.
#pragma once

#include "effgibbs/models.hpp"

#include "json.hpp"

namespace effgibbs {

inline constexpr const char* kToolVersion = "1.0.0";

std::string family_to_string(ModelFamily family);
ModelFamily family_from_string(const std::string& name);

// Fixed "%.16e" rendering (17 significant digits).
std::string format_float(double value);

ModelSpec model_spec_from_json(const nlohmann::json& j);
nlohmann::json model_spec_to_json(const ModelSpec& spec);

Matrix matrix_from_json(const nlohmann::json& entries, Eigen::Index dim);

// Deterministic writer: {"dim": n, "entries": [[re, im], ...]} row-major.
std::string matrix_to_json_string(const Matrix& m);

}  // namespace effgibbs

// Self-verification suites: every module-level invariant runs as a named
// check with its measured deviation and tolerance. The CLI exposes these as
// `verify <suite>`; the acceptance tests reuse the same machinery.
#pragma once

#include "effgibbs/models.hpp"

namespace effgibbs::verify {

struct Check {
  std::string name;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct SuiteResult {
  std::string suite;
  std::vector<Check> checks;

  bool all_pass() const;
};

// pinching, bohr, cumulant, exact, thermo, meanforce, models.
const std::vector<std::string>& suite_names();

SuiteResult run_suite(const std::string& name, std::uint64_t seed);

// Every suite in declaration order.
std::vector<SuiteResult> run_all(std::uint64_t seed);

}  // namespace effgibbs::verify

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cartan {

struct Check {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct Report {
  std::string suite;
  std::vector<Check> checks;
  double max_residual = 0.0;
  bool pass = true;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  int samples = 200;
  // Name of a fixture to perturb, for exercising the failure path.
  std::string fault;
};

Report verify_core(const VerifyOptions& o = {});
Report verify_isometry(const VerifyOptions& o = {});
Report verify_appendix(const VerifyOptions& o = {});
// scope is core, isometry, appendix or all.
Report run_verify(const std::string& scope, const VerifyOptions& o = {});

std::string report_json(const Report& r);

}  // namespace cartan

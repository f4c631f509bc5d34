#pragma once

#include <map>
#include <string>
#include <vector>

#include "config.hpp"

namespace cavnet {

struct CommandOptions {
  std::string out_dir = ".";
  unsigned jobs = 0;  // 0: available parallelism
  bool seedless = false;
};

/// Human-readable text plus named numbers for programmatic checks.
struct Report {
  bool ok = true;
  std::string text;
  std::map<std::string, double> values;
  std::vector<std::string> files;  // written outputs, manifest last
};

Report cmd_validate(const RunConfig& config);
/// Closed-form vs numeric eigensystem of H_g; ok iff residual and eigenvalue
/// mismatch are both ≤ 1e−10.
Report cmd_eigencheck(double g);
Report cmd_run(const RunConfig& config, const CommandOptions& options);
Report cmd_sweep(const RunConfig& config, const CommandOptions& options);
Report cmd_compare(const RunConfig& config, const CommandOptions& options);
Report cmd_feasibility(const RunConfig& config, const CommandOptions& options);

}  // namespace cavnet

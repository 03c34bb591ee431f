#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "distvar/instance.hpp"

namespace distvar {

struct CliOptions {
  std::vector<std::string> tol_overrides;  // name=value
  int boundary_samples = 2048;
  std::string disc_samples = "64x256";
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::string format = "json";
};

// Throws InvalidInput for malformed flags.
Tolerances parse_tolerances(const std::vector<std::string>& overrides);
SampleGrid parse_grid(int boundary_samples, const std::string& disc_samples);

int cmd_variety(const std::string& psi_file, const CliOptions& opts);
int cmd_certify(const std::string& instance_file, const CliOptions& opts);
int cmd_demo(const CliOptions& opts);
int cmd_batch(int count, const CliOptions& opts);

// Full command line; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace distvar

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "snowembed/errors.hpp"

namespace snowembed::cli {

/// Resolved configuration of one run; the manifest echoes it in full so any
/// run can be replayed byte-identically.
struct RunConfig {
  std::string subcommand;

  // file handoff
  std::string space_path;
  std::string params_path;
  std::string embedding_path;
  std::string input_path;  // snowflake_of base space
  std::string out;         // single-artifact output override
  std::string out_dir;     // resolved from --out-dir or SNOWEMBED_OUT_DIR
  std::string csv;

  // generator
  std::string family = "interval";
  int size = 8;
  int depth = 3;
  int arms = 4;
  double alpha = 1.0;
  std::uint64_t seed = 0;

  // dimension estimation
  std::string what = "minkowski";
  std::vector<double> grid;
  bool normalize = false;
  bool no_spectrum_check = false;

  // space reading
  bool merge_duplicates = false;

  // parameter solving
  double epsilon = 0.75;
  double theta = 0.5;
  double delta = 1.2;
  double C = 1.0;
  std::string C_from;
  double diameter = 0.5;
  int n_offset = 1;
  double grid_step = 0.001;
  std::string mode = "strict";
  long long budget_cap = (1ll << 20);
  std::string log_base = "e";
  double tau = 0.0;       // practical override when > 0
  long long colors = 0;   // practical override when > 0
  int M = 0;              // practical override when > 0

  // nets / embedding / verification
  std::string net_order = "input";
  bool surrogate_threshold = false;
  bool dump_vectors = false;
  int threads = 1;
  std::string log_level = "warn";
};

Json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const Json& j);

/// Entry point. Returns 0 on success, 1 on validation errors, 2 on
/// mathematical failures (JSON diagnostics on standard error).
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace snowembed::cli

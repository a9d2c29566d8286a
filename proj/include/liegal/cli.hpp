// cli.hpp — command implementations behind the liegal tool
#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "liegal/io.hpp"

namespace liegal::cli {

// Exit codes: 0 = success / condition holds, 1 = condition fails or tolerance
// not met, 2 = configuration or input error.
inline constexpr int kOk = 0;
inline constexpr int kFailed = 1;
inline constexpr int kConfigError = 2;

struct RunConfig {
  std::string model;            // "well", "rotor", or empty when model_file given
  std::string model_file;
  double delta = 1.0;
  std::string bound = "symmetric";  // well bound kind
  int rotor_window = -1;            // -1: auto (n/4 - 1 for check on rotor at n = 4l+4)
  int n = 0;
  int big_n = 0;                // N for synthesis/simulation (0 -> 2n)
  std::string kind = "lgsc";    // check: lgcc | lgsc
  std::uint64_t seed = 1234;
  std::string out_dir;          // output directory (default ".")
  bool json_output = false;     // machine-readable stdout

  // tolerances / budgets
  double tol_rank = 1e-8;
  double tol_gap = 1e-9;
  double tol_steer = 5e-3;
  double tol_pulse = 0.02;
  double eps_track = 0.1;
  int budget_segments = 400;
  int budget_pulses = 1 << 17;
  int h = 8;
  int restarts = 4;

  // synthesize / simulate / track inputs
  std::string initial;          // "basis:k" or a JSON state file path
  std::string target;           // "basis:k" or a JSON state file path
  std::string target_unitary;   // JSON unitary file
  std::string curve_file;       // track: moduli or unitary samples
  std::string control_file;     // simulate: control.json from a synthesis run
  bool check_consistency = false;
  int consistency_n = 0;        // 0 -> 2N
};

int run_check(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_synthesize(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_track(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_models(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Resolve the configured model (built-in or file). Throws std::invalid_argument.
models::QuantumModel resolve_model(const RunConfig& cfg, int for_n = 0);

}  // namespace liegal::cli

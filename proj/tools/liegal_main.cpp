// liegal_main.cpp — command-line entry point
#include <iostream>

#include <CLI11.hpp>

#include "liegal/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Lie-Galerkin control toolkit: certify controllability conditions on truncations, "
      "synthesize piecewise-constant controls, and validate them on finer truncations"};
  app.require_subcommand(1);

  liegal::cli::RunConfig cfg;

  const auto add_common = [&cfg](CLI::App* cmd) {
    cmd->add_option("--model", cfg.model, "built-in model: well or rotor");
    cmd->add_option("--model-file", cfg.model_file, "JSON model description file");
    cmd->add_option("--delta", cfg.delta, "control bound amplitude (default 1)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--bound", cfg.bound, "well bound kind: symmetric or half");
    cmd->add_option("--rotor-window", cfg.rotor_window,
                    "rotor level reordering; default: auto for check, 0 otherwise");
    cmd->add_option("--n", cfg.n, "truncation level the condition is certified at");
    cmd->add_option("--N", cfg.big_n, "synthesis/validation truncation (default 2n)");
    cmd->add_option("--seed", cfg.seed, "seed recorded in outputs and used by steering");
    cmd->add_option("--out", cfg.out_dir, "output directory (default .)");
    cmd->add_flag("--json", cfg.json_output, "machine-readable stdout");
    cmd->add_option("--tol-rank", cfg.tol_rank, "closure rank tolerance");
    cmd->add_option("--tol-gap", cfg.tol_gap, "spectral gap clustering tolerance");
    cmd->add_option("--tol-steer", cfg.tol_steer, "steering distance target");
    cmd->add_option("--tol-pulse", cfg.tol_pulse, "pulse-train moment defect tolerance");
    cmd->add_option("--budget-segments", cfg.budget_segments, "steering segment budget");
    cmd->add_option("--budget-pulses", cfg.budget_pulses, "pulse count cap per train");
    cmd->add_option("--refine", cfg.h, "refinement index h: pulses per train scale with it");
    cmd->add_option("--restarts", cfg.restarts, "steering restarts");
  };

  CLI::App* check = app.add_subcommand("check", "certify LGCC/LGSC at truncation n");
  add_common(check);
  check->add_option("--kind", cfg.kind, "condition kind: lgcc or lgsc (default lgsc)");

  CLI::App* synthesize =
      app.add_subcommand("synthesize", "plan and realize a control for a transfer or unitary");
  add_common(synthesize);
  synthesize->add_option("--kind", cfg.kind, "condition kind to certify first (default lgsc)");
  synthesize->add_option("--initial", cfg.initial, "initial state: basis:k or a JSON file");
  synthesize->add_option("--target", cfg.target, "target state: basis:k or a JSON file");
  synthesize->add_option("--target-unitary", cfg.target_unitary, "target unitary JSON file");

  CLI::App* simulate = app.add_subcommand("simulate", "propagate a synthesized control");
  add_common(simulate);
  simulate->add_option("--control", cfg.control_file, "control.json from a synthesis run")
      ->required();
  simulate->add_option("--initial", cfg.initial, "initial state (default basis:1)");
  simulate->add_option("--target", cfg.target, "report fidelity to this state");
  simulate->add_flag("--check-consistency", cfg.check_consistency,
                     "re-propagate on a finer truncation and report leakage");
  simulate->add_option("--consistency-N", cfg.consistency_n,
                       "finer truncation for --check-consistency (default 2N)");

  CLI::App* track = app.add_subcommand("track", "follow a modulus or unitary curve");
  add_common(track);
  track->add_option("--curve", cfg.curve_file, "curve samples JSON file")->required();
  track->add_option("--initial", cfg.initial, "initial state (default basis:1)");
  track->add_option("--eps", cfg.eps_track, "modulus tracking tolerance");

  CLI::App* models_cmd =
      app.add_subcommand("models", "list built-in models or dump one as JSON");
  add_common(models_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? liegal::cli::kOk : liegal::cli::kConfigError;
  }

  if (check->parsed()) return liegal::cli::run_check(cfg, std::cout, std::cerr);
  if (synthesize->parsed()) return liegal::cli::run_synthesize(cfg, std::cout, std::cerr);
  if (simulate->parsed()) return liegal::cli::run_simulate(cfg, std::cout, std::cerr);
  if (track->parsed()) return liegal::cli::run_track(cfg, std::cout, std::cerr);
  if (models_cmd->parsed()) return liegal::cli::run_models(cfg, std::cout, std::cerr);
  return liegal::cli::kConfigError;
}

// cli.cpp — command implementations behind the liegal tool
#include "liegal/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "liegal/liealg.hpp"
#include "liegal/planner.hpp"
#include "liegal/propagate.hpp"
#include "liegal/synth.hpp"

namespace liegal::cli {

using nlohmann::json;

namespace {

// Configuration / input problems map to exit code 2; everything else that the
// pipeline reports (condition fails, tolerance not met) maps to exit code 1.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

liealg::ConditionKind parse_kind(const std::string& kind) {
  if (kind == "lgcc") return liealg::ConditionKind::lgcc;
  if (kind == "lgsc") return liealg::ConditionKind::lgsc;
  throw ConfigError("unknown condition kind '" + kind + "' (use lgcc or lgsc)");
}

// "basis:k" (1-based) or a JSON state file; result is normalized.
Vector parse_state(const std::string& spec) {
  if (spec.empty()) throw ConfigError("missing state (use basis:k or a JSON file path)");
  if (spec.rfind("basis:", 0) == 0) {
    int k = 0;
    try {
      k = std::stoi(spec.substr(6));
    } catch (const std::exception&) {
      throw ConfigError("malformed basis state '" + spec + "'");
    }
    if (k < 1) throw ConfigError("basis index must be >= 1 in '" + spec + "'");
    Vector v = Vector::Zero(k);
    v[k - 1] = 1.0;
    return v;
  }
  Vector v = io::state_from_json_text(io::read_file(spec));
  const double norm = v.norm();
  if (norm < 1e-12) throw ConfigError("state '" + spec + "' has (near-)zero norm");
  return v / norm;
}

// Zero-pad to n levels, or drop an (almost) unpopulated tail.
Vector pad_state(const Vector& v, int n) {
  if (v.size() == n) return v;
  if (v.size() < n) {
    Vector out = Vector::Zero(n);
    out.head(v.size()) = v;
    return out;
  }
  const double tail = propagate::leakage(v, n);
  if (tail > 1e-9)
    throw ConfigError("state occupies levels above the truncation n=" + std::to_string(n));
  Vector out = v.head(n);
  return out / out.norm();
}

RealVector pad_moduli(const RealVector& row, int n) {
  if (row.size() == n) return row;
  if (row.size() < n) {
    RealVector out = RealVector::Zero(n);
    out.head(row.size()) = row;
    return out;
  }
  if (row.tail(row.size() - n).norm() > 1e-6)
    throw ConfigError("modulus curve occupies levels above the truncation n=" + std::to_string(n));
  return row.head(n);
}

// Validate unitarity and embed into the leading block of an n x n identity.
Matrix embed_unitary(const Matrix& u, int n) {
  if (u.rows() != u.cols()) throw ConfigError("target unitary must be square");
  if (u.rows() > n)
    throw ConfigError("target unitary is larger than the certified truncation n=" +
                      std::to_string(n));
  const Eigen::Index m = u.rows();
  if ((u.adjoint() * u - Matrix::Identity(m, m)).norm() > 1e-8 * static_cast<double>(m))
    throw ConfigError("target matrix is not unitary (tolerance 1e-8)");
  Matrix out = Matrix::Identity(n, n);
  out.topLeftCorner(m, m) = u;
  return out;
}

// Phase-invariant distance used by the steering metric (full-unitary form).
double phase_invariant_distance(const Matrix& target, const Matrix& got) {
  const double f = std::abs((target.adjoint() * got).trace());
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * f / static_cast<double>(target.rows())));
}

std::string output_path(const RunConfig& cfg, const std::string& name) {
  const std::string dir = cfg.out_dir.empty() ? "." : cfg.out_dir;
  std::filesystem::create_directories(dir);
  return dir + "/" + name;
}

json populations_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) arr.push_back(std::norm(v[k]));
  return arr;
}

json condition_json(const liealg::ConditionReport& rep, const std::string& model_name,
                    const std::string& kind) {
  return json{{"model", model_name},
              {"kind", kind},
              {"n", rep.n},
              {"holds", rep.holds},
              {"closure_dim", rep.closure_dim},
              {"expected_dim", rep.expected_dim},
              {"max_su_residual", rep.max_su_residual},
              {"rank_tol", rep.rank_tol},
              {"generators", rep.generator_labels},
              {"caveats", rep.caveats},
              {"certificate", rep.words}};
}

json plan_json(const planner::GeneratorSchedule& plan) {
  json segs = json::array();
  for (const auto& seg : plan.segments)
    segs.push_back(json{{"label", seg.label}, {"duration", seg.duration}});
  return json{{"segments", std::move(segs)}, {"duration", plan.total_duration()}};
}

json schedule_summary_json(const synth::InteractionSchedule& sched) {
  json reports = json::array();
  for (const auto& r : sched.reports)
    reports.push_back(json{{"label", r.label},
                           {"duration", r.duration},
                           {"pulses", r.pulses},
                           {"active_defect", r.active_defect},
                           {"worst_suppressed", r.worst_suppressed},
                           {"theta_defect", r.theta_defect}});
  return json{{"intervals", sched.intervals.size()},
              {"trains", sched.trains.size()},
              {"total_duration", sched.total_duration},
              {"omega_end", sched.omega_end},
              {"worst_theta_defect", sched.worst_theta_defect},
              {"reports", std::move(reports)}};
}

json physical_summary_json(const synth::PhysicalControl& phys,
                           const std::vector<models::ControlBound>& bounds,
                           double schedule_duration, bool* l1_ok_out) {
  bool l1_ok = true;
  for (std::size_t j = 0; j < phys.l1_norms.size(); ++j) {
    const double cap = (j < bounds.size() ? bounds[j].delta : 1.0) * schedule_duration;
    if (phys.l1_norms[j] > cap + 1e-9) l1_ok = false;
  }
  if (l1_ok_out) *l1_ok_out = l1_ok;
  return json{{"duration", phys.total_duration},
              {"intervals", phys.intervals.size()},
              {"l1_norms", phys.l1_norms},
              {"l1_within_delta_T", l1_ok}};
}

// Smallest n' >= n0 (within `span` extra levels) at which the condition holds.
struct Certification {
  int n = 0;
  liealg::ConditionReport report;
  bool holds = false;
};

Certification certify_from(const models::QuantumModel& model, int n0, int span,
                           liealg::ConditionKind kind, const RunConfig& cfg) {
  Certification cert;
  for (int n = n0; n <= n0 + span; ++n) {
    cert.report = liealg::check_condition(model, n, kind, cfg.tol_rank, cfg.tol_gap);
    cert.n = n;
    if (cert.report.holds) {
      cert.holds = true;
      break;
    }
  }
  return cert;
}

}  // namespace

models::QuantumModel resolve_model(const RunConfig& cfg, int for_n) {
  if (!cfg.model_file.empty()) return models::load_model(cfg.model_file);
  if (cfg.model == "well") {
    if (cfg.bound == "symmetric") return models::well_model(cfg.delta, models::BoundKind::symmetric);
    if (cfg.bound == "half") return models::well_model(cfg.delta, models::BoundKind::half);
    throw ConfigError("unknown bound kind '" + cfg.bound + "' (use symmetric or half)");
  }
  if (cfg.model == "rotor") {
    int window = cfg.rotor_window;
    if (window < 0) window = (for_n >= 8 && for_n % 4 == 0) ? for_n / 4 - 1 : 0;
    return models::rotor_model(cfg.delta, window);
  }
  if (cfg.model.empty())
    throw ConfigError("no model selected: pass --model well|rotor or --model-file <path>");
  throw ConfigError("unknown model '" + cfg.model + "' (built-ins: well, rotor)");
}

int run_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.n < 2) throw ConfigError("check: pass --n >= 2");
    const liealg::ConditionKind kind = parse_kind(cfg.kind);
    const models::QuantumModel model = resolve_model(cfg, cfg.n);
    const liealg::ConditionReport rep =
        liealg::check_condition(model, cfg.n, kind, cfg.tol_rank, cfg.tol_gap);
    json j = condition_json(rep, model.name, cfg.kind);
    j["command"] = "check";
    j["seed"] = cfg.seed;
    if (!cfg.out_dir.empty()) io::write_file(output_path(cfg, "check_report.json"), j.dump(2) + "\n");
    if (cfg.json_output) {
      out << j.dump(2) << "\n";
    } else {
      out << cfg.kind << " at n=" << rep.n << " on " << model.name << ": "
          << (rep.holds ? "holds" : "FAILS") << "\n"
          << "closure dim " << rep.closure_dim << " of " << rep.expected_dim
          << " (max su residual " << rep.max_su_residual << ", rank tol " << rep.rank_tol
          << ")\n";
      for (const auto& c : rep.caveats) out << "note: " << c << "\n";
    }
    return rep.holds ? kOk : kFailed;
  } catch (const std::exception& e) {
    err << "check: " << e.what() << "\n";
    return kConfigError;
  }
}

int run_models(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (!cfg.model.empty() || !cfg.model_file.empty()) {
      const models::QuantumModel model = resolve_model(cfg, 0);
      const int levels = cfg.n > 0 ? cfg.n : 8;
      const std::string text = models::model_to_json_text(model, levels);
      if (!cfg.out_dir.empty()) io::write_file(output_path(cfg, "model.json"), text);
      out << text;
      return kOk;
    }
    json list = json::array();
    list.push_back(json{
        {"name", "well"},
        {"controls", 1},
        {"description",
         "particle in a box on (-1/2, 1/2): lambda_k = -k^2 pi^2 / 2, dipole control x; "
         "--bound symmetric ([-delta, delta]) or half ([0, delta])"}});
    list.push_back(json{
        {"name", "rotor"},
        {"controls", 3},
        {"description",
         "rigid rotor: lambda_(l,m) = -l(l+1) with multiplicity 2l+1, three orthogonal dipole "
         "controls; --rotor-window w reorders levels w, w+1, ... first"}});
    if (cfg.json_output) {
      out << list.dump(2) << "\n";
    } else {
      for (const auto& m : list)
        out << m.at("name").get<std::string>() << " (" << m.at("controls").get<int>()
            << " control(s)): " << m.at("description").get<std::string>() << "\n";
    }
    return kOk;
  } catch (const std::exception& e) {
    err << "models: " << e.what() << "\n";
    return kConfigError;
  }
}

int run_synthesize(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.n < 2) throw ConfigError("synthesize: pass --n >= 2");
    const models::QuantumModel model = resolve_model(cfg);
    const liealg::ConditionKind kind = parse_kind(cfg.kind);
    const int requested_n = cfg.n;
    const int span = 8;

    // --- inputs
    const bool unitary_mode = !cfg.target_unitary.empty();
    Vector psi0, psit;
    Matrix target_u;
    if (unitary_mode) {
      target_u = io::matrix_from_json_text(io::read_file(cfg.target_unitary));
    } else {
      if (cfg.initial.empty() || cfg.target.empty())
        throw ConfigError("synthesize: pass --initial and --target, or --target-unitary");
      psi0 = parse_state(cfg.initial);
      psit = parse_state(cfg.target);
    }
    bool trivial = false;
    if (unitary_mode) {
      trivial = (target_u - Matrix::Identity(target_u.rows(), target_u.cols())).norm() < 1e-12;
    } else {
      const int m = static_cast<int>(std::max(psi0.size(), psit.size()));
      trivial = std::abs(pad_state(psi0, m).dot(pad_state(psit, m))) > 1.0 - 1e-12;
    }

    // --- certification, escalating n until the condition holds and the lift fits
    Certification cert = certify_from(model, requested_n, span, kind, cfg);
    Matrix steer_target;
    int columns = 0;
    for (int rounds = 0; cert.holds; ++rounds) {
      if (rounds > 8) throw std::runtime_error("synthesize: target lift did not stabilize");
      if (unitary_mode) {
        steer_target = embed_unitary(target_u, cert.n);
        break;
      }
      const planner::LiftResult lift = planner::lift_target({psi0}, {psit}, cert.n, 0.05);
      if (lift.n <= cert.n) {
        steer_target = lift.g;
        columns = 1;
        break;
      }
      cert = certify_from(model, lift.n, span, kind, cfg);
    }
    if (!cert.holds) {
      json j = condition_json(cert.report, model.name, cfg.kind);
      j["command"] = "synthesize";
      err << "synthesize: " << cfg.kind << " does not hold for n up to " << cert.n
          << "; refusing\n";
      out << j.dump(2) << "\n";
      return kFailed;
    }
    const int n = cert.n;
    const int big_n = cfg.big_n > 0 ? cfg.big_n : 2 * n;
    if (big_n < n) throw ConfigError("synthesize: --N must be >= the certified truncation n");

    // --- plan over the realizable family
    const double w = synth::varpi(1e-12).value;
    const liealg::GeneratorFamily fam_small = liealg::assemble_w(model, n, w, cfg.tol_gap);
    planner::SteerResult steer;
    if (trivial) {
      steer.converged = true;
    } else {
      planner::SteerOptions sopts;
      sopts.tol = cfg.tol_steer;
      sopts.budget = cfg.budget_segments;
      sopts.restarts = cfg.restarts;
      sopts.seed = cfg.seed;
      sopts.columns = columns;
      steer = planner::steer_su(fam_small, steer_target, sopts);
    }

    // --- realize as pulse trains + physical control
    const liealg::GeneratorFamily fam_big =
        liealg::assemble_w_extended(model, n, big_n, w, cfg.tol_gap);
    synth::SynthOptions sopts;
    sopts.h = cfg.h;
    sopts.train_tol = cfg.tol_pulse;
    sopts.k_cap = cfg.budget_pulses;
    bool synth_ok = true;
    std::string synth_message;
    synth::InteractionSchedule sched;
    try {
      sched = synth::schedule_from_generators(fam_big, steer.schedule, big_n, sopts);
    } catch (const std::exception& e) {
      synth_ok = false;
      synth_message = e.what();
    }

    json manifest{{"command", "synthesize"},
                  {"model", model.name},
                  {"kind", cfg.kind},
                  {"seed", cfg.seed},
                  {"config",
                   {{"n_requested", requested_n},
                    {"n_certified", n},
                    {"N", big_n},
                    {"h", cfg.h},
                    {"delta", cfg.delta},
                    {"tol_rank", cfg.tol_rank},
                    {"tol_gap", cfg.tol_gap},
                    {"tol_steer", cfg.tol_steer},
                    {"budget_segments", cfg.budget_segments},
                    {"budget_pulses", cfg.budget_pulses},
                    {"restarts", cfg.restarts}}},
                  {"condition", condition_json(cert.report, model.name, cfg.kind)},
                  {"plan", plan_json(steer.schedule)}};
    manifest["plan"]["steering_distance"] = steer.achieved;
    manifest["plan"]["converged"] = steer.converged;
    manifest["plan"]["metric"] = columns > 0 ? "columns:1" : "full";

    if (!synth_ok) {
      manifest["conforming"] = false;
      manifest["error"] = synth_message;
      io::write_file(output_path(cfg, "manifest.json"), manifest.dump(2) + "\n");
      if (cfg.json_output) out << manifest.dump(2) << "\n";
      err << "synthesize: pulse-train realization failed: " << synth_message << "\n";
      return kFailed;
    }

    const synth::PhysicalControl phys = synth::to_physical(sched);
    const galerkin::TruncatedSystem big_sys = galerkin::truncate(model, big_n);

    // --- fidelity bookkeeping
    json fidelity;
    if (unitary_mode) {
      propagate::InteractionOptions popts;
      popts.keep_propagators = true;
      const Vector y0 = Vector::Unit(big_n, 0);
      const auto rec = propagate::propagate_interaction(big_sys, sched, y0, popts);
      const Matrix realized = rec.propagators.empty()
                                  ? Matrix::Identity(big_n, big_n)
                                  : rec.propagators.back();
      const Matrix cropped = galerkin::crop(realized, n);
      fidelity["plan_distance"] = steer.achieved;
      fidelity["interaction_crop_distance"] = phase_invariant_distance(steer_target, cropped);
      fidelity["max_unitarity_defect"] = rec.max_unitarity_defect;
    } else {
      const Vector start = pad_state(psi0, big_n);
      const Vector want = pad_state(psit, big_n);
      const auto rec = propagate::propagate_physical(big_sys, phys, start);
      const Vector& psi_final = rec.states.back();
      const Matrix flow = trivial ? Matrix::Identity(n, n)
                                  : planner::schedule_flow(fam_small, steer.schedule);
      const Vector plan_final = flow * pad_state(psi0, n);
      fidelity["plan"] = std::norm(pad_state(psit, n).dot(plan_final));
      fidelity["simulated"] = std::norm(want.dot(psi_final));
      fidelity["modulus_distance"] = propagate::modulus_distance(psi_final, want);
      fidelity["final_populations"] = populations_json(psi_final);
      fidelity["max_unitarity_defect"] = rec.max_unitarity_defect;
    }

    bool l1_ok = true;
    manifest["schedule"] = schedule_summary_json(sched);
    manifest["physical"] = physical_summary_json(phys, model.bounds, sched.total_duration, &l1_ok);
    manifest["fidelity"] = fidelity;
    const bool conforming = steer.converged && l1_ok;
    manifest["conforming"] = conforming;

    io::SynthesizedControl control;
    control.model_name = model.name;
    control.n = n;
    control.big_n = big_n;
    for (const auto& g : fam_big.gens) control.generator_labels.push_back(g.label);
    control.plan = steer.schedule;
    control.schedule = sched;
    control.physical = phys;
    io::write_file(output_path(cfg, "control.json"), io::control_to_json_text(control));
    io::write_file(output_path(cfg, "control.csv"), io::control_to_csv_text(phys));
    io::write_file(output_path(cfg, "manifest.json"), manifest.dump(2) + "\n");

    if (cfg.json_output) {
      out << manifest.dump(2) << "\n";
    } else {
      out << "certified " << cfg.kind << " at n=" << n << " (requested " << requested_n << ")\n"
          << "plan: " << steer.schedule.segments.size() << " segment(s), duration "
          << steer.schedule.total_duration() << ", steering distance " << steer.achieved << "\n"
          << "schedule: " << sched.intervals.size() << " interval(s), worst theta defect "
          << sched.worst_theta_defect << "\n"
          << "physical: duration " << phys.total_duration << ", L1 within delta*T: "
          << (l1_ok ? "yes" : "NO") << "\n";
      if (!unitary_mode)
        out << "fidelity: simulated " << fidelity["simulated"].get<double>() << " (plan "
            << fidelity["plan"].get<double>() << ")\n";
      out << "conforming: " << (conforming ? "yes" : "NO") << "\n";
    }
    return conforming ? kOk : kFailed;
  } catch (const std::exception& e) {
    err << "synthesize: " << e.what() << "\n";
    return kConfigError;
  }
}

int run_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.control_file.empty()) throw ConfigError("simulate: pass --control <control.json>");
    const io::SynthesizedControl control =
        io::control_from_json_text(io::read_file(cfg.control_file));
    // default to the model the control was synthesized for
    RunConfig mcfg = cfg;
    if (mcfg.model.empty() && mcfg.model_file.empty()) mcfg.model = control.model_name;
    const models::QuantumModel model = resolve_model(mcfg);
    if (!control.model_name.empty() && model.name != control.model_name)
      err << "simulate: warning: control file was synthesized for model '" << control.model_name
          << "', simulating on '" << model.name << "'\n";
    const int big_n = cfg.big_n > 0 ? cfg.big_n
                                    : (control.big_n > 0 ? control.big_n : 2 * control.n);
    const galerkin::TruncatedSystem sys = galerkin::truncate(model, big_n);
    const Vector psi0 =
        pad_state(parse_state(cfg.initial.empty() ? "basis:1" : cfg.initial), big_n);

    const auto rec = propagate::propagate_physical(sys, control.physical, psi0);
    io::write_file(output_path(cfg, "trajectory.csv"), io::trajectory_to_csv_text(rec));

    const Vector& psi_final = rec.states.back();
    json summary{{"command", "simulate"},
                 {"model", model.name},
                 {"N", big_n},
                 {"seed", cfg.seed},
                 {"duration", control.physical.total_duration},
                 {"samples", rec.times.size()},
                 {"max_unitarity_defect", rec.max_unitarity_defect},
                 {"final_populations", populations_json(psi_final)}};
    if (!cfg.target.empty()) {
      const Vector want = pad_state(parse_state(cfg.target), big_n);
      summary["fidelity"] = std::norm(want.dot(psi_final));
      summary["modulus_distance"] = propagate::modulus_distance(psi_final, want);
    }
    if (cfg.check_consistency) {
      const int n2 = cfg.consistency_n > 0 ? cfg.consistency_n : 2 * big_n;
      if (n2 <= big_n) throw ConfigError("simulate: consistency level must exceed N");
      const auto crep = propagate::galerkin_consistency(model, control.physical, psi0, big_n, n2);
      summary["consistency"] = json{{"n1", crep.n1},
                                    {"n2", crep.n2},
                                    {"max_leakage", crep.max_leakage},
                                    {"max_state_gap", crep.max_state_gap}};
    }
    io::write_file(output_path(cfg, "simulate_report.json"), summary.dump(2) + "\n");
    if (cfg.json_output) {
      out << summary.dump(2) << "\n";
    } else {
      out << "simulated " << rec.times.size() << " sample(s) over duration "
          << control.physical.total_duration << " at N=" << big_n << "\n"
          << "max unitarity defect " << rec.max_unitarity_defect << "\n";
      if (summary.contains("fidelity"))
        out << "fidelity to target: " << summary["fidelity"].get<double>() << "\n";
      if (summary.contains("consistency"))
        out << "consistency at N=" << summary["consistency"]["n2"].get<int>() << ": leakage "
            << summary["consistency"]["max_leakage"].get<double>() << ", state gap "
            << summary["consistency"]["max_state_gap"].get<double>() << "\n";
    }
    return kOk;
  } catch (const std::exception& e) {
    err << "simulate: " << e.what() << "\n";
    return kConfigError;
  }
}

int run_track(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.curve_file.empty()) throw ConfigError("track: pass --curve <samples.json>");
    const io::CurveSamples curve = io::curve_from_json_text(io::read_file(cfg.curve_file));
    const models::QuantumModel model = resolve_model(cfg);
    const int curve_dim = curve.is_moduli ? static_cast<int>(curve.moduli.front().size())
                                          : static_cast<int>(curve.unitaries.front().rows());
    const int n0 = std::max(cfg.n >= 2 ? cfg.n : 2, curve_dim);

    // stalking requires the LGSC
    const Certification cert = certify_from(model, n0, 8, liealg::ConditionKind::lgsc, cfg);
    if (!cert.holds) {
      json j = condition_json(cert.report, model.name, "lgsc");
      j["command"] = "track";
      err << "track: lgsc does not hold for n up to " << cert.n << "; refusing\n";
      out << j.dump(2) << "\n";
      return kFailed;
    }
    const int n = cert.n;
    const int big_n = cfg.big_n > 0 ? cfg.big_n : 2 * n;
    if (big_n < n) throw ConfigError("track: --N must be >= the certified truncation n");

    const Vector psi0 =
        pad_state(parse_state(cfg.initial.empty() ? "basis:1" : cfg.initial), n);

    // lift the curve to unitaries at the certified level
    std::vector<Matrix> gcurve;
    std::vector<RealVector> target_moduli;
    if (curve.is_moduli) {
      std::vector<RealVector> rows;
      rows.reserve(curve.moduli.size());
      for (const auto& row : curve.moduli) rows.push_back(pad_moduli(row, n));
      gcurve = planner::lift_moduli_curve(rows, psi0);
      target_moduli = std::move(rows);
    } else {
      gcurve.reserve(curve.unitaries.size());
      for (const auto& u : curve.unitaries) gcurve.push_back(embed_unitary(u, n));
      for (const auto& g : gcurve) target_moduli.push_back((g * psi0).cwiseAbs());
    }

    const double w = synth::varpi(1e-12).value;
    const liealg::GeneratorFamily fam_small = liealg::assemble_w(model, n, w, cfg.tol_gap);
    planner::TrackOptions topts;
    topts.eps = cfg.eps_track;
    topts.budget_per_step = cfg.budget_segments;
    topts.seed = cfg.seed;
    topts.restarts = cfg.restarts;
    const planner::TrackingPlan plan = planner::track_su(fam_small, gcurve, curve.times, topts);

    const liealg::GeneratorFamily fam_big =
        liealg::assemble_w_extended(model, n, big_n, w, cfg.tol_gap);
    synth::SynthOptions sopts;
    sopts.h = cfg.h;
    sopts.train_tol = cfg.tol_pulse;
    sopts.k_cap = cfg.budget_pulses;
    const synth::InteractionSchedule sched =
        synth::schedule_from_generators(fam_big, plan.schedule, big_n, sopts);
    const synth::PhysicalControl phys = synth::to_physical(sched);

    // schedule-clock boundary realizing each curve sample: count plan segments
    // consumed up to tau_i, then read the recorded end of the last one
    std::vector<double> boundaries;
    {
      std::size_t m = 0;
      double cum = 0.0;
      for (double tau : plan.tau) {
        while (m < plan.schedule.segments.size() &&
               cum + plan.schedule.segments[m].duration <= tau + 1e-9 * (1.0 + tau)) {
          cum += plan.schedule.segments[m].duration;
          ++m;
        }
        boundaries.push_back(m == 0 ? 0.0 : sched.segment_ends[m - 1]);
      }
    }

    // interaction replay at the N-level truncation, sampled at the boundaries
    const galerkin::TruncatedSystem big_sys = galerkin::truncate(model, big_n);
    propagate::InteractionOptions popts;
    popts.sample_times = boundaries;
    const Vector y0 = pad_state(psi0, big_n);
    const auto rec = propagate::propagate_interaction(big_sys, sched, y0, popts);

    const auto find_time = [&rec](double t) -> Eigen::Index {
      for (std::size_t i = 0; i < rec.times.size(); ++i)
        if (std::abs(rec.times[i] - t) <= 1e-9 * (1.0 + std::abs(t)))
          return static_cast<Eigen::Index>(i);
      throw std::runtime_error("track: sample time missing from the trajectory record");
    };
    const auto physical_time = [&phys, &sched](double t) -> double {
      for (std::size_t k = 0; k < phys.intervals.size(); ++k)
        if (std::abs(phys.schedule_times[k] - t) <= 1e-9 * (1.0 + std::abs(t)))
          return phys.intervals[k].s0;
      if (!phys.schedule_times.empty() &&
          std::abs(phys.schedule_times.back() - t) <= 1e-9 * (1.0 + std::abs(t)))
        return phys.total_duration;
      (void)sched;
      return -1.0;  // boundary inside a merged interval; not expected
    };

    json samples = json::array();
    double max_distance = 0.0;
    for (std::size_t i = 0; i < boundaries.size(); ++i) {
      const Eigen::Index at = find_time(boundaries[i]);
      const Vector& y = rec.states[at];
      Vector want = Vector::Zero(big_n);
      want.head(n) = target_moduli[i];
      const double dist = propagate::modulus_distance(y, want);
      max_distance = std::max(max_distance, dist);
      json row{{"t", curve.times[i]},
               {"tau_plan", plan.tau[i]},
               {"tau_schedule", boundaries[i]},
               {"s_physical", physical_time(boundaries[i])},
               {"distance", dist},
               {"realized_populations", populations_json(y)}};
      samples.push_back(std::move(row));
    }

    const bool conforming = max_distance < cfg.eps_track;
    json report{{"command", "track"},
                {"model", model.name},
                {"seed", cfg.seed},
                {"config",
                 {{"n", n},
                  {"N", big_n},
                  {"eps", cfg.eps_track},
                  {"h", cfg.h},
                  {"budget_segments", cfg.budget_segments},
                  {"restarts", cfg.restarts}}},
                {"condition", condition_json(cert.report, model.name, "lgsc")},
                {"plan", plan_json(plan.schedule)},
                {"worst_step_error", plan.worst_step_error},
                {"step_errors", plan.step_errors},
                {"schedule", schedule_summary_json(sched)},
                {"samples", std::move(samples)},
                {"max_modulus_distance", max_distance},
                {"max_unitarity_defect", rec.max_unitarity_defect},
                {"conforming", conforming}};
    bool l1_ok = true;
    report["physical"] = physical_summary_json(phys, model.bounds, sched.total_duration, &l1_ok);

    io::SynthesizedControl control;
    control.model_name = model.name;
    control.n = n;
    control.big_n = big_n;
    for (const auto& g : fam_big.gens) control.generator_labels.push_back(g.label);
    control.plan = plan.schedule;
    control.schedule = sched;
    control.physical = phys;
    io::write_file(output_path(cfg, "control.json"), io::control_to_json_text(control));
    io::write_file(output_path(cfg, "control.csv"), io::control_to_csv_text(phys));
    io::write_file(output_path(cfg, "tracking_report.json"), report.dump(2) + "\n");

    if (cfg.json_output) {
      out << report.dump(2) << "\n";
    } else {
      out << "tracked " << curve.times.size() << " sample(s) at n=" << n << ", N=" << big_n
          << "\n"
          << "plan: " << plan.schedule.segments.size() << " segment(s), worst step error "
          << plan.worst_step_error << "\n"
          << "max modulus distance " << max_distance << " (eps " << cfg.eps_track << ")\n"
          << "conforming: " << (conforming ? "yes" : "NO") << "\n";
    }
    return conforming ? kOk : kFailed;
  } catch (const std::exception& e) {
    err << "track: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace liegal::cli

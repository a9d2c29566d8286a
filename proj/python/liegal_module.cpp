// liegal_module.cpp — pybind11 bindings for the certification/synthesis toolkit
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "liegal/io.hpp"
#include "liegal/liealg.hpp"
#include "liegal/planner.hpp"

namespace py = pybind11;
using namespace liegal;

namespace {

models::BoundKind parse_bound(const std::string& s) {
  if (s == "symmetric") return models::BoundKind::symmetric;
  if (s == "half") return models::BoundKind::half;
  throw std::invalid_argument("bound must be 'symmetric' or 'half'");
}

liealg::ConditionKind parse_kind(const std::string& s) {
  if (s == "lgcc") return liealg::ConditionKind::lgcc;
  if (s == "lgsc") return liealg::ConditionKind::lgsc;
  throw std::invalid_argument("kind must be 'lgcc' or 'lgsc'");
}

Vector basis_state(int level, int dim) {
  if (level < 1 || level > dim)
    throw std::invalid_argument("basis level out of range for dimension " + std::to_string(dim));
  Vector v = Vector::Zero(dim);
  v[level - 1] = 1.0;
  return v;
}

// int -> basis state, otherwise a coefficient vector (normalized).
Vector parse_state(const py::object& spec, int dim) {
  if (py::isinstance<py::int_>(spec)) return basis_state(spec.cast<int>(), dim);
  Vector v = spec.cast<Vector>();
  if (v.size() > dim)
    throw std::invalid_argument("state has more coefficients than the truncation holds");
  const double norm = v.norm();
  if (norm == 0.0) throw std::invalid_argument("state has zero norm");
  Vector out = Vector::Zero(dim);
  out.head(v.size()) = v / norm;
  return out;
}

Vector pad_state(const Vector& v, int dim) {
  Vector out = Vector::Zero(dim);
  out.head(v.size()) = v;
  return out;
}

std::vector<double> populations(const Vector& v) {
  std::vector<double> p(static_cast<size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) p[static_cast<size_t>(i)] = std::norm(v[i]);
  return p;
}

py::dict report_dict(const liealg::ConditionReport& rep) {
  py::dict d;
  d["kind"] = rep.kind == liealg::ConditionKind::lgcc ? "lgcc" : "lgsc";
  d["n"] = rep.n;
  d["holds"] = rep.holds;
  d["closure_dim"] = rep.closure_dim;
  d["expected_dim"] = rep.expected_dim;
  d["max_su_residual"] = rep.max_su_residual;
  d["generator_labels"] = rep.generator_labels;
  d["caveats"] = rep.caveats;
  d["certificate_words"] = rep.words;
  return d;
}

// Certify the stalking condition at the smallest n' >= n where it holds.
liealg::ConditionReport certify(const models::QuantumModel& model, int n, double rank_tol,
                                double gap_tol, int rounds = 8) {
  liealg::ConditionReport rep;
  for (int i = 0; i < rounds; ++i) {
    rep = liealg::check_condition(model, n + i, liealg::ConditionKind::lgsc, rank_tol, gap_tol);
    if (rep.holds) return rep;
  }
  throw std::runtime_error("stalking condition failed up to n=" + std::to_string(rep.n));
}

py::dict synthesize_transfer(const models::QuantumModel& model, int n, const py::object& initial,
                             const py::object& target, int big_n, std::uint64_t seed, int h,
                             double tol_steer, double tol_pulse, int budget_segments,
                             int budget_pulses, int restarts, double rank_tol, double gap_tol) {
  if (n < 2) throw std::invalid_argument("synthesize_transfer: n must be >= 2");

  // certify, lifting the target to the certified truncation until both agree
  liealg::ConditionReport rep = certify(model, n, rank_tol, gap_tol);
  int nc = rep.n;
  planner::LiftResult lift;
  for (int round = 0; round < 8; ++round) {
    lift = planner::lift_target({parse_state(initial, nc)}, {parse_state(target, nc)}, nc, 0.05);
    if (lift.n == nc) break;
    rep = certify(model, lift.n, rank_tol, gap_tol);
    nc = rep.n;
  }
  const Vector psi0 = parse_state(initial, nc);
  const Vector psit = parse_state(target, nc);

  const double w = synth::varpi().value;
  const liealg::GeneratorFamily fam = liealg::assemble_w(model, nc, w, gap_tol);
  planner::SteerOptions sopts;
  sopts.tol = tol_steer;
  sopts.budget = budget_segments;
  sopts.restarts = restarts;
  sopts.seed = seed;
  sopts.columns = 1;
  sopts.skip_condition_check = true;
  const planner::SteerResult steer = planner::steer_su(fam, lift.g, sopts);

  const int N = big_n > 0 ? big_n : 2 * nc;
  const liealg::GeneratorFamily fam_big = liealg::assemble_w_extended(model, nc, N, w, gap_tol);
  synth::SynthOptions topts;
  topts.h = h;
  topts.train_tol = tol_pulse;
  topts.k_cap = budget_pulses;
  const synth::InteractionSchedule sched =
      synth::schedule_from_generators(fam_big, steer.schedule, N, topts);
  const synth::PhysicalControl phys = synth::to_physical(sched);

  const galerkin::TruncatedSystem sys = galerkin::truncate(model, N);
  const propagate::TrajectoryRecord rec =
      propagate::propagate_physical(sys, phys, pad_state(psi0, N));
  const Vector& psi_final = rec.states.back();
  const Vector want = pad_state(psit, N);

  bool l1_ok = true;
  for (size_t j = 0; j < phys.l1_norms.size(); ++j)
    l1_ok = l1_ok &&
            phys.l1_norms[j] <= model.bounds[j].delta * sched.total_duration + 1e-9;

  io::SynthesizedControl control;
  control.model_name = model.name;
  control.n = nc;
  control.big_n = N;
  for (const auto& g : fam_big.gens) control.generator_labels.push_back(g.label);
  control.plan = steer.schedule;
  control.schedule = sched;
  control.physical = phys;

  py::dict d;
  d["n_certified"] = nc;
  d["N"] = N;
  d["condition"] = report_dict(rep);
  d["plan_segments"] = steer.schedule.segments.size();
  d["plan_duration"] = steer.schedule.total_duration();
  d["steering_distance"] = steer.achieved;
  d["steering_converged"] = steer.converged;
  d["schedule_intervals"] = sched.intervals.size();
  d["schedule_duration"] = sched.total_duration;
  d["worst_theta_defect"] = sched.worst_theta_defect;
  d["physical_duration"] = phys.total_duration;
  d["l1_norms"] = phys.l1_norms;
  d["l1_within_bound"] = l1_ok;
  d["fidelity"] = std::norm(want.dot(psi_final));
  // rvalue: the caster must hand numpy an owned copy, not a view of `rec`
  d["final_state"] = Vector(psi_final);
  d["final_populations"] = populations(psi_final);
  d["max_unitarity_defect"] = rec.max_unitarity_defect;
  d["control_json"] = io::control_to_json_text(control);
  return d;
}

py::dict simulate_control(const models::QuantumModel& model, const std::string& control_json,
                          const py::object& initial, int big_n) {
  const io::SynthesizedControl control = io::control_from_json_text(control_json);
  const int N = big_n > 0 ? big_n : (control.big_n > 0 ? control.big_n : 2 * control.n);
  const galerkin::TruncatedSystem sys = galerkin::truncate(model, N);
  const Vector psi0 = parse_state(initial, N);
  const propagate::TrajectoryRecord rec = propagate::propagate_physical(sys, control.physical, psi0);
  py::dict d;
  d["N"] = N;
  d["duration"] = control.physical.total_duration;
  d["samples"] = rec.times.size();
  d["final_state"] = Vector(rec.states.back());
  d["final_populations"] = populations(rec.states.back());
  d["max_unitarity_defect"] = rec.max_unitarity_defect;
  return d;
}

}  // namespace

PYBIND11_MODULE(_liegal, m) {
  m.doc() = "Controllability certification and control synthesis for bilinear "
            "Schrodinger systems with discrete drift spectrum";
#ifdef LIEGAL_VERSION
  m.attr("__version__") = LIEGAL_VERSION;
#else
  m.attr("__version__") = "dev";
#endif

  py::enum_<models::BoundKind>(m, "BoundKind")
      .value("half", models::BoundKind::half)
      .value("symmetric", models::BoundKind::symmetric);

  py::class_<models::QuantumModel>(m, "Model",
                                   "Bilinear system described through the drift eigenbasis")
      .def_readonly("name", &models::QuantumModel::name)
      .def_property_readonly("controls", [](const models::QuantumModel& md) { return md.p; })
      .def("eigenvalue",
           [](const models::QuantumModel& md, int k) {
             if (k < 1 || k > md.n_max) throw std::invalid_argument("level out of range");
             return md.eigenvalue(k);
           },
           py::arg("k"), "Drift eigenvalue lambda_k (1-based)")
      .def("coupling",
           [](const models::QuantumModel& md, int j, int l, int k) {
             if (j < 1 || j > md.p) throw std::invalid_argument("control index out of range");
             if (l < 1 || k < 1) throw std::invalid_argument("level out of range");
             return md.coupling(j, l, k);
           },
           py::arg("j"), py::arg("l"), py::arg("k"),
           "Coupling entry <phi_l, B_j phi_k> (all indices 1-based)")
      .def("to_json", &models::model_to_json_text, py::arg("n"),
           "Serialize the leading n levels to the model JSON schema")
      .def_static("well", &models::well_model, py::arg("delta") = 1.0,
                  py::arg("bound") = models::BoundKind::symmetric,
                  "Particle in a box with the dipole control i*x")
      .def_static(
          "well",
          [](double delta, const std::string& bound) {
            return models::well_model(delta, parse_bound(bound));
          },
          py::arg("delta") = 1.0, py::arg("bound") = "symmetric")
      .def_static("rotor", &models::rotor_model, py::arg("delta") = 1.0, py::arg("window") = 0,
                  "Rigid rotor driven along three orthogonal axes")
      .def_static("from_json", &models::model_from_json_text, py::arg("text"),
                  "Load a model from its JSON description");

  py::class_<galerkin::TruncatedSystem>(m, "System", "Galerkin truncation to n modes")
      .def_readonly("n", &galerkin::TruncatedSystem::n)
      .def_readonly("model_name", &galerkin::TruncatedSystem::model_name)
      .def_property_readonly("drift_diagonal",
                             [](const galerkin::TruncatedSystem& s) { return s.a_diag; })
      .def("drift", &galerkin::TruncatedSystem::drift, "A^(n) = i diag(lambda)")
      .def("coupling",
           [](const galerkin::TruncatedSystem& s, int j) {
             if (j < 1 || j > static_cast<int>(s.b.size()))
               throw std::invalid_argument("control index out of range");
             return s.b[static_cast<size_t>(j - 1)];
           },
           py::arg("j"), "Compressed coupling matrix B_j^(n) (1-based)");

  m.def("truncate", &galerkin::truncate, py::arg("model"), py::arg("n"),
        "Galerkin truncation of a model to its leading n modes");
  m.def(
      "spectral_gaps",
      [](const galerkin::TruncatedSystem& sys, double tol) {
        return galerkin::spectral_gaps(sys, tol).values;
      },
      py::arg("system"), py::arg("tol") = 1e-9,
      "Ascending spectral gap values |lambda_l - lambda_k| (first entry 0)");

  py::class_<synth::VarpiResult>(m, "AveragingConstant",
                                 "Bracketed value of the pulse-train averaging constant")
      .def_readonly("value", &synth::VarpiResult::value)
      .def_readonly("lower", &synth::VarpiResult::lower)
      .def_readonly("upper", &synth::VarpiResult::upper)
      .def_readonly("terms", &synth::VarpiResult::terms)
      .def("__float__", [](const synth::VarpiResult& v) { return v.value; })
      .def("__repr__", [](const synth::VarpiResult& v) {
        return "AveragingConstant(" + std::to_string(v.value) + ")";
      });
  m.def("varpi", &synth::varpi, py::arg("tol") = 1e-12,
        "Infinite product prod_{k>=2} cos(pi/2k) with a certified bracket");

  m.def(
      "check_condition",
      [](const models::QuantumModel& model, int n, const std::string& kind, double rank_tol,
         double gap_tol) {
        return report_dict(liealg::check_condition(model, n, parse_kind(kind), rank_tol, gap_tol));
      },
      py::arg("model"), py::arg("n"), py::arg("kind") = "lgsc", py::arg("rank_tol") = 1e-8,
      py::arg("gap_tol") = 1e-9,
      "Decide the controllability ('lgcc') or stalking ('lgsc') condition at truncation n");

  py::class_<synth::PulseTrain>(m, "PulseTrain", "Convexifying pulse train")
      .def_readonly("gamma1", &synth::PulseTrain::gamma1)
      .def_readonly("suppressed", &synth::PulseTrain::suppressed)
      .def_readonly("xi", &synth::PulseTrain::xi)
      .def_readonly("varpi", &synth::PulseTrain::varpi)
      .def_readonly("taus", &synth::PulseTrain::taus)
      .def_readonly("active_defect", &synth::PulseTrain::active_defect)
      .def_readonly("worst_suppressed", &synth::PulseTrain::worst_suppressed)
      .def_readonly("converged", &synth::PulseTrain::converged)
      .def("evaluate",
           [](synth::PulseTrain& t) {
             synth::evaluate_train(t);
             return std::max(t.active_defect, t.worst_suppressed);
           },
           "Recompute both moment defects from the stored offsets");

  m.def(
      "convexify_pulses",
      [](double gamma1, const std::vector<double>& suppressed, Complex xi, double varpi_value,
         double tau0, double tol, int k_init, int k_cap, double spacing) {
        synth::PulseOptions opts;
        opts.tol = tol;
        opts.k_init = k_init;
        opts.k_cap = k_cap;
        opts.spacing = spacing;
        return synth::convexify_pulses(gamma1, suppressed, xi, varpi_value, tau0, opts);
      },
      py::arg("gamma1"), py::arg("suppressed"), py::arg("xi") = Complex(1, 0),
      py::arg("varpi_value") = 0.0, py::arg("tau0") = 0.0, py::arg("tol") = 0.02,
      py::arg("k_init") = 64, py::arg("k_cap") = 1 << 17, py::arg("spacing") = 0.0,
      "Pulse offsets averaging the active frequency to varpi*xi while suppressing the others");

  m.def("synthesize_transfer", &synthesize_transfer, py::arg("model"), py::arg("n"),
        py::arg("initial"), py::arg("target"), py::arg("N") = 0, py::arg("seed") = 1234,
        py::arg("h") = 8, py::arg("tol_steer") = 5e-3, py::arg("tol_pulse") = 0.02,
        py::arg("budget_segments") = 400, py::arg("budget_pulses") = 1 << 17,
        py::arg("restarts") = 4, py::arg("rank_tol") = 1e-8, py::arg("gap_tol") = 1e-9,
        "Certify, plan, and realize a state transfer; returns a summary dict with the "
        "serialized control under 'control_json'");

  m.def("simulate_control", &simulate_control, py::arg("model"), py::arg("control_json"),
        py::arg("initial") = 1, py::arg("N") = 0,
        "Replay a serialized control on a (possibly finer) truncation");

  m.def("modulus_distance", &propagate::modulus_distance, py::arg("c"), py::arg("d"),
        "max_k | |c_k| - |d_k| | (shorter vector padded with zeros)");
  m.def(
      "leakage", [](const Vector& psi, int n1) { return propagate::leakage(psi, n1); },
      py::arg("psi"), py::arg("n"), "Squared norm carried by coefficients above mode n");
}

// synth.hpp — convexified pulse trains and control synthesis
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "liegal/planner.hpp"

namespace liegal::synth {

using planner::GeneratorSchedule;
using liealg::GeneratorFamily;

// ---------- the convexification constant ----------

struct VarpiResult {
  double value = 0.0;  // midpoint of the bracket
  double lower = 0.0;
  double upper = 0.0;
  int terms = 0;       // factors of the partial product
};

// prod_{k>=2} cos(pi/(2k)) with a rigorous bracket of width < tol.
VarpiResult varpi(double tol = 1e-12);

// ---------- pulse trains ----------

struct PulseOptions {
  double tol = 0.02;        // moment defect target (both active and suppressed)
  int k_init = 64;          // initial pulse count (doubled until tol or cap)
  int k_cap = 1 << 17;
  double spacing = 0.0;         // fixed R; 0 -> use spacing_over_k
  double spacing_over_k = 0.0;  // R = spacing_over_k / K (staircase feasibility)
  int wraps = 8;            // phase wraps searched per window
  int polish_sweeps = 40;
  std::uint64_t seed = 0;   // reserved; the construction is deterministic
};

struct PulseTrain {
  double gamma1 = 0.0;             // active frequency
  std::vector<double> suppressed;  // gamma_2..gamma_kappa
  Complex xi = 1.0;                // target phase on the active frequency
  double varpi = 0.0;
  double tau0 = 0.0;               // base offset; taus[0] >= tau0
  double spacing = 0.0;            // R; consecutive taus differ by more than R
  std::vector<double> taus;
  double active_defect = 0.0;      // | avg e^{i gamma1 tau} - varpi xi |
  double worst_suppressed = 0.0;   // max_j | avg e^{i gamma_j tau} |
  bool converged = false;
};

// Choose pulse times tau_1 < ... < tau_K with spacing > R and tau_1 >= tau0 so
// that (1/K) sum_k e^{i gamma1 tau_k} ~ varpi*xi while every suppressed
// frequency averages to ~0. Uniform-weight greedy selection over windowed
// candidate grids followed by a spacing-preserving continuous polish; K doubles
// until the defects are below tol or the cap is hit (best attempt returned).
PulseTrain convexify_pulses(double gamma1, const std::vector<double>& suppressed,
                            Complex xi, double varpi_value, double tau0,
                            const PulseOptions& opts = {});

// Recompute the two moment defects of a train (used for serialization replay).
void evaluate_train(PulseTrain& train);

// ---------- interaction-frame schedules ----------

// A piecewise description of (alpha, v, omega) on the schedule clock:
// d/dt y = (alpha A^(N) + Theta(omega, v)) y with omega piecewise affine and
// continuous, v piecewise constant, and z = slope + alpha >= 1 throughout
// (z is the physical clock rate undone by to_physical).
struct InteractionInterval {
  double t0 = 0.0, t1 = 0.0;   // schedule clock
  double omega0 = 0.0;         // omega(t0); omega is affine on the interval
  double slope = 1.0;          // d omega / dt
  int alpha = 0;               // drift coefficient, 0 or 1
  RealVector v;                // p reparametrized control values, |v_j| <= delta_j
};

struct SynthOptions {
  int h = 8;                   // refinement index: pulse count K = (smallest admissible K) * h
  double train_tol = 0.02;     // per-train moment defect target
  double spacing = 0.0;        // pulse spacing R; 0 -> automatic
  int k_init = 64;
  int k_cap = 1 << 17;
  double ramp_fraction = 0.1;  // total ramp time per segment ~ fraction/K of duration
};

struct SegmentReport {
  std::string label;
  double duration = 0.0;
  int pulses = 0;               // K (0 for drift segments)
  double active_defect = 0.0;
  double worst_suppressed = 0.0;
  double theta_defect = 0.0;    // || integral(Theta(omega,v)) - duration * M || over the segment
};

struct InteractionSchedule {
  int n = 0, big_n = 0;
  std::vector<InteractionInterval> intervals;
  std::vector<PulseTrain> trains;      // one per convexified segment
  std::vector<SegmentReport> reports;
  std::vector<double> segment_ends;    // schedule clock at the end of each plan segment
  double total_duration = 0.0;
  double omega_end = 0.0;
  double worst_theta_defect = 0.0;
};

// Realize a generator schedule over the W- (or rotated V-) family on the N-level
// truncation: drift labels become alpha = 1 stretches; activation labels become
// pulse trains convexified against the N-level gap set, staircased into omega
// with slope-1 plateaus and steep ramps.
InteractionSchedule schedule_from_generators(const GeneratorFamily& family,
                                             const GeneratorSchedule& plan, int big_n,
                                             const SynthOptions& opts = {});

// Exact time integral of alpha*A + Theta(omega, v) over [0, t] within the
// schedule (closed form per affine interval); used for defect reporting and
// the crop comparison.
Matrix interaction_primitive(const galerkin::TruncatedSystem& big_sys,
                             const InteractionSchedule& sched, double t);

// ---------- physical controls ----------

struct PhysicalInterval {
  double s0 = 0.0, s1 = 0.0;  // physical clock
  RealVector u;               // p control values, u_j in U_j
};

struct PhysicalControl {
  std::vector<PhysicalInterval> intervals;
  std::vector<double> l1_norms;       // per control
  double total_duration = 0.0;
  std::vector<double> schedule_times; // interaction t at each interval start (+ final)
};

// Undo the time reparametrization: z = omega' + alpha >= 1, u_j = v_j / z on
// each interval, physical duration = z * (interval length).
PhysicalControl to_physical(const InteractionSchedule& sched);

}  // namespace liegal::synth

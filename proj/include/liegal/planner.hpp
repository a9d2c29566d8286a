// planner.hpp — unitary steering, curve tracking, and target lifting
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "liegal/liealg.hpp"

namespace liegal::planner {

using liealg::Generator;
using liealg::GeneratorFamily;

// ---------- schedules ----------

struct Segment {
  std::string label;  // generator label within the owning family
  double duration = 0.0;
};

struct GeneratorSchedule {
  std::vector<Segment> segments;
  double total_duration() const;
};

// Chronological flow of a schedule: product of exp(duration * M_label), later
// segments applied on the left.
Matrix schedule_flow(const GeneratorFamily& family, const GeneratorSchedule& sched);

// Partial flows after each segment (index 0 = identity).
std::vector<Matrix> schedule_flow_prefix(const GeneratorFamily& family,
                                         const GeneratorSchedule& sched);

// ---------- steering ----------

struct SteerOptions {
  double tol = 1e-3;          // phase-invariant target distance
  int budget = 400;           // maximum number of segments
  int restarts = 4;
  std::uint64_t seed = 1234;
  int max_sweeps = 2000;      // coordinate sweeps per word length
  int columns = 0;            // 0: full unitary; r > 0: align the first r columns only
  bool skip_condition_check = false;
};

struct SteerResult {
  GeneratorSchedule schedule;
  double achieved = 0.0;  // phase-invariant distance in the selected metric
  bool converged = false;
  int sweeps = 0;
  int restarts_used = 0;
};

// Alternating coordinate descent on segment durations of a round-robin
// generator word: each sweep line-maximizes |tr(flow^* g)| (or the first-r-column
// overlap) one duration at a time; the word grows on stagnation and the best
// schedule over seeded restarts is returned. Durations are nonnegative.
// Throws std::invalid_argument if the family's traceless closure misses su(n)
// (skippable when the caller has already certified the condition).
SteerResult steer_su(const GeneratorFamily& family, const Matrix& target,
                     const SteerOptions& opts = {});

// ---------- curve tracking ----------

struct TrackOptions {
  double eps = 0.1;          // end-to-end modulus tolerance the plan aims for
  int budget_per_step = 120;
  std::uint64_t seed = 1234;
  int restarts = 3;
};

struct TrackingPlan {
  GeneratorSchedule schedule;
  std::vector<double> sample_times;  // input curve times t_i
  std::vector<double> tau;           // schedule time at which g(t_i) is realized
  std::vector<double> step_errors;   // phase-invariant error of each increment
  double worst_step_error = 0.0;
};

// Follow a sampled unitary curve g(t_0)=I, ..., g(t_S) with a driftless family:
// each increment g(t_{i+1}) g(t_i)^{-1} (against the realized flow) is steered to
// tolerance eps/(2S). Consecutive samples must satisfy ||g_{i+1} - g_i|| < 1.
TrackingPlan track_su(const GeneratorFamily& family, const std::vector<Matrix>& curve,
                      const std::vector<double>& times, const TrackOptions& opts = {});

// Lift a moduli curve to a unitary curve: per-step minimal rotations in the
// plane spanned by consecutive modulus vectors, conjugated by the initial
// state's phases so the lifted curve reproduces the moduli along psi0.
std::vector<Matrix> lift_moduli_curve(const std::vector<RealVector>& moduli,
                                      const Vector& psi0);

// ---------- target lifting ----------

struct LiftResult {
  int n = 0;          // chosen truncation level
  Matrix g;           // SU(n) map sending the truncated initial family to the targets
  double retained = 1.0;  // worst retained squared norm among the lifted states
};

// Choose n >= n0 retaining at least 1 - eps^2 of every state's squared norm and
// build an SU(n) unitary mapping the orthonormalized initial states to the
// targets (determinant corrected by a phase on the completion block).
LiftResult lift_target(const std::vector<Vector>& initial, const std::vector<Vector>& target,
                       int n0, double eps = 0.05);

// ---------- phase alignment ----------

struct PhaseAlignResult {
  double t = 0.0;      // drift duration
  double dist = 0.0;   // achieved max_k |e^{i lambda_k t} c_k - d_k|
};

// Search t >= 0 such that the free drift e^{tA} carries c as close as possible
// to d componentwise; the horizon starts at 2 pi n / (smallest nonzero occupied
// gap) and doubles until tol is met or the cap (2^10 horizons) is reached.
PhaseAlignResult phase_align(const galerkin::TruncatedSystem& sys, const Vector& c,
                             const Vector& d, double tol = 1e-2);

}  // namespace liegal::planner

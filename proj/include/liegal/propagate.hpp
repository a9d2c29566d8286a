// propagate.hpp — exact piecewise propagation and trajectory diagnostics
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "liegal/synth.hpp"

namespace liegal::propagate {

using galerkin::TruncatedSystem;
using synth::InteractionSchedule;
using synth::PhysicalControl;

// ---------- trajectory records ----------

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Matrix> propagators;   // filled when requested
  std::vector<double> unitarity;     // ||U^*U - I||_F at each sample
  double max_unitarity_defect = 0.0;
};

struct PropagateOptions {
  bool keep_propagators = false;
  int samples_per_interval = 1;      // >=1 extra interior samples for records
  std::vector<double> sample_times;  // explicit sample times (merged in)
};

// ---------- physical frame ----------

// d/ds psi = (A^(N) + sum_j u_j B_j) psi for a piecewise-constant control:
// exact per-interval unitary exponentials (eigendecomposition), no step error.
TrajectoryRecord propagate_physical(const TruncatedSystem& sys, const PhysicalControl& control,
                                    const Vector& psi0, const PropagateOptions& opts = {});

// ---------- interaction frame ----------

enum class InteractionMethod {
  exact,     // conjugated-exponential closed form per affine omega interval
  midpoint,  // frozen-midpoint sub-stepping with the given substep
};

struct InteractionOptions {
  InteractionMethod method = InteractionMethod::exact;
  double substep = 0.0;              // midpoint method: 0 -> 0.025 / max gap
  bool keep_propagators = false;
  std::vector<double> sample_times;
};

// d/dt y = (alpha A^(N) + Theta(omega, v)) y along an interaction schedule.
TrajectoryRecord propagate_interaction(const TruncatedSystem& sys,
                                       const InteractionSchedule& sched, const Vector& y0,
                                       const InteractionOptions& opts = {});

// ---------- diagnostics ----------

// (sum_k |lambda_k|^{2s} |<phi_k, psi>|^2)^{1/2}
double s_norm(const TruncatedSystem& sys, const Vector& psi, double s);

// max_k | |c_k| - |d_k| | between two coefficient vectors (shorter one padded).
double modulus_distance(const Vector& c, const Vector& d);

// Norm retained outside the leading n1 modes of a state on n2 > n1 levels:
// sum_{k > n1} |<phi_k, psi>|^2.
double leakage(const Vector& psi, int n1);

struct ConsistencyReport {
  int n1 = 0, n2 = 0;
  double max_leakage = 0.0;        // max over compared samples
  double max_state_gap = 0.0;      // max_t || psi_{n1}(t) - crop(psi_{n2}(t)) ||
  std::vector<double> times;
  std::vector<double> leakages;
};

// Re-propagate a physical control on a finer truncation n2 and compare.
ConsistencyReport galerkin_consistency(const models::QuantumModel& model,
                                       const PhysicalControl& control, const Vector& psi0,
                                       int n1, int n2,
                                       const std::vector<double>& sample_times = {});

}  // namespace liegal::propagate

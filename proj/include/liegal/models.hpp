// models.hpp — drift spectra, coupling operators, and control bounds
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "liegal/common.hpp"

namespace liegal::models {

enum class BoundKind { half, symmetric };

struct ControlBound {
  BoundKind kind = BoundKind::symmetric;
  double delta = 1.0;  // > 0; admissible set is [0, delta] or [-delta, delta]
};

struct Guarantees {
  // couplings vanish when the distance between eigenvalue levels exceeds this
  std::optional<int> level_bandwidth;
  // model declared s-weakly coupled (diagnostic flag carried into reports)
  bool s_weakly_coupled = false;
};

// A bilinear system d/dt psi = (A + sum_j u_j B_j) psi described through its
// eigenbasis: A = i diag(lambda_k) and coupling entries b^j_{lk} = <phi_l, B_j phi_k>.
// Indices l, k and the control index j are 1-based throughout this interface.
struct QuantumModel {
  std::string name;
  int p = 0;      // number of controls
  int n_max = 0;  // largest level with tabulated data (kMaxLevels for closed-form models)
  std::vector<ControlBound> bounds;  // size p
  Guarantees guarantees;

  std::function<double(int)> eigenvalue;            // lambda_k
  std::function<Complex(int, int, int)> coupling;   // (j, l, k) -> b^j_{lk}

  // Exact spectrum: lambda_k = eigen_num(k) * eigen_scale when eigen_num is set.
  std::function<long long(int)> eigen_num;
  double eigen_scale = 1.0;

  // Optional selection rule: false guarantees b^j_{lk} = 0 (used to prune probes).
  std::function<bool(int, int, int)> support;

  bool exact_spectrum() const { return static_cast<bool>(eigen_num); }
  bool all_bounds_symmetric() const;
};

inline constexpr int kMaxLevels = 1 << 24;  // "unbounded" sentinel for closed-form models

// ---------- built-in: particle in a box ----------

// Infinite potential well on (-1/2, 1/2): lambda_k = -k^2 pi^2 / 2 and a single
// control B = i x. Couplings are evaluated by adaptive quadrature against the
// eigenfunctions (sqrt(2) cos(k pi x) for odd k, sqrt(2) sin(k pi x) for even k)
// and cached; entries with l + k even vanish identically.
QuantumModel well_model(double delta, BoundKind kind = BoundKind::symmetric);

// ---------- built-in: rigid rotor in 3D ----------

// Orientation indices (l, m), |m| <= l, of a spherical-harmonic state.
struct RotorIndex {
  int l = 0;
  int m = 0;
};

// Linear ordering used by the rotor model: levels window, window+1, ... with m
// ascending inside each level. index is 1-based.
RotorIndex rotor_state(int index, int window = 0);
int rotor_position(const RotorIndex& s, int window = 0);

// Rotor driven along three orthogonal axes: lambda = -l(l+1) with multiplicity
// 2l+1, controls B_1, B_2, B_3 built from the (l -> l+1) ladder coefficients
//   q_{l,m} = sqrt((l-m+2)(l-m+1) / (4(2l+1)(2l+3))),
//   p_{l,m} = -sqrt(((l+1)^2 - m^2) / ((2l+1)(2l+3))).
// window > 0 drops levels below `window` so that the two levels (window,
// window+1) occupy the leading 4*window+4 coordinates.
QuantumModel rotor_model(double delta, int window = 0);

// Ladder coefficients (exposed for tests and bindings).
double rotor_q(int l, int m);
double rotor_p(int l, int m);

// ---------- file-backed models ----------

// Load a model from its JSON description (see README for the schema). Throws
// std::invalid_argument on malformed input or non-skew-Hermitian couplings,
// naming the offending (j, l, k).
QuantumModel load_model(const std::string& path);
QuantumModel model_from_json_text(const std::string& text);

// Serialize the leading n_max levels of a model to the same JSON schema.
std::string model_to_json_text(const QuantumModel& model, int n_max);

}  // namespace liegal::models

// galerkin.hpp — finite truncations, spectral gaps, activations, rotations, crops
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "liegal/models.hpp"

namespace liegal::galerkin {

using models::QuantumModel;

// ---------- truncation ----------

// Galerkin truncation of a model to its leading n modes: A^(n) = i diag(a_diag)
// and the compressed coupling matrices b[j] (0-based j here; b[j] is B_{j+1}^(n)).
struct TruncatedSystem {
  int n = 0;
  RealVector a_diag;            // lambda_1 .. lambda_n
  std::vector<Matrix> b;        // p skew-Hermitian n x n matrices
  std::vector<long long> a_num; // exact integer spectrum (empty when inexact)
  double a_scale = 1.0;
  std::string model_name;

  bool exact() const { return !a_num.empty(); }
  Matrix drift() const;  // A^(n) = i diag(a_diag)
};

TruncatedSystem truncate(const QuantumModel& model, int n);

// ---------- spectral gaps ----------

// The set of gaps |lambda_l - lambda_k|, l,k <= n, with a per-pair gap id.
// Built-in models compare eigenvalues exactly through their integer form;
// file models cluster within a relative tolerance.
struct GapSet {
  std::vector<double> values;       // ascending, values[0] == 0
  std::vector<long long> ints;      // integer gap (only when exact)
  bool exact = false;
  Eigen::MatrixXi pair_gap;         // n x n, entry = index into values

  int find(double sigma, double tol = 1e-9) const;  // -1 when absent
};

GapSet spectral_gaps(const TruncatedSystem& sys, double tol = 1e-9);

// ---------- gap activation and rotation ----------

// E_sigma(M): keep exactly the entries (l, k) whose gap id matches `gap`.
Matrix excite(const Matrix& m, int gap, const GapSet& gaps);

// J_xi(M): multiply entry (j, k) by xi when lambda_j > lambda_k, by conj(xi)
// when lambda_j < lambda_k, and zero it when lambda_j = lambda_k. With this
// orientation [A^(n), E_sigma(M)] = sigma * J_i(E_sigma(M)).
Matrix j_rotate(const Matrix& m, Complex xi, const TruncatedSystem& sys);

// ---------- compatibility set ----------

// Witness for "(sigma, j) compatible at n": E_sigma(B_j^(N)) keeps the same
// leading n x n block and no entries straddling row <= n < col for every N > n.
struct CompatibilityWitness {
  double sigma = 0.0;
  int j = 0;            // 1-based control index
  bool member = false;
  bool guaranteed = false;  // decided analytically from the exact spectrum
  int verified_to = 0;      // largest N examined when not guaranteed
  std::string caveat;       // non-empty for bounded verification or violations
};

// Decide membership of (sigma = gaps.values[gap], j) in the compatibility set.
// Exact-spectrum models are decided analytically (every k with a matching gap
// is located through the integer spectrum and its coupling probed); file
// models are verified up to verify_to (default 4n, clamped to n_max).
CompatibilityWitness xi_membership(const QuantumModel& model, int n, int gap,
                                   const GapSet& gaps, int j,
                                   int verify_to = 0, double gap_tol = 1e-9);

// ---------- crop ----------

// Leading n x n block of a larger matrix.
Matrix crop(const Matrix& m, int n);

}  // namespace liegal::galerkin

// liealg.hpp — bracket closures and the controllability generator families
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "liegal/galerkin.hpp"

namespace liegal::liealg {

using galerkin::GapSet;
using galerkin::TruncatedSystem;
using models::QuantumModel;

// ---------- brackets ----------

Matrix bracket(const Matrix& x, const Matrix& y);  // [X, Y] = XY - YX

// ---------- labeled generators ----------

enum class GenKind { drift, activation, activation_rot, zero_gap, zero_plus_activation };

struct Generator {
  std::string label;   // e.g. "A", "E[14.804]B1", "Ji.E[14.804]B1" — stable, human-readable
  Matrix m;
  GenKind kind = GenKind::activation;
  int j = 0;           // 1-based control index (0 for the drift)
  int gap = -1;        // gap id in the owning GapSet (-1 for the drift)
  double sigma = 0.0;
  Complex xi = 1.0;    // rotation phase for activation_rot
};

struct GeneratorFamily {
  std::vector<Generator> gens;
  TruncatedSystem sys;       // the system the matrices live on (N-level for extensions)
  GapSet gaps;               // gap set of `sys`
  int small_n = 0;           // level the family structure was assembled at
  std::vector<models::ControlBound> bounds;  // per-control bounds of the model
  std::vector<std::string> caveats;  // bounded-verification notes from xi_membership
  const Generator& find(const std::string& label) const;
};

// Families from the controllability conditions; `n` selects the truncation.
//  - V0: drift + activations paired with a compatible zero gap, plus the
//        nonzero-gap activations of symmetrically bounded controls.
//  - V:  J_xi-rotated nonzero-gap activations, xi sampled from xi_set.
//  - W:  drift, zero-gap parts, zero-gap + varpi*activation combinations, and
//        varpi*activation parts of symmetrically bounded controls; matrices are
//        scaled by the control bound delta (and varpi where indicated).
GeneratorFamily assemble_v0(const QuantumModel& model, int n, double gap_tol = 1e-9);
GeneratorFamily assemble_v(const QuantumModel& model, int n,
                           const std::vector<Complex>& xi_set = {Complex(1, 0), Complex(0, 1)},
                           double gap_tol = 1e-9);
GeneratorFamily assemble_w(const QuantumModel& model, int n, double varpi,
                           double gap_tol = 1e-9);

// N-level extensions holding the n-level family's structure: crop(matrix, n)
// reproduces the n-level matrices entrywise.
GeneratorFamily assemble_w_extended(const QuantumModel& model, int n, int big_n, double varpi,
                                    double gap_tol = 1e-9);
GeneratorFamily assemble_v_extended(const QuantumModel& model, int n, int big_n,
                                    const std::vector<Complex>& xi_set,
                                    double gap_tol = 1e-9);

// ---------- Lie closure ----------

struct ClosureOptions {
  double rank_tol = 1e-8;  // residual threshold relative to a unit-norm candidate
  int max_depth = 0;       // 0 -> 2n
  int max_dim = 0;         // 0 -> n^2 (stop early once the full algebra is hit)
};

struct ClosureResult {
  int dim = 0;
  std::vector<Matrix> basis;        // orthonormal under Re tr(X^* Y)
  std::vector<std::string> words;   // bracket word producing each basis element
  int depth_reached = 0;
  bool truncated = false;           // max_depth hit with growth still occurring
};

// Breadth-first bracket closure of the real span of `gens` inside u(n).
// Deterministic for a fixed generator order; generators are normalized to unit
// Frobenius norm before seeding.
ClosureResult lie_closure(const std::vector<Generator>& gens, const ClosureOptions& opts = {});

// Residual of X against the closure span (Frobenius norm of the orthogonal part
// of X / ||X||).
double span_residual(const ClosureResult& closure, const Matrix& x);

// Re-evaluate a closure certificate: replay each bracket word from the named
// generators and report the rank of the resulting stack.
int replay_certificate(const std::vector<Generator>& gens,
                       const std::vector<std::string>& words, double rank_tol = 1e-8);

// ---------- condition checks ----------

enum class ConditionKind { lgcc, lgsc };

struct ConditionReport {
  ConditionKind kind = ConditionKind::lgcc;
  int n = 0;
  bool holds = false;
  int closure_dim = 0;        // dimension of the traceless part of the closure
  int expected_dim = 0;       // n^2 - 1
  double max_su_residual = 0; // worst residual of an su(n) basis element (LGCC)
  double rank_tol = 1e-8;
  std::vector<std::string> generator_labels;
  std::vector<std::string> caveats;
  std::vector<std::string> words;  // closure certificate
};

ConditionReport check_condition(const QuantumModel& model, int n, ConditionKind kind,
                                double rank_tol = 1e-8, double gap_tol = 1e-9);

}  // namespace liegal::liealg

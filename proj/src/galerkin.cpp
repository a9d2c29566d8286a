// galerkin.cpp — truncations, gap partitions, activations, compatibility witnesses
#include "liegal/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace liegal::galerkin {

Matrix TruncatedSystem::drift() const {
  Matrix a = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) a(k, k) = Complex(0, a_diag(k));
  return a;
}

TruncatedSystem truncate(const QuantumModel& model, int n) {
  if (n < 2) throw std::invalid_argument("truncate: n must be >= 2");
  if (n > model.n_max) throw std::invalid_argument("truncate: n exceeds the model's n_max");
  TruncatedSystem sys;
  sys.n = n;
  sys.model_name = model.name;
  sys.a_diag.resize(n);
  for (int k = 1; k <= n; ++k) sys.a_diag(k - 1) = model.eigenvalue(k);
  if (model.exact_spectrum()) {
    sys.a_num.resize(n);
    for (int k = 1; k <= n; ++k) sys.a_num[k - 1] = model.eigen_num(k);
    sys.a_scale = model.eigen_scale;
  }
  sys.b.reserve(model.p);
  for (int j = 1; j <= model.p; ++j) {
    Matrix bj = Matrix::Zero(n, n);
    for (int l = 1; l <= n; ++l)
      for (int k = 1; k <= n; ++k) bj(l - 1, k - 1) = model.coupling(j, l, k);
    require_skew(bj, 1e-10, "B_" + std::to_string(j) + "^(" + std::to_string(n) + ")");
    sys.b.push_back(std::move(bj));
  }
  return sys;
}

int GapSet::find(double sigma, double tol) const {
  for (size_t i = 0; i < values.size(); ++i) {
    if (std::abs(values[i] - sigma) <= tol * std::max(1.0, std::abs(sigma)))
      return static_cast<int>(i);
  }
  return -1;
}

GapSet spectral_gaps(const TruncatedSystem& sys, double tol) {
  GapSet out;
  const int n = sys.n;
  out.pair_gap.resize(n, n);
  if (sys.exact()) {
    out.exact = true;
    std::map<long long, int> ids;
    ids[0] = 0;  // gap 0 always present (diagonal pairs)
    for (int l = 0; l < n; ++l)
      for (int k = 0; k < n; ++k) {
        const long long g = std::llabs(sys.a_num[l] - sys.a_num[k]);
        ids.emplace(g, 0);
      }
    int next = 0;
    for (auto& [g, id] : ids) {
      id = next++;
      out.ints.push_back(g);
      out.values.push_back(static_cast<double>(g) * sys.a_scale);
    }
    for (int l = 0; l < n; ++l)
      for (int k = 0; k < n; ++k)
        out.pair_gap(l, k) = ids[std::llabs(sys.a_num[l] - sys.a_num[k])];
    return out;
  }
  // inexact: cluster sorted gap values within a relative tolerance
  std::vector<double> all;
  all.push_back(0.0);
  for (int l = 0; l < n; ++l)
    for (int k = l + 1; k < n; ++k) all.push_back(std::abs(sys.a_diag(l) - sys.a_diag(k)));
  std::sort(all.begin(), all.end());
  std::vector<double> reps;
  for (double v : all) {
    if (reps.empty() || v - reps.back() > tol * std::max(1.0, v)) reps.push_back(v);
  }
  out.values = reps;
  auto rep_of = [&](double v) {
    auto it = std::lower_bound(reps.begin(), reps.end(), v);
    int best = -1;
    double err = std::numeric_limits<double>::infinity();
    for (int c = static_cast<int>(it - reps.begin()) - 1;
         c <= static_cast<int>(it - reps.begin()); ++c) {
      if (c < 0 || c >= static_cast<int>(reps.size())) continue;
      const double e = std::abs(reps[c] - v);
      if (e < err) { err = e; best = c; }
    }
    return best;
  };
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      out.pair_gap(l, k) = rep_of(std::abs(sys.a_diag(l) - sys.a_diag(k)));
  return out;
}

Matrix excite(const Matrix& m, int gap, const GapSet& gaps) {
  const int n = static_cast<int>(m.rows());
  if (gaps.pair_gap.rows() < n)
    throw std::invalid_argument("excite: gap set smaller than the matrix");
  if (gap < 0 || gap >= static_cast<int>(gaps.values.size()))
    throw std::invalid_argument("excite: gap id out of range");
  Matrix out = Matrix::Zero(n, n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      if (gaps.pair_gap(l, k) == gap) out(l, k) = m(l, k);
  return out;
}

Matrix j_rotate(const Matrix& m, Complex xi, const TruncatedSystem& sys) {
  const int n = static_cast<int>(m.rows());
  if (sys.n < n) throw std::invalid_argument("j_rotate: system smaller than the matrix");
  Matrix out = Matrix::Zero(n, n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) {
      int cmp;
      if (sys.exact()) {
        cmp = sys.a_num[l] == sys.a_num[k] ? 0 : (sys.a_num[l] > sys.a_num[k] ? 1 : -1);
      } else {
        const double d = sys.a_diag(l) - sys.a_diag(k);
        const double tol = 1e-12 * std::max(1.0, std::abs(sys.a_diag(l)));
        cmp = std::abs(d) <= tol ? 0 : (d > 0 ? 1 : -1);
      }
      if (cmp > 0) out(l, k) = xi * m(l, k);
      else if (cmp < 0) out(l, k) = std::conj(xi) * m(l, k);
    }
  return out;
}

namespace {

// All k > n with lambda_k equal to `target` (exact integer spectrum; the
// sequence eigen_num is non-increasing). Returns a possibly empty range.
std::vector<int> exact_levels_at(const QuantumModel& model, int n, long long target) {
  std::vector<int> out;
  if (target > model.eigen_num(n + 1)) return out;  // above everything past n
  // find the first k > n with eigen_num(k) <= target by doubling + bisection
  int lo = n + 1, hi = n + 1;
  while (model.eigen_num(hi) > target) {
    lo = hi;
    if (hi > model.n_max / 2) return out;
    hi *= 2;
  }
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (model.eigen_num(mid) > target) lo = mid + 1;
    else hi = mid;
  }
  for (int k = hi; model.eigen_num(k) == target; ++k) {
    out.push_back(k);
    if (k + 1 > model.n_max) break;
  }
  return out;
}

}  // namespace

CompatibilityWitness xi_membership(const QuantumModel& model, int n, int gap,
                                   const GapSet& gaps, int j, int verify_to, double gap_tol) {
  if (j < 1 || j > model.p)
    throw std::invalid_argument("xi_membership: control index out of range");
  if (gap < 0 || gap >= static_cast<int>(gaps.values.size()))
    throw std::invalid_argument("xi_membership: gap id out of range");
  CompatibilityWitness w;
  w.sigma = gaps.values[gap];
  w.j = j;

  if (model.exact_spectrum() && gaps.exact) {
    // Analytic decision: a violation is a pair (l <= n < k) with
    // |lambda_l - lambda_k| = sigma and a nonzero coupling. The integer
    // spectrum locates every such k; couplings are probed directly.
    const long long s = gaps.ints[gap];
    w.guaranteed = true;
    w.member = true;
    for (int l = 1; l <= n && w.member; ++l) {
      const long long base = model.eigen_num(l);
      for (const long long target : {base - s, base + s}) {
        if (s == 0 && target == base + s) continue;  // avoid double visit
        for (int k : exact_levels_at(model, n, target)) {
          if (model.support && !model.support(j, l, k)) continue;
          if (std::abs(model.coupling(j, l, k)) > 0.0) {
            w.member = false;
            w.caveat = "violated by pair (" + std::to_string(l) + ", " + std::to_string(k) + ")";
            break;
          }
        }
        if (!w.member) break;
      }
    }
    w.verified_to = w.member ? model.n_max : 0;
    return w;
  }

  // bounded verification for tabulated models
  const int cap = verify_to > 0 ? std::min(verify_to, model.n_max)
                                : std::min(4 * n, model.n_max);
  w.guaranteed = false;
  w.member = true;
  w.verified_to = cap;
  for (int l = 1; l <= n && w.member; ++l)
    for (int k = n + 1; k <= cap; ++k) {
      const double g = std::abs(model.eigenvalue(l) - model.eigenvalue(k));
      if (std::abs(g - w.sigma) > gap_tol * std::max(1.0, w.sigma)) continue;
      if (std::abs(model.coupling(j, l, k)) > 0.0) {
        w.member = false;
        w.caveat = "violated by pair (" + std::to_string(l) + ", " + std::to_string(k) +
                   ") at N = " + std::to_string(k);
        break;
      }
    }
  if (w.member)
    w.caveat = "membership verified up to N = " + std::to_string(cap) +
               " (no analytic guarantee for tabulated models)";
  return w;
}

Matrix crop(const Matrix& m, int n) {
  if (n > m.rows() || n > m.cols()) throw std::invalid_argument("crop: block larger than matrix");
  return m.topLeftCorner(n, n);
}

}  // namespace liegal::galerkin

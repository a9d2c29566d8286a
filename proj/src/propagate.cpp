// propagate.cpp — exact piecewise propagation and trajectory diagnostics
#include "liegal/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace liegal::propagate {

namespace {

// Cache of eigendecompositions keyed by the constant generator parameters of an
// interval; plateaus and ramps reuse a handful of generators across thousands
// of intervals.
struct EigCache {
  const TruncatedSystem* sys;
  std::map<std::vector<double>, SkewEig> entries;

  const SkewEig& get(double drift_coeff, const RealVector& v) {
    std::vector<double> key;
    key.reserve(v.size() + 1);
    key.push_back(drift_coeff);
    for (Eigen::Index j = 0; j < v.size(); ++j) key.push_back(v[j]);
    auto it = entries.find(key);
    if (it != entries.end()) return it->second;
    Matrix g = drift_coeff * sys->drift();
    for (Eigen::Index j = 0; j < v.size(); ++j)
      if (v[j] != 0.0) g += v[j] * sys->b[j];
    return entries.emplace(std::move(key), skew_eig(g)).first->second;
  }
};

// e^{omega A} psi for the diagonal drift (phase vector apply)
void drift_phase(const TruncatedSystem& sys, double omega, Vector& psi) {
  for (int k = 0; k < sys.n; ++k) psi[k] *= std::polar(1.0, sys.a_diag[k] * omega);
}

Matrix drift_phase_matrix(const TruncatedSystem& sys, double omega) {
  Matrix d = Matrix::Zero(sys.n, sys.n);
  for (int k = 0; k < sys.n; ++k) d(k, k) = std::polar(1.0, sys.a_diag[k] * omega);
  return d;
}

struct Recorder {
  TrajectoryRecord rec;
  bool keep_propagators;

  void take(double t, const Vector& psi, const Matrix* u) {
    rec.times.push_back(t);
    rec.states.push_back(psi);
    double defect;
    if (u) {
      rec.propagators.push_back(*u);
      defect = unitarity_defect(*u);
    } else {
      defect = std::abs(psi.norm() - 1.0);
    }
    rec.unitarity.push_back(defect);
    rec.max_unitarity_defect = std::max(rec.max_unitarity_defect, defect);
  }
};

// sorted unique interior sample times of [t0, t1) from the request list
std::vector<double> interior_samples(const std::vector<double>& requested, double t0, double t1) {
  std::vector<double> out;
  for (double t : requested)
    if (t > t0 && t < t1) out.push_back(t);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

TrajectoryRecord propagate_physical(const TruncatedSystem& sys, const PhysicalControl& control,
                                    const Vector& psi0, const PropagateOptions& opts) {
  if (psi0.size() != sys.n)
    throw std::invalid_argument("propagate_physical: state dimension mismatch");
  EigCache cache{&sys, {}};
  Recorder recorder{{}, opts.keep_propagators};

  Vector psi = psi0;
  Matrix u = Matrix::Identity(sys.n, sys.n);
  const Matrix* uptr = opts.keep_propagators ? &u : nullptr;
  recorder.take(control.intervals.empty() ? 0.0 : control.intervals.front().s0, psi, uptr);

  for (const auto& iv : control.intervals) {
    const double len = iv.s1 - iv.s0;
    if (len < 0) throw std::invalid_argument("propagate_physical: negative interval");
    if (len == 0) continue;
    const bool diagonal = iv.u.isZero(0.0);  // pure drift: phases only

    std::vector<double> marks = interior_samples(opts.sample_times, iv.s0, iv.s1);
    for (int extra = 1; extra < opts.samples_per_interval; ++extra)
      marks.push_back(iv.s0 + len * extra / opts.samples_per_interval);
    marks.push_back(iv.s1);
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

    const SkewEig* eig = diagonal ? nullptr : &cache.get(1.0, iv.u);
    const Vector base = psi;
    const Matrix ubase = opts.keep_propagators ? u : Matrix();
    for (double m : marks) {
      const double s = m - iv.s0;
      Vector sampled;
      if (diagonal) {
        sampled = base;
        drift_phase(sys, s, sampled);
      } else {
        sampled = eig->apply_exp(s, base);
      }
      if (m == iv.s1) psi = sampled;
      if (opts.keep_propagators) {
        Matrix step = diagonal ? drift_phase_matrix(sys, s) : eig->exp(s);
        Matrix usample = step * ubase;
        if (m == iv.s1) u = usample;
        recorder.take(m, sampled, &usample);
      } else {
        recorder.take(m, sampled, nullptr);
      }
    }
  }
  return std::move(recorder.rec);
}

TrajectoryRecord propagate_interaction(const TruncatedSystem& sys,
                                       const InteractionSchedule& sched, const Vector& y0,
                                       const InteractionOptions& opts) {
  if (y0.size() != sys.n)
    throw std::invalid_argument("propagate_interaction: state dimension mismatch");
  EigCache cache{&sys, {}};
  Recorder recorder{{}, opts.keep_propagators};

  Vector y = y0;
  Matrix u = Matrix::Identity(sys.n, sys.n);
  const Matrix* uptr = opts.keep_propagators ? &u : nullptr;
  recorder.take(sched.intervals.empty() ? 0.0 : sched.intervals.front().t0, y, uptr);

  double max_gap = 1.0;
  for (int k = 0; k < sys.n; ++k)
    for (int l = 0; l < sys.n; ++l)
      max_gap = std::max(max_gap, std::abs(sys.a_diag[k] - sys.a_diag[l]));
  const double substep = opts.substep > 0 ? opts.substep : 0.025 / max_gap;

  for (const auto& iv : sched.intervals) {
    const double len = iv.t1 - iv.t0;
    if (len < 0) throw std::invalid_argument("propagate_interaction: negative interval");
    if (len == 0) continue;

    std::vector<double> marks = interior_samples(opts.sample_times, iv.t0, iv.t1);
    marks.push_back(iv.t1);

    if (opts.method == InteractionMethod::exact) {
      // y(t0+s) = e^{-omega(t0+s) A} e^{s ((alpha+slope) A + B_v)} e^{omega(t0) A} y(t0)
      const bool diagonal = iv.v.isZero(0.0);
      // with v == 0 the three factors are all drift phases and the frame terms
      // cancel, leaving e^{alpha s A}; ramps (alpha == 0) move y not at all
      const SkewEig* eig = diagonal ? nullptr : &cache.get(iv.alpha + iv.slope, iv.v);
      Vector x0 = y;
      if (!diagonal) drift_phase(sys, iv.omega0, x0);
      for (double m : marks) {
        const double s = m - iv.t0;
        Vector x;
        if (diagonal) {
          x = x0;
          drift_phase(sys, iv.alpha * s, x);
        } else {
          x = eig->apply_exp(s, x0);
          drift_phase(sys, -(iv.omega0 + iv.slope * s), x);
        }
        if (opts.keep_propagators) {
          Matrix step = diagonal
                            ? drift_phase_matrix(sys, iv.alpha * s)
                            : Matrix(drift_phase_matrix(sys, -(iv.omega0 + iv.slope * s)) *
                                     eig->exp(s) * drift_phase_matrix(sys, iv.omega0));
          Matrix usample = step * u;
          if (m == iv.t1) {
            y = x;
            u = usample;
            recorder.take(m, y, &u);
          } else {
            recorder.take(m, x, &usample);
          }
        } else {
          if (m == iv.t1) y = x;
          recorder.take(m, m == iv.t1 ? y : x, nullptr);
        }
      }
    } else {
      // frozen-midpoint sub-stepping (cross-validation mode)
      double t = iv.t0;
      size_t next_mark = 0;
      while (t < iv.t1 - 1e-15 * (1.0 + std::abs(iv.t1))) {
        double stop = std::min(iv.t1, t + substep);
        if (next_mark < marks.size()) stop = std::min(stop, marks[next_mark]);
        const double h = stop - t;
        if (h <= 0) { ++next_mark; continue; }
        const double omega_mid = iv.omega0 + iv.slope * (t + 0.5 * h - iv.t0);
        Matrix g = Matrix::Zero(sys.n, sys.n);
        if (iv.alpha) g += sys.drift();
        for (Eigen::Index j = 0; j < iv.v.size(); ++j) {
          if (iv.v[j] == 0.0) continue;
          for (int r = 0; r < sys.n; ++r)
            for (int cc = 0; cc < sys.n; ++cc) {
              const Complex b = sys.b[j](r, cc);
              if (b == Complex(0, 0)) continue;
              g(r, cc) += iv.v[j] * b *
                          std::polar(1.0, (sys.a_diag[cc] - sys.a_diag[r]) * omega_mid);
            }
        }
        const SkewEig eig = skew_eig(g);
        y = eig.apply_exp(h, y);
        if (opts.keep_propagators) u = eig.exp(h) * u;
        t = stop;
        if (next_mark < marks.size() && stop == marks[next_mark]) {
          recorder.take(t, y, uptr);
          ++next_mark;
        }
      }
      continue;  // marks already recorded, including t1
    }
  }
  return std::move(recorder.rec);
}

double s_norm(const TruncatedSystem& sys, const Vector& psi, double s) {
  if (psi.size() != sys.n) throw std::invalid_argument("s_norm: dimension mismatch");
  double sum = 0.0;
  for (int k = 0; k < sys.n; ++k)
    sum += std::pow(std::abs(sys.a_diag[k]), 2.0 * s) * std::norm(psi[k]);
  return std::sqrt(sum);
}

double modulus_distance(const Vector& c, const Vector& d) {
  const Eigen::Index n = std::max(c.size(), d.size());
  double worst = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double ck = k < c.size() ? std::abs(c[k]) : 0.0;
    const double dk = k < d.size() ? std::abs(d[k]) : 0.0;
    worst = std::max(worst, std::abs(ck - dk));
  }
  return worst;
}

double leakage(const Vector& psi, int n1) {
  double sum = 0.0;
  for (Eigen::Index k = n1; k < psi.size(); ++k) sum += std::norm(psi[k]);
  return sum;
}

ConsistencyReport galerkin_consistency(const models::QuantumModel& model,
                                       const PhysicalControl& control, const Vector& psi0,
                                       int n1, int n2,
                                       const std::vector<double>& sample_times) {
  if (n2 <= n1) throw std::invalid_argument("galerkin_consistency: need n2 > n1");
  const TruncatedSystem sys1 = galerkin::truncate(model, n1);
  const TruncatedSystem sys2 = galerkin::truncate(model, n2);

  std::vector<double> times = sample_times;
  if (times.empty()) {
    // subsample interval boundaries to keep the report compact
    const size_t stride = std::max<size_t>(1, control.intervals.size() / 256);
    for (size_t i = 0; i < control.intervals.size(); i += stride)
      times.push_back(control.intervals[i].s0);
    times.push_back(control.total_duration);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  auto pad = [](const Vector& v, int n) {
    Vector out = Vector::Zero(n);
    out.head(std::min<Eigen::Index>(v.size(), n)) = v.head(std::min<Eigen::Index>(v.size(), n));
    return out;
  };

  PropagateOptions popts;
  popts.sample_times = times;
  TrajectoryRecord rec1 = propagate_physical(sys1, control, pad(psi0, n1), popts);
  TrajectoryRecord rec2 = propagate_physical(sys2, control, pad(psi0, n2), popts);

  // align records on the shared requested times
  ConsistencyReport rep;
  rep.n1 = n1;
  rep.n2 = n2;
  size_t i1 = 0, i2 = 0;
  for (double t : times) {
    while (i1 < rec1.times.size() && rec1.times[i1] < t - 1e-12) ++i1;
    while (i2 < rec2.times.size() && rec2.times[i2] < t - 1e-12) ++i2;
    if (i1 >= rec1.times.size() || i2 >= rec2.times.size()) break;
    if (std::abs(rec1.times[i1] - t) > 1e-9 || std::abs(rec2.times[i2] - t) > 1e-9) continue;
    const Vector& a = rec1.states[i1];
    const Vector& b = rec2.states[i2];
    const double leak = leakage(b, n1);
    rep.times.push_back(t);
    rep.leakages.push_back(leak);
    rep.max_leakage = std::max(rep.max_leakage, leak);
    rep.max_state_gap = std::max(rep.max_state_gap, (a - b.head(n1)).norm());
  }
  return rep;
}

}  // namespace liegal::propagate

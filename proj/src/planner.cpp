// planner.cpp — steering, curve tracking, moduli lifts, phase alignment
#include "liegal/planner.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace liegal::planner {

double GeneratorSchedule::total_duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

Matrix schedule_flow(const GeneratorFamily& family, const GeneratorSchedule& sched) {
  const int n = family.sys.n;
  Matrix flow = Matrix::Identity(n, n);
  for (const auto& seg : sched.segments)
    flow = expm_skew(family.find(seg.label).m, seg.duration) * flow;
  return flow;
}

std::vector<Matrix> schedule_flow_prefix(const GeneratorFamily& family,
                                         const GeneratorSchedule& sched) {
  const int n = family.sys.n;
  std::vector<Matrix> out;
  out.reserve(sched.segments.size() + 1);
  out.push_back(Matrix::Identity(n, n));
  for (const auto& seg : sched.segments)
    out.push_back(expm_skew(family.find(seg.label).m, seg.duration) * out.back());
  return out;
}

// ---------- steering ----------

namespace {

// |sum_k c_k e^(i theta_k d)| and its maximizer over a window, by grid + bisected
// local refinement
double line_maximize(const std::vector<Complex>& c, const std::vector<double>& theta,
                     double window, double& best_d) {
  auto value = [&](double d) {
    Complex s(0, 0);
    for (size_t k = 0; k < c.size(); ++k) s += c[k] * std::polar(1.0, theta[k] * d);
    return std::abs(s);
  };
  const int grid = 192;
  best_d = 0.0;
  double best = value(0.0);
  for (int g = 1; g <= grid; ++g) {
    const double d = window * g / grid;
    const double v = value(d);
    if (v > best) { best = v; best_d = d; }
  }
  double step = window / grid;
  for (int it = 0; it < 40 && step > 1e-15 * (1.0 + best_d); ++it) {
    step *= 0.5;
    for (double cand : {best_d - step, best_d + step}) {
      if (cand < 0.0) continue;
      const double v = value(cand);
      if (v > best) { best = v; best_d = cand; }
    }
  }
  return best;
}

struct SteerWork {
  std::vector<const liealg::Generator*> gens;
  std::vector<SkewEig> eigs;
  std::vector<double> windows;  // line-search horizon per generator
};

SteerWork steer_work(const GeneratorFamily& family) {
  SteerWork w;
  for (const auto& g : family.gens) {
    w.gens.push_back(&g);
    w.eigs.push_back(skew_eig(g.m));
    double min_nonzero = 0.0;
    for (double th : w.eigs.back().phases) {
      const double a = std::abs(th);
      if (a > 1e-12 && (min_nonzero == 0.0 || a < min_nonzero)) min_nonzero = a;
    }
    w.windows.push_back(min_nonzero > 0 ? 2.0 * kPi / min_nonzero : 1.0);
  }
  return w;
}

// overlap objective: full mode tr(T^* F), columns mode tr(T_r^* F_r)
double overlap_norm(const Matrix& t_adj_cols, const Matrix& flow_cols) {
  return std::abs((t_adj_cols * flow_cols).trace());
}

double objective_to_dist(double f, int denom) {
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * f / denom));
}

}  // namespace

SteerResult steer_su(const GeneratorFamily& family, const Matrix& target,
                     const SteerOptions& opts) {
  const int n = family.sys.n;
  if (target.rows() != n || target.cols() != n)
    throw std::invalid_argument("steer_su: target dimension mismatch");
  const int r = opts.columns > 0 ? opts.columns : n;
  if (r > n) throw std::invalid_argument("steer_su: more target columns than the dimension");
  {
    const Matrix t_cols = target.leftCols(r);
    if ((t_cols.adjoint() * t_cols - Matrix::Identity(r, r)).norm() > 1e-8)
      throw std::invalid_argument("steer_su: target columns are not orthonormal");
  }
  if (!opts.skip_condition_check) {
    liealg::ClosureResult closure = liealg::lie_closure(family.gens);
    const Matrix id = Matrix::Identity(n, n);
    std::vector<Matrix> traceless;
    for (const Matrix& b : closure.basis) {
      Matrix t = b - (b.trace() / static_cast<double>(n)) * id;
      const double norm = t.norm();
      if (norm < 1e-12) continue;
      t /= norm;
      for (const Matrix& q : traceless) t -= (q.conjugate().cwiseProduct(t)).sum().real() * q;
      if (t.norm() < 1e-8) continue;
      t /= t.norm();
      traceless.push_back(std::move(t));
    }
    if (static_cast<int>(traceless.size()) < n * n - 1)
      throw std::invalid_argument("steer_su: the family closure misses su(n); steering would "
                                  "not converge");
  }

  SteerWork work = steer_work(family);
  const int m = static_cast<int>(work.gens.size());
  const Matrix target_adj = target.leftCols(r).adjoint();

  std::mt19937_64 rng(opts.seed);
  SteerResult best;
  best.achieved = 2.0;

  for (int restart = 0; restart < std::max(1, opts.restarts); ++restart) {
    // word: round-robin blocks, order shuffled per restart
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    if (restart > 0) std::shuffle(order.begin(), order.end(), rng);

    int reps = std::max(1, std::min(3, opts.budget / std::max(1, m)));
    std::vector<int> word;
    std::vector<double> dur;
    auto grow = [&](int add_reps) {
      std::uniform_real_distribution<double> init(0.0, 0.1);
      for (int rep = 0; rep < add_reps; ++rep)
        for (int i : order) {
          word.push_back(i);
          dur.push_back(restart == 0 ? 0.0 : init(rng));
        }
    };
    grow(reps);

    double f_best = -1.0;
    int sweeps_done = 0;
    bool converged = false;
    while (sweeps_done < opts.max_sweeps) {
      // chronological flow: position 0 acts first, so
      // flow = P_{s-1} ... P_1 P_0 with P_i = exp(dur_i M_{word_i}).
      const int s = static_cast<int>(word.size());
      std::vector<Matrix> later(s);  // later[i] = P_{s-1} ... P_{i+1}
      later[s - 1] = Matrix::Identity(n, n);
      for (int i = s - 2; i >= 0; --i)
        later[i] = later[i + 1] * work.eigs[word[i + 1]].exp(dur[i + 1]);
      Matrix earlier = Matrix::Identity(n, n).leftCols(r);  // P_{i-1} ... P_0 columns

      double f = 0.0;
      for (int i = 0; i < s; ++i) {
        // flow columns = later[i] * exp(d M) * earlier;
        // tr(T_r^* later V e^(i d theta) V^* earlier) = sum_k c_k e^(i theta_k d)
        const SkewEig& eig = work.eigs[word[i]];
        const Matrix a = eig.vectors.adjoint() * earlier;        // n x r
        const Matrix b = target_adj * later[i] * eig.vectors;    // r x n
        std::vector<Complex> c(eig.phases.size());
        for (size_t k = 0; k < c.size(); ++k) c[k] = (a.row(k) * b.col(k))(0, 0);
        std::vector<double> theta(eig.phases.begin(), eig.phases.end());
        double d = dur[i];
        f = line_maximize(c, theta, work.windows[word[i]], d);
        dur[i] = d;
        earlier = eig.exp(d) * earlier;
      }
      ++sweeps_done;
      const double dist = objective_to_dist(f, r);
      if (dist <= opts.tol) { f_best = f; converged = true; }
      if (converged) break;
      if (f <= f_best + 1e-12) {
        // stagnated: grow the word if budget remains, else stop this restart
        if (static_cast<int>(word.size()) + m <= opts.budget) {
          grow(1);
        } else {
          break;
        }
      }
      f_best = std::max(f, f_best);
    }

    // assemble the schedule for this restart
    GeneratorSchedule sched;
    for (size_t i = 0; i < word.size(); ++i)
      if (dur[i] > 1e-12) sched.segments.push_back({work.gens[word[i]]->label, dur[i]});
    Matrix flow = schedule_flow(family, sched);
    const double dist = objective_to_dist(overlap_norm(target_adj, flow.leftCols(r)), r);
    if (dist < best.achieved) {
      best.achieved = dist;
      best.schedule = std::move(sched);
      best.converged = dist <= opts.tol;
      best.sweeps = sweeps_done;
      best.restarts_used = restart + 1;
    }
    if (best.converged) break;
  }
  return best;
}

// ---------- curve tracking ----------

TrackingPlan track_su(const GeneratorFamily& family, const std::vector<Matrix>& curve,
                      const std::vector<double>& times, const TrackOptions& opts) {
  if (curve.size() != times.size())
    throw std::invalid_argument("track_su: curve and times lengths differ");
  if (curve.size() < 2) throw std::invalid_argument("track_su: need at least two samples");
  const int n = family.sys.n;
  if ((curve.front() - Matrix::Identity(n, n)).norm() > 1e-9)
    throw std::invalid_argument("track_su: the curve must start at the identity");
  const int steps = static_cast<int>(curve.size()) - 1;
  for (int i = 0; i < steps; ++i)
    if (op_norm(curve[i + 1] - curve[i]) >= 1.0)
      throw std::invalid_argument("track_su: consecutive samples are too far apart "
                                  "(operator distance >= 1); refine the sampling");

  TrackingPlan plan;
  plan.sample_times = times;
  plan.tau.push_back(0.0);

  SteerOptions sopts;
  sopts.tol = opts.eps / (2.0 * steps);
  sopts.budget = opts.budget_per_step;
  sopts.restarts = opts.restarts;
  sopts.seed = opts.seed;
  sopts.skip_condition_check = true;  // checked once here
  {
    liealg::ClosureResult closure = liealg::lie_closure(family.gens);
    if (closure.dim < n * n - 1)
      throw std::invalid_argument("track_su: the family closure misses su(n)");
  }

  Matrix flow = Matrix::Identity(n, n);
  for (int i = 0; i < steps; ++i) {
    const Matrix increment = curve[i + 1] * flow.adjoint();
    SteerResult step = steer_su(family, increment, sopts);
    plan.step_errors.push_back(step.achieved);
    plan.worst_step_error = std::max(plan.worst_step_error, step.achieved);
    for (const auto& seg : step.schedule.segments) {
      plan.schedule.segments.push_back(seg);
      flow = expm_skew(family.find(seg.label).m, seg.duration) * flow;
    }
    plan.tau.push_back(plan.schedule.total_duration());
  }
  return plan;
}

// ---------- moduli lifts ----------

namespace {

// minimal rotation carrying unit vector a to unit vector b (identity plane fix)
Eigen::MatrixXd plane_rotation(const RealVector& a, const RealVector& b) {
  const Eigen::Index n = a.size();
  const double c = a.dot(b);
  RealVector w = b - c * a;
  const double s = w.norm();
  Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(n, n);
  if (s < 1e-15) return rot;
  w /= s;
  rot += (c - 1.0) * (a * a.transpose() + w * w.transpose());
  rot += s * (w * a.transpose() - a * w.transpose());
  return rot;
}

}  // namespace

std::vector<Matrix> lift_moduli_curve(const std::vector<RealVector>& moduli,
                                      const Vector& psi0) {
  if (moduli.empty()) throw std::invalid_argument("lift_moduli_curve: empty curve");
  const Eigen::Index n = psi0.size();
  std::vector<RealVector> r;
  for (const auto& row : moduli) {
    if (row.size() != n) throw std::invalid_argument("lift_moduli_curve: dimension mismatch");
    if (row.minCoeff() < -1e-12)
      throw std::invalid_argument("lift_moduli_curve: moduli must be nonnegative");
    RealVector v = row.cwiseMax(0.0);
    const double norm = v.norm();
    if (std::abs(norm - 1.0) > 1e-6)
      throw std::invalid_argument("lift_moduli_curve: moduli rows must have unit norm");
    r.push_back(v / norm);
  }
  RealVector r0(n);
  for (Eigen::Index k = 0; k < n; ++k) r0[k] = std::abs(psi0[k]);
  if ((r0 - r.front()).norm() > 1e-6)
    throw std::invalid_argument("lift_moduli_curve: the first row must match |psi0|");

  Matrix d = Matrix::Identity(n, n);
  for (Eigen::Index k = 0; k < n; ++k)
    if (std::abs(psi0[k]) > 1e-12) d(k, k) = psi0[k] / std::abs(psi0[k]);

  std::vector<Matrix> out;
  Eigen::MatrixXd accum = Eigen::MatrixXd::Identity(n, n);
  out.push_back(Matrix::Identity(n, n));
  for (size_t i = 1; i < r.size(); ++i) {
    accum = plane_rotation(r[i - 1], r[i]) * accum;
    out.push_back(d * accum.cast<Complex>() * d.adjoint());
  }
  return out;
}

// ---------- target lifting ----------

LiftResult lift_target(const std::vector<Vector>& initial, const std::vector<Vector>& target,
                       int n0, double eps) {
  if (initial.empty() || initial.size() != target.size())
    throw std::invalid_argument("lift_target: state lists must be nonempty and equal-sized");
  const int r = static_cast<int>(initial.size());

  auto retained_at = [&](int n) {
    double worst = 1.0;
    for (const auto& list : {initial, target})
      for (const auto& v : list) {
        double kept = 0.0;
        for (Eigen::Index k = 0; k < std::min<Eigen::Index>(n, v.size()); ++k)
          kept += std::norm(v[k]);
        worst = std::min(worst, kept / v.squaredNorm());
      }
    return worst;
  };

  Eigen::Index max_len = n0;
  for (const auto& list : {initial, target})
    for (const auto& v : list) max_len = std::max(max_len, v.size());

  int n = std::max(n0, r);
  while (n < max_len && retained_at(n) < 1.0 - eps * eps) ++n;

  auto truncate_states = [&](const std::vector<Vector>& list) {
    Matrix m(n, r);
    for (int c = 0; c < r; ++c) {
      Vector v = Vector::Zero(n);
      for (Eigen::Index k = 0; k < std::min<Eigen::Index>(n, list[c].size()); ++k)
        v[k] = list[c][k];
      const double norm = v.norm();
      if (norm < 1e-9)
        throw std::invalid_argument("lift_target: a state loses all mass at this level");
      m.col(c) = v / norm;
    }
    return m;
  };

  Matrix a = truncate_states(initial);
  Matrix b = truncate_states(target);

  // orthonormalize both frames consistently (Gram-Schmidt with shared pivots)
  for (int c = 0; c < r; ++c) {
    for (int q = 0; q < c; ++q) {
      a.col(c) -= a.col(q).dot(a.col(c)) * a.col(q);
      b.col(c) -= b.col(q).dot(b.col(c)) * b.col(q);
    }
    const double na = a.col(c).norm(), nb = b.col(c).norm();
    if (na < 1e-9 || nb < 1e-9)
      throw std::invalid_argument("lift_target: states are (numerically) dependent");
    a.col(c) /= na;
    b.col(c) /= nb;
  }

  auto complete = [&](const Matrix& cols) {
    Eigen::HouseholderQR<Matrix> qr(cols);
    Matrix q = qr.householderQ();
    Matrix full(n, n);
    full.leftCols(r) = cols;
    full.rightCols(n - r) = q.rightCols(n - r);
    return full;
  };

  LiftResult out;
  out.n = n;
  out.retained = retained_at(n);
  if (r == n) {
    Matrix g = b * a.adjoint();
    const Complex det = g.determinant();
    out.g = std::polar(1.0, -std::arg(det) / n) * g;
    return out;
  }
  Matrix af = complete(a), bf = complete(b);
  Matrix g = bf * af.adjoint();
  const Complex det = g.determinant();
  // absorb the determinant phase into the completion block
  bf.col(n - 1) *= std::polar(1.0, -std::arg(det));
  out.g = bf * af.adjoint();
  return out;
}

// ---------- phase alignment ----------

PhaseAlignResult phase_align(const galerkin::TruncatedSystem& sys, const Vector& c,
                             const Vector& d, double tol) {
  const int n = sys.n;
  if (c.size() != n || d.size() != n)
    throw std::invalid_argument("phase_align: dimension mismatch");
  auto value = [&](double t) {
    double worst = 0.0;
    for (int k = 0; k < n; ++k)
      worst = std::max(worst, std::abs(std::polar(1.0, sys.a_diag[k] * t) * c[k] - d[k]));
    return worst;
  };

  double gap_min = 0.0, freq_max = 0.0;
  for (int k = 0; k < n; ++k) {
    if (std::abs(c[k]) < 1e-12) continue;
    freq_max = std::max(freq_max, std::abs(sys.a_diag[k]));
    for (int l = 0; l < n; ++l) {
      if (std::abs(c[l]) < 1e-12) continue;
      const double g = std::abs(sys.a_diag[k] - sys.a_diag[l]);
      if (g > 1e-12 && (gap_min == 0.0 || g < gap_min)) gap_min = g;
    }
  }
  if (gap_min == 0.0) gap_min = freq_max > 0 ? freq_max : 1.0;
  if (freq_max == 0.0) freq_max = 1.0;

  PhaseAlignResult best;
  best.t = 0.0;
  best.dist = value(0.0);
  double horizon = 2.0 * kPi * n / gap_min;
  const double step = 2.0 * kPi / (64.0 * freq_max);
  double t0 = 0.0;
  for (int round = 0; round < 10 && best.dist > tol; ++round) {
    for (double t = t0; t <= horizon; t += step) {
      const double v = value(t);
      if (v < best.dist) { best.dist = v; best.t = t; }
    }
    // local refinement around the best point
    double local = step;
    for (int it = 0; it < 40; ++it) {
      local *= 0.5;
      for (double cand : {best.t - local, best.t + local}) {
        if (cand < 0) continue;
        const double v = value(cand);
        if (v < best.dist) { best.dist = v; best.t = cand; }
      }
    }
    t0 = horizon;
    horizon *= 2.0;
  }
  return best;
}

}  // namespace liegal::planner

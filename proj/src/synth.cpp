// synth.cpp — convexified pulse trains, staircase schedules, physical controls
#include "liegal/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace liegal::synth {

// ---------- the convexification constant ----------

VarpiResult varpi(double tol) {
  if (tol <= 0) throw std::invalid_argument("varpi: tol must be positive");
  double partial = 1.0;
  VarpiResult out;
  for (int k = 2; k <= 100000000; ++k) {
    partial *= std::cos(kPi / (2.0 * k));
    // remainder bracket: for x = pi/(2m), sum_{m>k} log cos x lies in
    // [-(pi^2/8) sum m^-2 - (pi^4/96) sum m^-4, -(pi^2/8) sum m^-2] with
    // 1/(k+1) < sum_{m>k} m^-2 < 1/k and sum_{m>k} m^-4 < 1/(3k^3).
    const double kk = static_cast<double>(k);
    const double lower = partial * std::exp(-kPi * kPi / (8.0 * kk) -
                                            kPi * kPi * kPi * kPi / (288.0 * kk * kk * kk));
    const double upper = partial * std::exp(-kPi * kPi / (8.0 * (kk + 1.0)));
    if (upper - lower < tol) {
      out.value = 0.5 * (lower + upper);
      out.lower = lower;
      out.upper = upper;
      out.terms = k - 1;
      return out;
    }
  }
  throw std::runtime_error("varpi: bracket did not close (tol too small)");
}

// ---------- pulse trains ----------

namespace {

// Joint moment discrepancy of a train: component 0 tracks the active frequency
// against varpi*xi, the rest track the suppressed frequencies against 0.
struct MomentAccumulator {
  std::vector<double> freqs;  // gamma1 first
  Complex target;             // varpi * xi
  std::vector<Complex> sum;

  explicit MomentAccumulator(const PulseTrain& t) : target(t.varpi * t.xi) {
    freqs.push_back(t.gamma1);
    for (double g : t.suppressed) freqs.push_back(g);
    sum.assign(freqs.size(), Complex(0, 0));
  }
  void add(double tau) {
    for (size_t i = 0; i < freqs.size(); ++i) sum[i] += std::polar(1.0, freqs[i] * tau);
  }
  void sub(double tau) {
    for (size_t i = 0; i < freqs.size(); ++i) sum[i] -= std::polar(1.0, freqs[i] * tau);
  }
  // || sum + mu(tau) - (count+1) * T ||^2 where T = (target, 0, ..., 0)
  double probe(double tau, int count) const {
    double d = 0.0;
    for (size_t i = 0; i < freqs.size(); ++i) {
      Complex s = sum[i] + std::polar(1.0, freqs[i] * tau);
      if (i == 0) s -= static_cast<double>(count + 1) * target;
      d += std::norm(s);
    }
    return d;
  }
};

void fill_defects(PulseTrain& t) {
  const double k = static_cast<double>(t.taus.size());
  Complex active(0, 0);
  for (double tau : t.taus) active += std::polar(1.0, t.gamma1 * tau);
  t.active_defect = std::abs(active / k - t.varpi * t.xi);
  t.worst_suppressed = 0.0;
  for (double g : t.suppressed) {
    Complex s(0, 0);
    for (double tau : t.taus) s += std::polar(1.0, g * tau);
    t.worst_suppressed = std::max(t.worst_suppressed, std::abs(s / k));
  }
}

// One greedy + polish attempt at a fixed pulse count.
PulseTrain attempt(double gamma1, const std::vector<double>& suppressed, Complex xi,
                   double varpi_value, double tau0, double spacing, int k,
                   const PulseOptions& opts) {
  PulseTrain t;
  t.gamma1 = gamma1;
  t.suppressed = suppressed;
  t.xi = xi;
  t.varpi = varpi_value;
  t.tau0 = tau0;
  t.spacing = spacing;

  double gmax = std::abs(gamma1);
  for (double g : suppressed) gmax = std::max(gmax, std::abs(g));
  const double window = gmax > 0 ? opts.wraps * 2.0 * kPi / gmax : spacing * opts.wraps;
  const int grid = 96;

  MomentAccumulator acc(t);
  t.taus.reserve(k);
  double prev = tau0 - spacing;  // so the first pulse may sit at tau0
  for (int m = 0; m < k; ++m) {
    const double lo = prev + spacing;
    double best_tau = lo, best = acc.probe(lo, m);
    for (int g = 1; g <= grid; ++g) {
      const double tau = lo + window * g / grid;
      const double d = acc.probe(tau, m);
      if (d < best) { best = d; best_tau = tau; }
    }
    acc.add(best_tau);
    t.taus.push_back(best_tau);
    prev = best_tau;
  }

  // spacing-preserving continuous polish, one pulse at a time; the moment sum
  // over the other pulses is kept incrementally (rebuilt each sweep so rounding
  // drift cannot accumulate across sweeps)
  const int refine = 32;
  for (int sweep = 0; sweep < opts.polish_sweeps; ++sweep) {
    MomentAccumulator rest(t);
    for (double tau : t.taus) rest.add(tau);
    double moved = 0.0;
    for (int m = 0; m < k; ++m) {
      rest.sub(t.taus[m]);
      const double lo = m == 0 ? tau0 : t.taus[m - 1] + spacing;
      const double hi = m + 1 < k ? t.taus[m + 1] - spacing
                                  : t.taus[m] + window;
      if (hi <= lo) {
        rest.add(t.taus[m]);
        continue;
      }
      double best_tau = t.taus[m], best = rest.probe(t.taus[m], k - 1);
      for (int g = 0; g <= refine; ++g) {
        const double tau = lo + (hi - lo) * g / refine;
        const double d = rest.probe(tau, k - 1);
        if (d < best) { best = d; best_tau = tau; }
      }
      // local quadratic refinement around the best grid point
      double step = (hi - lo) / refine;
      for (int it = 0; it < 20 && step > 1e-14 * (1.0 + std::abs(best_tau)); ++it) {
        step *= 0.5;
        for (double cand : {best_tau - step, best_tau + step}) {
          if (cand < lo || cand > hi) continue;
          const double d = rest.probe(cand, k - 1);
          if (d < best) { best = d; best_tau = cand; }
        }
      }
      moved += std::abs(best_tau - t.taus[m]);
      t.taus[m] = best_tau;
      rest.add(best_tau);
    }
    if (moved < 1e-13 * k) break;
  }

  fill_defects(t);
  return t;
}

}  // namespace

void evaluate_train(PulseTrain& train) {
  if (train.taus.empty()) throw std::invalid_argument("evaluate_train: empty train");
  fill_defects(train);
}

PulseTrain convexify_pulses(double gamma1, const std::vector<double>& suppressed, Complex xi,
                            double varpi_value, double tau0, const PulseOptions& opts) {
  if (std::abs(std::abs(xi) - 1.0) > 1e-12)
    throw std::invalid_argument("convexify_pulses: xi must be unimodular");
  if (gamma1 == 0.0 && !(xi == Complex(1, 0)) )
    throw std::invalid_argument("convexify_pulses: a zero active frequency forces xi = 1");
  for (double g : suppressed)
    if (g == 0.0 || g == gamma1)
      throw std::invalid_argument("convexify_pulses: suppressed frequencies must be "
                                  "nonzero and distinct from the active one");

  PulseTrain best;
  bool have_best = false;
  for (int k = std::max(1, opts.k_init); k <= opts.k_cap; k *= 2) {
    const double spacing =
        opts.spacing > 0 ? opts.spacing
                         : (opts.spacing_over_k > 0 ? opts.spacing_over_k / k : 0.0);
    // the zero-frequency moment is the constant 1: varpi_value must be 1 and
    // only the suppressed frequencies constrain the train
    const double target_varpi = gamma1 == 0.0 ? 1.0 : varpi_value;
    PulseTrain t = attempt(gamma1, suppressed, xi, target_varpi, tau0, spacing, k, opts);
    t.converged = t.active_defect <= opts.tol && t.worst_suppressed <= opts.tol;
    const double score = std::max(t.active_defect, t.worst_suppressed);
    if (!have_best || score < std::max(best.active_defect, best.worst_suppressed)) {
      best = std::move(t);
      have_best = true;
    }
    if (best.converged) break;
  }
  return best;
}

// ---------- interaction-frame schedules ----------

namespace {

// Signed per-entry frequency lambda_l - lambda_k of the interaction frame.
double entry_freq(const galerkin::TruncatedSystem& sys, int k, int l) {
  return sys.a_diag[l] - sys.a_diag[k];
}

// integral_0^len exp(i g (omega0 + slope * s)) ds
Complex phase_integral(double g, double omega0, double slope, double len) {
  const double gc = g * slope;
  if (gc == 0.0) return std::polar(len, g * omega0);
  const Complex rot = std::polar(1.0, g * omega0);
  return rot * (std::polar(1.0, gc * len) - Complex(1, 0)) / Complex(0, gc);
}

// Exact integral of Theta(omega, v) over one affine interval.
Matrix theta_integral(const galerkin::TruncatedSystem& sys, const InteractionInterval& iv) {
  const int n = sys.n;
  Matrix m = Matrix::Zero(n, n);
  const double len = iv.t1 - iv.t0;
  for (int j = 0; j < static_cast<int>(sys.b.size()); ++j) {
    if (iv.v[j] == 0.0) continue;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        const Complex b = sys.b[j](r, c);
        if (b == Complex(0, 0)) continue;
        m(r, c) += iv.v[j] * b * phase_integral(entry_freq(sys, r, c), iv.omega0, iv.slope, len);
      }
  }
  return m;
}

// Nonzero gap magnitudes carried by control j on the system (its activation
// frequencies in the interaction frame).
std::vector<double> control_gaps(const galerkin::TruncatedSystem& sys,
                                 const galerkin::GapSet& gaps, int j) {
  std::vector<bool> seen(gaps.values.size(), false);
  for (int r = 0; r < sys.n; ++r)
    for (int c = r + 1; c < sys.n; ++c) {
      if (sys.b[j - 1](r, c) == Complex(0, 0)) continue;
      seen[gaps.pair_gap(r, c)] = true;
    }
  std::vector<double> out;
  for (size_t g = 1; g < gaps.values.size(); ++g)
    if (seen[g]) out.push_back(gaps.values[g]);
  return out;
}

struct TrainSpec {
  double duration = 0.0;
  double gamma1 = 0.0;       // 0 for a pure zero-gap segment
  Complex xi = 1.0;          // train phase (already conjugated)
  double vj = 0.0;           // signed control value
  int j = 1;
};

}  // namespace

InteractionSchedule schedule_from_generators(const GeneratorFamily& family,
                                             const GeneratorSchedule& plan, int big_n,
                                             const SynthOptions& opts) {
  const galerkin::TruncatedSystem& sys = family.sys;
  if (big_n != sys.n)
    throw std::invalid_argument("schedule_from_generators: family is not on the requested "
                                "truncation level");
  const int p = static_cast<int>(sys.b.size());
  const double w = varpi(1e-12).value;

  InteractionSchedule sched;
  sched.n = family.small_n;
  sched.big_n = sys.n;

  double t = 0.0;      // schedule clock
  double omega = 0.0;  // continuous staircase value

  auto push_drift = [&](const std::string& label, double duration) {
    InteractionInterval iv;
    iv.t0 = t;
    iv.t1 = t + duration;
    iv.omega0 = omega;
    iv.slope = 0.0;
    iv.alpha = 1;
    iv.v = RealVector::Zero(p);
    sched.intervals.push_back(std::move(iv));
    t += duration;
    SegmentReport rep;
    rep.label = label;
    rep.duration = duration;
    sched.reports.push_back(std::move(rep));
  };

  auto push_train = [&](const std::string& label, const TrainSpec& spec,
                        const std::vector<double>& suppressed, const Matrix& target) {
    // The K plateaus have length duration/K exactly (their phase-weighted sum is
    // the realized effective generator); each is preceded by an extra ramp of
    // length ramp_fraction * duration / K^2, so a segment stretches by the
    // vanishing factor 1 + ramp_fraction/K. A plateau at offset tau contributes
    // e^{i gamma tau} * l * e^{i gamma l/2} sinc(gamma l/2) per frequency, so the
    // active moment target is pre-compensated by the inverse factor.
    // smallest pulse count keeping the sinc compensation well-conditioned, then
    // refined by the index h (K doubles with h, so both the moment discrepancy
    // and the per-plateau averaging error shrink)
    int k_base = std::max(1, opts.k_init);
    while (0.5 * std::abs(spec.gamma1) * spec.duration / k_base > 0.7 && k_base <= opts.k_cap)
      k_base *= 2;
    PulseTrain train;
    bool accepted = false;
    for (int k = k_base * std::max(1, opts.h); k <= opts.k_cap; k *= 2) {
      const double plateau = spec.duration / k;
      const double half_angle = 0.5 * std::abs(spec.gamma1) * plateau;
      const double eps = opts.ramp_fraction * spec.duration / (static_cast<double>(k) * k);
      const double sinc = half_angle > 0 ? std::sin(half_angle) / half_angle : 1.0;
      const Complex comp = std::polar(1.0, -spec.gamma1 * plateau / 2.0);

      PulseOptions popts;
      popts.tol = opts.train_tol;
      popts.k_init = k;
      popts.k_cap = k;
      popts.spacing = opts.spacing > 0 ? opts.spacing : (plateau + eps) * (1.0 + 1e-9);
      train = convexify_pulses(spec.gamma1, suppressed, spec.xi * comp,
                               spec.gamma1 == 0.0 ? 1.0 : w / sinc,
                               /*tau0=*/omega + eps, popts);
      if (train.converged) { accepted = true; break; }
    }
    if (!accepted)
      throw std::runtime_error("schedule_from_generators: no pulse train met the moment "
                               "tolerance within the pulse budget for segment " + label);
    const int k = static_cast<int>(train.taus.size());
    const double eps = opts.ramp_fraction * spec.duration / (static_cast<double>(k) * k);
    const double plateau = spec.duration / k;

    RealVector v = RealVector::Zero(p);
    v[spec.j - 1] = spec.vj;
    const RealVector v_zero = RealVector::Zero(p);
    const size_t first_interval = sched.intervals.size();
    for (int m = 0; m < k; ++m) {
      // ramp up to the pulse offset, then hold a slope-1 plateau
      const double target_omega = train.taus[m];
      if (target_omega < omega - 1e-9 * (1.0 + std::abs(omega)))
        throw std::runtime_error("schedule_from_generators: pulse times regressed");
      InteractionInterval ramp;
      ramp.t0 = t;
      ramp.t1 = t + eps;
      ramp.omega0 = omega;
      ramp.slope = std::max(1.0, (target_omega - omega) / eps);
      ramp.alpha = 0;
      ramp.v = v_zero;
      sched.intervals.push_back(ramp);
      t = ramp.t1;
      omega = ramp.omega0 + ramp.slope * eps;

      InteractionInterval flat;
      flat.t0 = t;
      flat.t1 = t + plateau;
      flat.omega0 = omega;
      flat.slope = 1.0;
      flat.alpha = 0;
      flat.v = v;
      sched.intervals.push_back(flat);
      t = flat.t1;
      omega += plateau;
    }

    SegmentReport rep;
    rep.label = label;
    rep.duration = spec.duration;
    rep.pulses = k;
    rep.active_defect = train.active_defect;
    rep.worst_suppressed = train.worst_suppressed;
    Matrix realized = Matrix::Zero(sys.n, sys.n);
    for (size_t i = first_interval; i < sched.intervals.size(); ++i)
      realized += theta_integral(sys, sched.intervals[i]);
    rep.theta_defect = (realized - spec.duration * target).norm();
    sched.reports.push_back(std::move(rep));
    sched.trains.push_back(std::move(train));
  };

  const auto realize = [&](const planner::Segment& seg) {
    if (seg.duration < 0) throw std::invalid_argument("schedule has a negative duration");
    if (seg.duration == 0) return;
    const liealg::Generator& gen = family.find(seg.label);
    using liealg::GenKind;
    if (gen.kind == GenKind::drift) {
      push_drift(seg.label, seg.duration);
      return;
    }
    if (gen.kind == GenKind::activation)
      throw std::invalid_argument("schedule_from_generators: plain activations are not "
                                  "realizable; use a W- or rotated-V family");
    if (family.bounds.empty())
      throw std::invalid_argument("schedule_from_generators: family carries no bounds");
    const double delta = family.bounds[gen.j - 1].delta;
    const double sigma = gen.kind == GenKind::zero_gap ? 0.0 : family.gaps.values[gen.gap];
    std::vector<double> supp = control_gaps(sys, family.gaps, gen.j);
    supp.erase(std::remove_if(supp.begin(), supp.end(),
                              [&](double g) {
                                return std::abs(g - sigma) <= 1e-9 * std::max(1.0, sigma);
                              }),
               supp.end());

    if (gen.kind == GenKind::zero_gap) {
      // constant control on the plateaus; every activation frequency suppressed
      TrainSpec spec;
      spec.duration = seg.duration;
      spec.gamma1 = 0.0;
      spec.xi = 1.0;
      spec.vj = delta;
      spec.j = gen.j;
      push_train(seg.label, spec, supp, gen.m);
      return;
    }
    if (gen.kind == GenKind::zero_plus_activation) {
      TrainSpec spec;
      spec.duration = seg.duration;
      spec.gamma1 = sigma;
      spec.xi = std::conj(gen.xi);  // train phase convention mirrors j_rotate
      spec.vj = delta;
      spec.j = gen.j;
      push_train(seg.label, spec, supp, gen.m);
      return;
    }
    // activation_rot: delta * varpi * J_xi(E_sigma). With a trivial zero-gap
    // part a single train realizes it; otherwise the zero-gap part is cancelled
    // by a sign-flipped second half (the control bound must be symmetric).
    const Matrix zero_part = galerkin::excite(sys.b[gen.j - 1], 0, family.gaps);
    const Matrix act = galerkin::excite(sys.b[gen.j - 1], gen.gap, family.gaps);
    if (zero_part.norm() < 1e-14) {
      TrainSpec spec;
      spec.duration = seg.duration;
      spec.gamma1 = sigma;
      spec.xi = std::conj(gen.xi);
      spec.vj = delta;
      spec.j = gen.j;
      push_train(seg.label, spec, supp, gen.m);
      return;
    }
    if (family.bounds[gen.j - 1].kind != models::BoundKind::symmetric)
      throw std::invalid_argument(
          "schedule_from_generators: rotated activation of a non-symmetric control with a "
          "nontrivial zero-gap part is not realizable");
    const Matrix rot = galerkin::j_rotate(act, gen.xi, sys);
    const Matrix half_a = delta * (zero_part + w * rot);
    const Matrix half_b = -delta * zero_part + delta * w * rot;
    TrainSpec spec_a;
    spec_a.duration = seg.duration / 2;
    spec_a.gamma1 = sigma;
    spec_a.xi = std::conj(gen.xi);
    spec_a.vj = delta;
    spec_a.j = gen.j;
    push_train(seg.label + "#a", spec_a, supp, half_a);
    TrainSpec spec_b = spec_a;
    spec_b.xi = -std::conj(gen.xi);
    spec_b.vj = -delta;
    push_train(seg.label + "#b", spec_b, supp, half_b);
  };

  for (const auto& seg : plan.segments) {
    realize(seg);
    sched.segment_ends.push_back(t);
  }

  sched.total_duration = t;
  sched.omega_end = omega;
  for (const auto& r : sched.reports)
    sched.worst_theta_defect = std::max(sched.worst_theta_defect, r.theta_defect);
  return sched;
}

Matrix interaction_primitive(const galerkin::TruncatedSystem& big_sys,
                             const InteractionSchedule& sched, double t) {
  Matrix m = Matrix::Zero(big_sys.n, big_sys.n);
  const Matrix a = big_sys.drift();
  for (const auto& iv : sched.intervals) {
    if (iv.t0 >= t) break;
    InteractionInterval clipped = iv;
    clipped.t1 = std::min(iv.t1, t);
    if (clipped.t1 <= clipped.t0) continue;
    if (iv.alpha) m += (clipped.t1 - clipped.t0) * a;
    m += theta_integral(big_sys, clipped);
  }
  return m;
}

// ---------- physical controls ----------

PhysicalControl to_physical(const InteractionSchedule& sched) {
  PhysicalControl out;
  if (sched.intervals.empty()) return out;
  const int p = static_cast<int>(sched.intervals.front().v.size());
  out.l1_norms.assign(p, 0.0);
  double s = 0.0;
  for (const auto& iv : sched.intervals) {
    const double z = iv.slope + iv.alpha;
    if (z < 1.0 - 1e-12)
      throw std::invalid_argument("to_physical: clock rate below 1 (invalid schedule)");
    PhysicalInterval piv;
    piv.s0 = s;
    piv.s1 = s + z * (iv.t1 - iv.t0);
    piv.u = iv.v / z;
    for (int j = 0; j < p; ++j) out.l1_norms[j] += std::abs(piv.u[j]) * (piv.s1 - piv.s0);
    out.schedule_times.push_back(iv.t0);
    s = piv.s1;
    out.intervals.push_back(std::move(piv));
  }
  out.schedule_times.push_back(sched.intervals.back().t1);
  out.total_duration = s;
  return out;
}

}  // namespace liegal::synth

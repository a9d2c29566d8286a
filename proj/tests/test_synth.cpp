// test_synth.cpp — averaging constant, pulse trains, interaction schedules
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "liegal/synth.hpp"
#include "support/oracles.hpp"

using namespace liegal;
using namespace liegal::testing;

namespace {

constexpr double kVarpiRef = 0.4297802164379886;

// Moments of a pulse train, recomputed from scratch.
Complex train_moment(const std::vector<double>& taus, double gamma) {
  Complex sum = 0.0;
  for (double tau : taus) sum += std::exp(Complex(0, gamma * tau));
  return sum / static_cast<double>(taus.size());
}

liealg::GeneratorFamily well_family(int n) {
  return liealg::assemble_w(models::well_model(1.0), n, synth::varpi().value);
}

const liealg::Generator& first_activation(const liealg::GeneratorFamily& fam) {
  for (const auto& g : fam.gens)
    if (g.kind != liealg::GenKind::drift) return g;
  throw std::runtime_error("family has no activation");
}

}  // namespace

TEST_CASE("the averaging constant carries a tight, consistent bracket") {
  const synth::VarpiResult w = synth::varpi();
  CHECK(w.lower <= w.value);
  CHECK(w.value <= w.upper);
  CHECK(w.upper - w.lower < 1e-11);
  CHECK(std::abs(w.value - kVarpiRef) < 1e-10);
  CHECK(w.terms > 10);

  // finite partial products decrease toward the limit from above
  double partial = 1.0;
  for (int k = 2; k <= 6; ++k) partial *= std::cos(kPi / (2.0 * k));
  CHECK(partial > w.upper);

  // a looser bracket still contains the tight value
  const synth::VarpiResult loose = synth::varpi(1e-6);
  CHECK(loose.upper - loose.lower < 1e-5);
  CHECK(loose.lower <= w.value);
  CHECK(w.value <= loose.upper);
}

TEST_CASE("a single-frequency train hits the scaled phase target") {
  synth::PulseOptions opts;
  opts.tol = 0.02;
  const synth::PulseTrain train =
      synth::convexify_pulses(3.0, {}, Complex(1, 0), kVarpiRef, 1.5, opts);
  REQUIRE(train.converged);
  CHECK(train.active_defect <= opts.tol);
  CHECK(train.worst_suppressed == 0.0);
  REQUIRE(!train.taus.empty());
  CHECK(train.taus.front() >= 1.5);
  // without a spacing floor, times are sorted and may coincide (doubled pulses)
  for (size_t i = 1; i < train.taus.size(); ++i)
    CHECK(train.taus[i] >= train.taus[i - 1]);

  // the reported defect matches a from-scratch moment computation
  const Complex mean = train_moment(train.taus, 3.0);
  CHECK(std::abs(std::abs(mean - kVarpiRef * Complex(1, 0)) - train.active_defect) < 1e-12);
  // the train genuinely spreads phase: the moment is strictly inside the disc
  CHECK(std::abs(mean) < 1.0 - 0.4);
}

TEST_CASE("a three-gap train suppresses the spectator frequencies under a spacing floor") {
  const double g1 = 1.5 * kPi * kPi;
  const std::vector<double> supp = {4.0 * kPi * kPi, 2.5 * kPi * kPi};
  synth::PulseOptions opts;
  opts.tol = 0.02;
  opts.spacing = 10.0;
  const synth::PulseTrain train =
      synth::convexify_pulses(g1, supp, Complex(0, 1), kVarpiRef, 0.0, opts);
  REQUIRE(train.converged);
  CHECK(train.active_defect <= opts.tol);
  CHECK(train.worst_suppressed <= opts.tol);
  for (size_t i = 1; i < train.taus.size(); ++i)
    CHECK(train.taus[i] - train.taus[i - 1] > 10.0);

  // replay from the serialized fields reproduces the defects
  synth::PulseTrain replay;
  replay.gamma1 = train.gamma1;
  replay.suppressed = train.suppressed;
  replay.xi = train.xi;
  replay.varpi = train.varpi;
  replay.taus = train.taus;
  replay.active_defect = 999.0;
  replay.worst_suppressed = 999.0;
  synth::evaluate_train(replay);
  CHECK(std::abs(replay.active_defect - train.active_defect) < 1e-12);
  CHECK(std::abs(replay.worst_suppressed - train.worst_suppressed) < 1e-12);
}

TEST_CASE("pulse construction validates frequencies and the phase") {
  CHECK_THROWS_AS(synth::convexify_pulses(3.0, {}, Complex(0.5, 0), kVarpiRef, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(synth::convexify_pulses(0.0, {2.0}, Complex(0, 1), 1.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(synth::convexify_pulses(3.0, {0.0}, Complex(1, 0), kVarpiRef, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(synth::convexify_pulses(3.0, {3.0}, Complex(1, 0), kVarpiRef, 0.0),
                  std::invalid_argument);
  synth::PulseTrain empty;
  CHECK_THROWS_AS(synth::evaluate_train(empty), std::invalid_argument);
}

TEST_CASE("a zero active frequency keeps the constant moment and suppresses the rest") {
  synth::PulseOptions opts;
  opts.tol = 0.02;
  const synth::PulseTrain train =
      synth::convexify_pulses(0.0, {2.0, 5.0}, Complex(1, 0), 1.0, 0.0, opts);
  REQUIRE(train.converged);
  CHECK(train.active_defect < 1e-12);  // the zero-frequency moment is identically 1
  CHECK(train.worst_suppressed <= opts.tol);
  CHECK(std::abs(train_moment(train.taus, 2.0)) <= opts.tol + 1e-12);
}

TEST_CASE("pinning the pulse budget fixes the train length") {
  synth::PulseOptions opts;
  opts.k_init = 256;
  opts.k_cap = 256;
  const synth::PulseTrain train =
      synth::convexify_pulses(3.0, {5.0}, Complex(1, 0), kVarpiRef, 0.0, opts);
  CHECK(train.taus.size() == 256);
}

TEST_CASE("drift segments pass through the interaction schedule untouched") {
  const liealg::GeneratorFamily fam = well_family(2);
  planner::GeneratorSchedule plan;
  plan.segments = {{"A", 2.0}};
  const synth::InteractionSchedule sched = synth::schedule_from_generators(fam, plan, 2);
  REQUIRE(sched.intervals.size() == 1);
  CHECK(sched.intervals[0].alpha == 1);
  CHECK(sched.intervals[0].slope == 0.0);
  CHECK(sched.intervals[0].v.cwiseAbs().maxCoeff() == 0.0);
  CHECK(sched.total_duration == doctest::Approx(2.0));
  CHECK(sched.omega_end == 0.0);
  CHECK(sched.worst_theta_defect == 0.0);
  REQUIRE(sched.segment_ends.size() == 1);
  CHECK(sched.segment_ends[0] == doctest::Approx(2.0));
  REQUIRE(sched.reports.size() == 1);
  CHECK(sched.reports[0].pulses == 0);

  // the exact primitive of a drift stretch is t * A
  const Matrix prim = synth::interaction_primitive(fam.sys, sched, 1.25);
  CHECK((prim - 1.25 * fam.sys.drift()).norm() < 1e-13);
  CHECK(synth::interaction_primitive(fam.sys, sched, 0.0).norm() == 0.0);

  const synth::PhysicalControl phys = synth::to_physical(sched);
  CHECK(phys.total_duration == doctest::Approx(2.0));
  CHECK(phys.l1_norms[0] == 0.0);
  REQUIRE(phys.schedule_times.size() == 2);
  CHECK(phys.schedule_times[1] == doctest::Approx(2.0));
}

TEST_CASE("refining the pulse index shrinks the realized-generator defect") {
  const liealg::GeneratorFamily fam = well_family(2);
  const liealg::Generator& act = first_activation(fam);
  planner::GeneratorSchedule plan;
  plan.segments = {{act.label, 1.5}};

  double defect_h1 = 0.0, defect_h8 = 0.0;
  for (int h : {1, 8}) {
    synth::SynthOptions opts;
    opts.h = h;
    const synth::InteractionSchedule sched =
        synth::schedule_from_generators(fam, plan, 2, opts);
    REQUIRE(sched.reports.size() == 1);
    REQUIRE(sched.trains.size() == 1);
    CHECK(sched.reports[0].pulses >= 64 * h);
    CHECK(sched.reports[0].pulses % (64 * h) == 0);
    CHECK(sched.reports[0].active_defect <= opts.train_tol);

    // schedule structure: contiguous intervals, nondecreasing omega, slope >= 1
    // on ramps and plateaus (the physical clock never runs backwards)
    double t = 0.0, omega = 0.0;
    for (const auto& iv : sched.intervals) {
      CHECK(iv.t0 == doctest::Approx(t).epsilon(1e-12));
      CHECK(iv.omega0 >= omega - 1e-9);
      CHECK(iv.slope >= 1.0 - 1e-12);
      t = iv.t1;
      omega = iv.omega0 + iv.slope * (iv.t1 - iv.t0);
    }
    CHECK(sched.segment_ends.back() == doctest::Approx(sched.total_duration));
    CHECK(omega == doctest::Approx(sched.omega_end));

    // the schedule's primitive approximates duration * generator
    const Matrix prim = synth::interaction_primitive(fam.sys, sched, sched.total_duration);
    CHECK(std::abs((prim - 1.5 * act.m).norm() - sched.worst_theta_defect) < 1e-10);

    if (h == 1) defect_h1 = sched.worst_theta_defect;
    if (h == 8) defect_h8 = sched.worst_theta_defect;
  }
  CHECK(defect_h8 < defect_h1 / 2.0);
  CHECK(defect_h1 < 0.05);
}

TEST_CASE("physical controls respect the bounds and the L1 budget") {
  const liealg::GeneratorFamily fam = well_family(2);
  const liealg::Generator& act = first_activation(fam);
  planner::GeneratorSchedule plan;
  plan.segments = {{act.label, 1.5}, {"A", 0.5}};
  const synth::InteractionSchedule sched = synth::schedule_from_generators(fam, plan, 2);
  const synth::PhysicalControl phys = synth::to_physical(sched);

  const double delta = fam.bounds[0].delta;
  double s = 0.0;
  for (const auto& iv : phys.intervals) {
    CHECK(iv.s0 == doctest::Approx(s).epsilon(1e-12));
    CHECK(iv.s1 >= iv.s0);
    CHECK(std::abs(iv.u[0]) <= delta + 1e-12);
    CHECK(iv.u[0] >= 0.0);  // half-bound control never goes negative
    s = iv.s1;
  }
  CHECK(phys.total_duration == doctest::Approx(s));
  CHECK(phys.total_duration >= sched.total_duration - 1e-12);
  // the control is active exactly on the plateaus, which tile the segment
  CHECK(phys.l1_norms[0] == doctest::Approx(delta * 1.5).epsilon(1e-9));
  CHECK(phys.schedule_times.size() == phys.intervals.size() + 1);

  // a schedule whose clock rate dips below 1 is rejected
  synth::InteractionSchedule bad;
  synth::InteractionInterval iv;
  iv.t0 = 0.0;
  iv.t1 = 1.0;
  iv.slope = -0.5;
  iv.alpha = 0;
  iv.v = RealVector::Zero(1);
  bad.intervals.push_back(iv);
  CHECK_THROWS_AS(synth::to_physical(bad), std::invalid_argument);
}

TEST_CASE("interaction schedules validate their inputs") {
  const liealg::GeneratorFamily fam = well_family(2);
  planner::GeneratorSchedule plan;
  plan.segments = {{"A", 2.0}};
  CHECK_THROWS_AS(synth::schedule_from_generators(fam, plan, 3), std::invalid_argument);
  plan.segments = {{"A", -1.0}};
  CHECK_THROWS_AS(synth::schedule_from_generators(fam, plan, 2), std::invalid_argument);
  // zero-duration segments are dropped but still close their plan slot
  plan.segments = {{"A", 0.0}};
  const synth::InteractionSchedule sched = synth::schedule_from_generators(fam, plan, 2);
  CHECK(sched.intervals.empty());
  REQUIRE(sched.segment_ends.size() == 1);
  CHECK(sched.segment_ends[0] == 0.0);
}

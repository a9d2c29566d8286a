// test_planner.cpp — schedule flows, steering, tracking, lifting, phase alignment
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "liegal/planner.hpp"
#include "liegal/synth.hpp"
#include "support/oracles.hpp"

using namespace liegal;
using namespace liegal::testing;

namespace {

liealg::GeneratorFamily well_family(int n) {
  return liealg::assemble_w(models::well_model(1.0), n, synth::varpi().value);
}

std::string first_activation_label(const liealg::GeneratorFamily& fam) {
  for (const auto& g : fam.gens)
    if (g.kind != liealg::GenKind::drift) return g.label;
  throw std::runtime_error("family has no activation");
}

}  // namespace

TEST_CASE("schedule flow multiplies segment exponentials chronologically") {
  const liealg::GeneratorFamily fam = well_family(2);
  const std::string act = first_activation_label(fam);
  planner::GeneratorSchedule sched;
  sched.segments = {{"A", 0.3}, {act, 0.7}, {"A", 0.2}};
  CHECK(sched.total_duration() == doctest::Approx(1.2).epsilon(1e-15));

  const Matrix flow = planner::schedule_flow(fam, sched);
  const Matrix want = expm_taylor(0.2 * fam.find("A").m) *
                      expm_taylor(0.7 * fam.find(act).m) *
                      expm_taylor(0.3 * fam.find("A").m);
  CHECK(op_dist(flow, want) < 1e-12);

  const std::vector<Matrix> prefix = planner::schedule_flow_prefix(fam, sched);
  REQUIRE(prefix.size() == 4);
  CHECK(op_dist(prefix[0], Matrix::Identity(2, 2)) < 1e-15);
  CHECK(op_dist(prefix[1], expm_taylor(0.3 * fam.find("A").m)) < 1e-13);
  CHECK(op_dist(prefix[3], flow) < 1e-13);

  planner::GeneratorSchedule bad;
  bad.segments = {{"nope", 1.0}};
  CHECK_THROWS_AS(planner::schedule_flow(fam, bad), std::invalid_argument);
}

TEST_CASE("steering reaches a full target unitary on the smallest well") {
  const liealg::GeneratorFamily fam = well_family(2);
  Matrix s = random_skew(2, 11);
  s -= (s.trace() / 2.0) * Matrix::Identity(2, 2);  // det of the target = 1
  const Matrix target = expm_taylor(s);

  planner::SteerOptions opts;
  opts.tol = 5e-3;
  opts.seed = 21;
  const planner::SteerResult r = planner::steer_su(fam, target, opts);
  CHECK(r.converged);
  CHECK(r.achieved <= opts.tol);
  for (const auto& seg : r.schedule.segments) CHECK(seg.duration >= 0.0);
  // the reported distance matches the replayed flow
  const Matrix flow = planner::schedule_flow(fam, r.schedule);
  CHECK(std::abs(phase_dist(flow, target) - r.achieved) < 1e-9);
}

TEST_CASE("steering a single column aligns the mapped state only") {
  const liealg::GeneratorFamily fam = well_family(2);
  Vector d(2);
  d << Complex(0.6, 0.0), Complex(0.0, 0.8);
  Matrix target(2, 2);
  target.col(0) = d;
  target.col(1) << Complex(0.0, 0.8), Complex(0.6, 0.0);

  planner::SteerOptions opts;
  opts.tol = 5e-3;
  opts.columns = 1;
  opts.seed = 5;
  const planner::SteerResult r = planner::steer_su(fam, target, opts);
  CHECK(r.converged);
  const Matrix flow = planner::schedule_flow(fam, r.schedule);
  CHECK(std::abs((flow.col(0).adjoint() * d)(0, 0)) > 1.0 - opts.tol);
}

TEST_CASE("steering refuses a family whose closure misses the traceless algebra") {
  liealg::GeneratorFamily fam = well_family(2);
  liealg::GeneratorFamily crippled;
  crippled.sys = fam.sys;
  crippled.gaps = fam.gaps;
  crippled.small_n = fam.small_n;
  crippled.bounds = fam.bounds;
  crippled.gens = {fam.find("A")};
  CHECK_THROWS_AS(planner::steer_su(crippled, Matrix::Identity(2, 2).eval(), {}),
                  std::invalid_argument);
}

TEST_CASE("tracking follows a short unitary curve within the budgeted tolerance") {
  const liealg::GeneratorFamily fam = well_family(2);
  Matrix s = random_skew(2, 31);
  s -= (s.trace() / 2.0) * Matrix::Identity(2, 2);
  s *= 0.6 / s.norm();

  std::vector<double> times = {0.0, 0.2, 0.4};
  std::vector<Matrix> curve;
  for (double t : times) curve.push_back(expm_taylor(t * s));

  planner::TrackOptions opts;
  opts.eps = 0.4;
  opts.seed = 9;
  const planner::TrackingPlan plan = planner::track_su(fam, curve, times, opts);
  const int steps = static_cast<int>(times.size()) - 1;
  REQUIRE(plan.step_errors.size() == static_cast<size_t>(steps));
  REQUIRE(plan.tau.size() == times.size());
  CHECK(plan.worst_step_error <= opts.eps / (2.0 * steps) + 1e-12);
  CHECK(plan.tau.front() == doctest::Approx(0.0));
  for (size_t i = 1; i < plan.tau.size(); ++i) CHECK(plan.tau[i] >= plan.tau[i - 1]);
  CHECK(plan.schedule.total_duration() == doctest::Approx(plan.tau.back()).epsilon(1e-12));
  // accumulated error stays within the end-to-end tolerance
  const Matrix flow = planner::schedule_flow(fam, plan.schedule);
  CHECK(phase_dist(flow, curve.back()) <= opts.eps);
}

TEST_CASE("tracking validates its inputs") {
  const liealg::GeneratorFamily fam = well_family(2);
  const Matrix id = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(planner::track_su(fam, {id}, {0.0}, {}), std::invalid_argument);
  CHECK_THROWS_AS(planner::track_su(fam, {2.0 * id, id}, {0.0, 1.0}, {}),
                  std::invalid_argument);
  Matrix far(2, 2);
  far << 0, 1, 1, 0;  // operator distance 2 from the identity: sampling too coarse
  CHECK_THROWS_AS(planner::track_su(fam, {id, far}, {0.0, 1.0}, {}),
                  std::invalid_argument);
}

TEST_CASE("lifting a moduli curve reproduces the moduli along the initial state") {
  RealVector m0(3), m1(3), m2(3);
  m0 << 1.0, 0.0, 0.0;
  m1 << 0.8, 0.6, 0.0;
  m2 << 0.6, 0.64, std::sqrt(1.0 - 0.36 - 0.4096);
  Vector psi0(3);
  psi0 << std::polar(1.0, 0.3), Complex(0, 0), Complex(0, 0);

  const std::vector<Matrix> lifted = planner::lift_moduli_curve({m0, m1, m2}, psi0);
  REQUIRE(lifted.size() == 3);
  CHECK(op_dist(lifted[0], Matrix::Identity(3, 3)) < 1e-12);
  for (size_t i = 0; i < lifted.size(); ++i) {
    CHECK(unitarity_defect(lifted[i]) < 1e-12);
    const Vector psi = lifted[i] * psi0;
    const RealVector& want = i == 0 ? m0 : (i == 1 ? m1 : m2);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(std::abs(psi[k]) - want[k]) < 1e-12);
  }
  // consecutive lifted samples stay close when the moduli move slowly
  CHECK(op_norm(lifted[1] - lifted[0]) < 1.0);
  CHECK(op_norm(lifted[2] - lifted[1]) < 1.0);
}

TEST_CASE("target lifting maps basis states exactly at the base level") {
  Vector e1 = Vector::Zero(2), e2 = Vector::Zero(2);
  e1[0] = 1.0;
  e2[1] = 1.0;
  const planner::LiftResult lift = planner::lift_target({e1}, {e2}, 2);
  CHECK(lift.n == 2);
  CHECK(lift.retained == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(unitarity_defect(lift.g) < 1e-12);
  CHECK(std::abs(lift.g.determinant() - Complex(1, 0)) < 1e-12);
  CHECK((lift.g * e1 - e2).norm() < 1e-12);
}

TEST_CASE("target lifting raises the level until the mass bound is met") {
  Vector init = Vector::Constant(4, Complex(0.5, 0.0));  // mass 1/4 on each level
  Vector tgt = Vector::Zero(4);
  tgt[0] = 1.0;
  const planner::LiftResult lift = planner::lift_target({init}, {tgt}, 2, 0.05);
  CHECK(lift.n == 4);  // dropping any level loses 25% >> eps^2
  CHECK(lift.retained >= 1.0 - 0.05 * 0.05);
  CHECK((lift.g * init - tgt).norm() < 1e-10);

  // n0 is a floor even when the states fit lower
  Vector e1 = Vector::Zero(2), e2 = Vector::Zero(2);
  e1[0] = 1.0;
  e2[1] = 1.0;
  CHECK(planner::lift_target({e1}, {e2}, 3).n == 3);
}

TEST_CASE("phase alignment finds a drift duration matching the phases") {
  const galerkin::TruncatedSystem sys = galerkin::truncate(models::well_model(1.0), 3);
  Vector c(3);
  c << Complex(M_SQRT1_2, 0), Complex(0, M_SQRT1_2), Complex(0, 0);
  const double t0 = 0.37;
  Vector d(3);
  for (int k = 0; k < 3; ++k)
    d[k] = std::exp(Complex(0, sys.a_diag[k] * t0)) * c[k];

  const planner::PhaseAlignResult r = planner::phase_align(sys, c, d, 1e-2);
  CHECK(r.t >= 0.0);
  CHECK(r.dist <= 1e-2);
  double recompute = 0.0;
  for (int k = 0; k < 3; ++k)
    recompute = std::max(recompute,
                         std::abs(std::exp(Complex(0, sys.a_diag[k] * r.t)) * c[k] - d[k]));
  CHECK(std::abs(recompute - r.dist) < 1e-12);
}

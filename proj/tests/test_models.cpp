// test_models.cpp — drift spectra, coupling conventions, and model serialization
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "liegal/models.hpp"
#include "support/oracles.hpp"

using namespace liegal;
using namespace liegal::testing;

TEST_CASE("well eigenvalues are -k^2 pi^2 / 2 with exact integer form") {
  const models::QuantumModel m = models::well_model(1.0);
  CHECK(m.exact_spectrum());
  for (int k = 1; k <= 12; ++k) {
    CHECK(m.eigenvalue(k) == doctest::Approx(-0.5 * k * k * kPi * kPi).epsilon(1e-14));
    CHECK(m.eigen_num(k) == -static_cast<long long>(k) * k);
  }
}

TEST_CASE("well couplings match the closed-form dipole integrals") {
  const models::QuantumModel m = models::well_model(1.0);
  for (int l = 1; l <= 8; ++l)
    for (int k = 1; k <= 8; ++k) {
      const Complex got = m.coupling(1, l, k);
      const Complex want = Complex(0, 1) * well_dipole(l, k);  // B = i x
      CHECK(std::abs(got - want) < 1e-10);
    }
}

TEST_CASE("well parity rule: b_{lk} = 0 when l + k is even") {
  const models::QuantumModel m = models::well_model(1.0);
  for (int l = 1; l <= 10; ++l)
    for (int k = 1; k <= 10; ++k)
      if ((l + k) % 2 == 0) {
        CHECK(m.coupling(1, l, k) == Complex(0, 0));
        CHECK_FALSE(m.support(1, l, k));
      }
}

TEST_CASE("well bound kinds carry delta") {
  const models::QuantumModel sym = models::well_model(0.25, models::BoundKind::symmetric);
  CHECK(sym.bounds.size() == 1);
  CHECK(sym.bounds[0].kind == models::BoundKind::symmetric);
  CHECK(sym.bounds[0].delta == 0.25);
  CHECK(sym.all_bounds_symmetric());
  const models::QuantumModel half = models::well_model(0.25, models::BoundKind::half);
  CHECK(half.bounds[0].kind == models::BoundKind::half);
  CHECK_FALSE(half.all_bounds_symmetric());
}

TEST_CASE("rotor state indexing round-trips across windows") {
  for (int window : {0, 1, 2}) {
    int expected_l = window;
    int count_in_level = 0;
    for (int index = 1; index <= 60; ++index) {
      const models::RotorIndex s = models::rotor_state(index, window);
      CHECK(std::abs(s.m) <= s.l);
      CHECK(s.l >= window);
      CHECK(models::rotor_position(s, window) == index);
      if (s.l != expected_l) {
        CHECK(s.l == expected_l + 1);
        CHECK(count_in_level == 2 * expected_l + 1);
        expected_l = s.l;
        count_in_level = 0;
      }
      ++count_in_level;
    }
  }
}

TEST_CASE("rotor eigenvalues are -l(l+1) with shell multiplicity 2l+1") {
  const models::QuantumModel m = models::rotor_model(1.0);
  for (int index = 1; index <= 36; ++index) {
    const models::RotorIndex s = models::rotor_state(index, 0);
    CHECK(m.eigenvalue(index) ==
          doctest::Approx(-static_cast<double>(s.l) * (s.l + 1)).epsilon(1e-14));
  }
  CHECK(m.exact_spectrum());
  CHECK(m.p == 3);
}

TEST_CASE("rotor ladder coefficients match spherical-harmonic quadrature") {
  // |<Y_l^m, f Y_{l+1}^mp>| for the three axis weights against q/p formulas
  for (int l = 0; l <= 3; ++l)
    for (int m = -l; m <= l; ++m) {
      // z axis: couples m' = m with amplitude |p_{l,m}|
      const Complex z = rotor_overlap(l, m, l + 1, m, AxisWeight::z);
      CHECK(std::abs(std::abs(z) - std::abs(models::rotor_p(l, m))) < 1e-12);
      // transverse: m' = m - 1 carries q_{l,m}, m' = m + 1 carries q_{l,-m}
      const Complex xm = rotor_overlap(l, m, l + 1, m - 1, AxisWeight::x);
      const Complex xp = rotor_overlap(l, m, l + 1, m + 1, AxisWeight::x);
      CHECK(std::abs(std::abs(xm) - models::rotor_q(l, m)) < 1e-12);
      CHECK(std::abs(std::abs(xp) - models::rotor_q(l, -m)) < 1e-12);
      const Complex ym = rotor_overlap(l, m, l + 1, m - 1, AxisWeight::y);
      const Complex yp = rotor_overlap(l, m, l + 1, m + 1, AxisWeight::y);
      CHECK(std::abs(std::abs(ym) - models::rotor_q(l, m)) < 1e-12);
      CHECK(std::abs(std::abs(yp) - models::rotor_q(l, -m)) < 1e-12);
    }
}

TEST_CASE("rotor couplings follow the ladder pattern against quadrature moduli") {
  const models::QuantumModel m = models::rotor_model(1.0);
  for (int row = 1; row <= 16; ++row)
    for (int col = 1; col <= 16; ++col) {
      const models::RotorIndex a = models::rotor_state(row, 0);
      const models::RotorIndex b = models::rotor_state(col, 0);
      for (int j = 1; j <= 3; ++j) {
        const Complex got = m.coupling(j, row, col);
        if (std::abs(a.l - b.l) != 1) {
          CHECK(got == Complex(0, 0));  // only adjacent shells couple
          continue;
        }
        const AxisWeight axis =
            j == 1 ? AxisWeight::y : (j == 2 ? AxisWeight::x : AxisWeight::z);
        const Complex want = rotor_overlap(a.l, a.m, b.l, b.m, axis);
        CHECK(std::abs(std::abs(got) - std::abs(want)) < 1e-12);
      }
    }
}

TEST_CASE("rotor windowed model agrees with the full ordering") {
  const models::QuantumModel full = models::rotor_model(1.0, 0);
  const models::QuantumModel cut = models::rotor_model(1.0, 2);
  for (int row = 1; row <= 16; ++row)
    for (int col = 1; col <= 16; ++col) {
      const models::RotorIndex a = models::rotor_state(row, 2);
      const models::RotorIndex b = models::rotor_state(col, 2);
      CHECK(cut.eigenvalue(row) == doctest::Approx(full.eigenvalue(models::rotor_position(a, 0))));
      for (int j = 1; j <= 3; ++j)
        CHECK(cut.coupling(j, row, col) ==
              full.coupling(j, models::rotor_position(a, 0), models::rotor_position(b, 0)));
    }
}

TEST_CASE("model JSON round-trip preserves spectrum, couplings, and bounds") {
  const models::QuantumModel m = models::well_model(0.5, models::BoundKind::half);
  const models::QuantumModel r = models::model_from_json_text(models::model_to_json_text(m, 6));
  CHECK(r.p == 1);
  CHECK(r.bounds[0].kind == models::BoundKind::half);
  CHECK(r.bounds[0].delta == 0.5);
  for (int l = 1; l <= 6; ++l) {
    CHECK(r.eigenvalue(l) == doctest::Approx(m.eigenvalue(l)).epsilon(1e-14));
    for (int k = 1; k <= 6; ++k) CHECK(std::abs(r.coupling(1, l, k) - m.coupling(1, l, k)) < 1e-15);
  }
}

TEST_CASE("model JSON rejects malformed input") {
  CHECK_THROWS_AS(models::model_from_json_text("{}"), std::invalid_argument);
  CHECK_THROWS_AS(models::model_from_json_text("not json"), std::invalid_argument);
  // both triangles listed and inconsistent: not skew-Hermitian
  const std::string bad = R"({
    "name": "bad", "p": 1, "n_max": 2, "eigenvalues": [0.0, 1.0],
    "bounds": [{"kind": "symmetric", "delta": 1.0}],
    "couplings": [[[1, 2, 0.5, 0.0], [2, 1, 0.5, 0.0]]]
  })";
  CHECK_THROWS_WITH_AS(models::model_from_json_text(bad),
                       doctest::Contains("skew-Hermitian"), std::invalid_argument);
}

TEST_CASE("out-of-range queries throw") {
  const models::QuantumModel m = models::well_model(1.0);
  CHECK_THROWS_AS(m.coupling(2, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(m.coupling(1, 0, 2), std::invalid_argument);
  CHECK_THROWS_AS(models::rotor_state(0, 0), std::invalid_argument);
}

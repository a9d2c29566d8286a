// test_galerkin.cpp — truncations, gap sets, activations, rotations, compatibility
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "liegal/galerkin.hpp"
#include "support/oracles.hpp"

using namespace liegal;
using namespace liegal::testing;

TEST_CASE("truncation carries spectrum, couplings, and the exact integer form") {
  const models::QuantumModel m = models::well_model(1.0);
  const galerkin::TruncatedSystem sys = galerkin::truncate(m, 5);
  CHECK(sys.n == 5);
  CHECK(sys.b.size() == 1);
  CHECK(sys.exact());
  for (int k = 1; k <= 5; ++k) {
    CHECK(sys.a_diag[k - 1] == m.eigenvalue(k));
    CHECK(sys.a_num[k - 1] == -static_cast<long long>(k) * k);
  }
  // drift is i diag(lambda)
  const Matrix a = sys.drift();
  CHECK(std::abs(a(2, 2) - Complex(0, sys.a_diag[2])) < 1e-15);
  // coupling blocks nest: the n = 5 matrix is the leading block of n = 9
  const galerkin::TruncatedSystem big = galerkin::truncate(m, 9);
  CHECK((galerkin::crop(big.b[0], 5) - sys.b[0]).norm() < 1e-15);
}

TEST_CASE("well gap set at n = 3 is the expected triple") {
  const galerkin::TruncatedSystem sys = galerkin::truncate(models::well_model(1.0), 3);
  const galerkin::GapSet gaps = galerkin::spectral_gaps(sys);
  REQUIRE(gaps.values.size() == 4);
  CHECK(gaps.values[0] == 0.0);
  CHECK(gaps.values[1] == doctest::Approx(1.5 * kPi * kPi).epsilon(1e-14));   // 1 <-> 2
  CHECK(gaps.values[2] == doctest::Approx(2.5 * kPi * kPi).epsilon(1e-14));   // 2 <-> 3
  CHECK(gaps.values[3] == doctest::Approx(4.0 * kPi * kPi).epsilon(1e-14));   // 1 <-> 3
  CHECK(gaps.exact);
  CHECK(gaps.pair_gap(0, 1) == 1);
  CHECK(gaps.pair_gap(1, 2) == 2);
  CHECK(gaps.pair_gap(0, 2) == 3);
  CHECK(gaps.pair_gap(1, 1) == 0);
  CHECK(gaps.find(1.5 * kPi * kPi) == 1);
  CHECK(gaps.find(0.123) == -1);
}

TEST_CASE("rotor gaps are exact integers with shell degeneracy") {
  const galerkin::TruncatedSystem sys = galerkin::truncate(models::rotor_model(1.0), 9);
  const galerkin::GapSet gaps = galerkin::spectral_gaps(sys);
  // levels 0, -2, -6: gaps 0, 2, 4, 6
  REQUIRE(gaps.values.size() == 4);
  CHECK(gaps.values[1] == 2.0);
  CHECK(gaps.values[2] == 4.0);
  CHECK(gaps.values[3] == 6.0);
  CHECK(gaps.exact);
  // intra-shell pairs sit on the zero gap
  CHECK(gaps.pair_gap(1, 3) == 0);
  CHECK(gaps.pair_gap(4, 8) == 0);
}

TEST_CASE("activation partition of unity and disjoint supports") {
  for (int n = 2; n <= 12; ++n) {
    const galerkin::TruncatedSystem sys = galerkin::truncate(models::well_model(1.0), n);
    const galerkin::GapSet gaps = galerkin::spectral_gaps(sys);
    const Matrix b = sys.b[0];
    Matrix sum = Matrix::Zero(n, n);
    for (size_t g = 0; g < gaps.values.size(); ++g) {
      const Matrix e = galerkin::excite(b, static_cast<int>(g), gaps);
      sum += e;
      // supports are disjoint: e restricted to other gaps vanishes
      for (size_t g2 = 0; g2 < gaps.values.size(); ++g2)
        if (g2 != g)
          CHECK(galerkin::excite(e, static_cast<int>(g2), gaps).norm() == 0.0);
    }
    CHECK((sum - b).norm() < 1e-10);
  }
}

TEST_CASE("bracket identity [A, E_sigma(M)] = sigma J_i(E_sigma(M))") {
  for (int n = 2; n <= 12; ++n) {
    for (const auto& model : {models::well_model(1.0), models::rotor_model(1.0)}) {
      const galerkin::TruncatedSystem sys = galerkin::truncate(model, n);
      const galerkin::GapSet gaps = galerkin::spectral_gaps(sys);
      const Matrix a = sys.drift();
      for (const Matrix& b : sys.b)
        for (size_t g = 0; g < gaps.values.size(); ++g) {
          const Matrix e = galerkin::excite(b, static_cast<int>(g), gaps);
          const Matrix lhs = a * e - e * a;
          const Matrix rhs = gaps.values[g] * galerkin::j_rotate(e, Complex(0, 1), sys);
          CHECK((lhs - rhs).norm() < 1e-10);
        }
    }
  }
}

TEST_CASE("j_rotate orientation, involution, and zero diagonal") {
  const galerkin::TruncatedSystem sys = galerkin::truncate(models::well_model(1.0), 4);
  const Matrix m = random_skew(4, 7);
  const Matrix r = galerkin::j_rotate(m, Complex(0, 1), sys);
  // well eigenvalues decrease with the level: lambda_row > lambda_col iff row < col
  for (int row = 0; row < 4; ++row)
    for (int col = 0; col < 4; ++col) {
      if (row == col) {
        CHECK(r(row, col) == Complex(0, 0));
      } else if (row < col) {
        CHECK(std::abs(r(row, col) - Complex(0, 1) * m(row, col)) < 1e-15);
      } else {
        CHECK(std::abs(r(row, col) - Complex(0, -1) * m(row, col)) < 1e-15);
      }
    }
  // J_i twice flips the sign of the off-diagonal part
  const Matrix rr = galerkin::j_rotate(r, Complex(0, 1), sys);
  Matrix off = m;
  off.diagonal().setZero();
  CHECK((rr + off).norm() < 1e-14);
  // J_1 keeps off-diagonal entries and kills the diagonal
  const Matrix r1 = galerkin::j_rotate(m, Complex(1, 0), sys);
  CHECK((r1 - off).norm() < 1e-14);
}

TEST_CASE("rotor intra-level entries vanish for every control") {
  for (int n : {4, 9, 12}) {
    const galerkin::TruncatedSystem sys = galerkin::truncate(models::rotor_model(1.0), n);
    for (const Matrix& b : sys.b)
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          const models::RotorIndex a = models::rotor_state(r + 1, 0);
          const models::RotorIndex d = models::rotor_state(c + 1, 0);
          if (a.l == d.l) CHECK(b(r, c) == Complex(0, 0));
        }
  }
}

TEST_CASE("well compatibility: odd-numerator gaps with a single pair are guaranteed") {
  const models::QuantumModel m = models::well_model(1.0);
  const galerkin::TruncatedSystem sys = galerkin::truncate(m, 3);
  const galerkin::GapSet gaps = galerkin::spectral_gaps(sys);
  // sigma = 3 pi^2 / 2 pairs only (1,2); integer gap 3 has no other odd-parity split
  const galerkin::CompatibilityWitness w1 =
      galerkin::xi_membership(m, 3, gaps.find(1.5 * kPi * kPi), gaps, 1);
  CHECK(w1.member);
  CHECK(w1.guaranteed);
  // sigma = 5 pi^2 / 2: (2,3) only
  const galerkin::CompatibilityWitness w2 =
      galerkin::xi_membership(m, 3, gaps.find(2.5 * kPi * kPi), gaps, 1);
  CHECK(w2.member);
  CHECK(w2.guaranteed);
}

TEST_CASE("rotor mid-shell truncation breaks compatibility, full shell restores it") {
  const models::QuantumModel m = models::rotor_model(1.0);
  // n = 8 cuts the l = 2 shell: the l1 <-> l2 gap (sigma = 4) couples into column 9
  {
    const galerkin::TruncatedSystem sys = galerkin::truncate(m, 8);
    const galerkin::GapSet gaps = galerkin::spectral_gaps(sys);
    const int gap = gaps.find(4.0);
    REQUIRE(gap > 0);
    bool any_violation = false;
    for (int j = 1; j <= 3; ++j) {
      const galerkin::CompatibilityWitness w = galerkin::xi_membership(m, 8, gap, gaps, j);
      if (!w.member) {
        any_violation = true;
        CHECK(!w.caveat.empty());
      }
    }
    CHECK(any_violation);
  }
  // n = 9 keeps complete shells: the adjacent-shell gaps become compatible
  {
    const galerkin::TruncatedSystem sys = galerkin::truncate(m, 9);
    const galerkin::GapSet gaps = galerkin::spectral_gaps(sys);
    for (double sigma : {2.0, 4.0})
      for (int j = 1; j <= 3; ++j) {
        const galerkin::CompatibilityWitness w =
            galerkin::xi_membership(m, 9, gaps.find(sigma), gaps, j);
        CHECK(w.member);
        CHECK(w.guaranteed);
      }
    // sigma = 6 (shells 0 <-> 2) collides with the adjacent pair 2 <-> 3 at
    // larger truncations, whose entries straddle the n = 9 block
    for (int j = 1; j <= 3; ++j)
      CHECK_FALSE(galerkin::xi_membership(m, 9, gaps.find(6.0), gaps, j).member);
  }
}

TEST_CASE("crop keeps the leading block") {
  const Matrix m = random_skew(6, 3);
  const Matrix c = galerkin::crop(m, 4);
  CHECK(c.rows() == 4);
  CHECK(c.cols() == 4);
  CHECK((c - m.topLeftCorner(4, 4)).norm() == 0.0);
}

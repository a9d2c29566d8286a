// oracles.hpp — independent reference values and routines for the test suite
#pragma once

#include <vector>

#include "liegal/common.hpp"

namespace liegal::testing {

// Closed-form dipole matrix element <phi_l, x phi_k> of the infinite well on
// (-1/2, 1/2): zero when l + k is even, otherwise
//   s_l s_k * (-8 l k) / (pi^2 (l^2 - k^2)^2)
// with the sign s_k of the eigenfunction convention (+1, -1, -1, +1 for
// k = 1, 2, 3, 0 mod 4). Derived by direct integration of
// 2 cos/sin(l pi x) * x * cos/sin(k pi x); independent of the library's
// quadrature.
double well_dipole(int l, int k);

// Matrix exponential by scaling-and-squaring with a Taylor series, independent
// of the library's eigendecomposition route. Intended for modest dimensions.
Matrix expm_taylor(const Matrix& m);

// Operator (spectral) distance ||a - b||_2 via singular values.
double op_dist(const Matrix& a, const Matrix& b);

// <Y_{l'}^{m'}, f * Y_l^m> by tensor quadrature (Gauss-Legendre in cos(theta),
// trapezoid in phi) for f in {cos(theta), sin(theta)cos(phi), sin(theta)sin(phi)}.
// Spherical harmonics include the Condon-Shortley phase.
enum class AxisWeight { z, x, y };
Complex rotor_overlap(int lp, int mp, int l, int m, AxisWeight f);

// Deterministically seeded random skew-Hermitian matrix with unit Frobenius norm.
Matrix random_skew(int n, unsigned seed);

// Deterministically seeded random unit vector.
Vector random_state(int n, unsigned seed);

}  // namespace liegal::testing

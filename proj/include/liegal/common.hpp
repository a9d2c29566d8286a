// common.hpp — shared scalar/matrix aliases, unitary exponentials, distances
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace liegal {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// ---------- skew-Hermitian checks ----------

// Frobenius norm of M + M^*; zero for skew-Hermitian matrices.
double skew_defect(const Matrix& m);

// Throws std::invalid_argument if M is not skew-Hermitian within tol (relative).
void require_skew(const Matrix& m, double tol = 1e-10, const std::string& who = "matrix");

// ---------- unitary exponential ----------

// exp(t*M) for skew-Hermitian M, computed through the eigendecomposition of the
// Hermitian matrix -i*M; the result is unitary to machine precision.
Matrix expm_skew(const Matrix& m, double t = 1.0);

// Cached eigendecomposition of a fixed skew-Hermitian generator, for repeated
// exponentials exp(t*M) and for trace line searches.
struct SkewEig {
  Matrix vectors;     // unitary V
  RealVector phases;  // theta with M = V * diag(i*theta) * V^*
  Matrix exp(double t) const;
  // exp(t*M) applied to a vector.
  Vector apply_exp(double t, const Vector& v) const;
};
SkewEig skew_eig(const Matrix& m);

// ---------- distances ----------

// ||U^*U - I||_F, unitarity defect.
double unitarity_defect(const Matrix& u);

// Phase-invariant distance min_theta ||U - e^{i theta} V||_F / sqrt(n), in [0, 2].
double phase_dist(const Matrix& u, const Matrix& v);

// Spectral (operator 2-) norm.
double op_norm(const Matrix& m);

// Phase-invariant distance between unit vectors: sqrt(2 - 2|<u,v>|).
double state_dist(const Vector& u, const Vector& v);

}  // namespace liegal

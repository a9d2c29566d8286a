// expm.cpp — unitary exponentials and distances
#include "liegal/common.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace liegal {

double skew_defect(const Matrix& m) { return (m + m.adjoint()).norm(); }

void require_skew(const Matrix& m, double tol, const std::string& who) {
  const double scale = std::max(1.0, m.norm());
  if (skew_defect(m) > tol * scale) {
    throw std::invalid_argument(who + " is not skew-Hermitian (defect " +
                                std::to_string(skew_defect(m) / scale) + ")");
  }
}

SkewEig skew_eig(const Matrix& m) {
  // -i M is Hermitian for skew-Hermitian M; M = V diag(i theta) V^*.
  Eigen::SelfAdjointEigenSolver<Matrix> es(Complex(0, -1) * m);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  SkewEig out;
  out.vectors = es.eigenvectors();
  out.phases = es.eigenvalues();
  return out;
}

Matrix SkewEig::exp(double t) const {
  const Eigen::Index n = phases.size();
  Vector d(n);
  for (Eigen::Index k = 0; k < n; ++k) d(k) = std::polar(1.0, t * phases(k));
  return vectors * d.asDiagonal() * vectors.adjoint();
}

Vector SkewEig::apply_exp(double t, const Vector& v) const {
  Vector w = vectors.adjoint() * v;
  for (Eigen::Index k = 0; k < phases.size(); ++k) w(k) *= std::polar(1.0, t * phases(k));
  return vectors * w;
}

Matrix expm_skew(const Matrix& m, double t) { return skew_eig(m).exp(t); }

double unitarity_defect(const Matrix& u) {
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm();
}

double phase_dist(const Matrix& u, const Matrix& v) {
  const double n = static_cast<double>(u.rows());
  const double overlap = std::abs((u.adjoint() * v).trace()) / n;
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * overlap));
}

double op_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

double state_dist(const Vector& u, const Vector& v) {
  const double overlap = std::abs(u.dot(v));  // Eigen's dot conjugates the lhs
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * overlap));
}

}  // namespace liegal

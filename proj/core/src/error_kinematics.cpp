#include "attctl/error_kinematics.hpp"

#include <cmath>

#include "attctl/errors.hpp"

namespace attctl {

DesiredTrajectory DesiredTrajectory::setpoint(const Quaternion& q_d) {
  return {Kind::setpoint, q_d, Vec3::UnitZ(), 0.0};
}

DesiredTrajectory DesiredTrajectory::spin(const Quaternion& q_d0, const Vec3& body_axis,
                                          double rate) {
  const double n = body_axis.norm();
  if (!(n > 0.0) || !std::isfinite(n) || !std::isfinite(rate)) {
    throw InvalidArgument("DesiredTrajectory::spin: axis must be nonzero and rate finite");
  }
  return {Kind::spin, q_d0, body_axis / n, rate};
}

DesiredState DesiredTrajectory::at(double t) const {
  if (kind_ == Kind::setpoint) {
    return {q0_, to_rotation_matrix(q0_), Vec3::Zero(), Vec3::Zero()};
  }
  const Vec3 rotation = axis_ * (rate_ * t);
  const Quaternion q = q0_ * quaternion_exp(rotation);
  return {q, to_rotation_matrix(q0_) * rotation_exp(rotation), axis_ * rate_,
          Vec3::Zero()};
}

WeightMatrix::WeightMatrix(double k1, double k2, double k3) : k_(k1, k2, k3) {
  if (!k_.allFinite() || !(k1 > 0.0) || !(k1 < k2) || !(k2 < k3)) {
    throw InvalidArgument("WeightMatrix: need 0 < k1 < k2 < k3");
  }
}

Quaternion quaternion_error(const Quaternion& q_d, const Quaternion& q) {
  return q_d.conjugate() * q;
}

RotationMatrix rotation_error(const RotationMatrix& R, const RotationMatrix& R_d) {
  return R_d.transpose() * R;
}

double psi(const RotationMatrix& R_e, const WeightMatrix& K) {
  const Vec3& k = K.diagonal();
  return 0.5 * (k.x() * (1.0 - R_e(0, 0)) + k.y() * (1.0 - R_e(1, 1)) +
                k.z() * (1.0 - R_e(2, 2)));
}

double psi(const RotationMatrix& R, const RotationMatrix& R_d, const WeightMatrix& K) {
  return psi(rotation_error(R, R_d), K);
}

Vec3 attitude_error_vector(const RotationMatrix& R_e, const WeightMatrix& K) {
  const Mat3 kr = K.matrix() * R_e.matrix();
  return 0.5 * vee(kr - kr.transpose());
}

Vec3 attitude_error_vector(const RotationMatrix& R, const RotationMatrix& R_d,
                           const WeightMatrix& K) {
  return attitude_error_vector(rotation_error(R, R_d), K);
}

Vec3 omega_error(const Vec3& omega, const RotationMatrix& R, const RotationMatrix& R_d,
                 const Vec3& omega_d) {
  return omega - R.matrix().transpose() * (R_d.matrix() * omega_d);
}

DirectionalDerivative finite_difference_check_eR(const RotationMatrix& R,
                                                 const RotationMatrix& R_d,
                                                 const WeightMatrix& K, const Vec3& eta,
                                                 double h) {
  if (std::abs(eta.norm() - 1.0) > 1e-9) {
    throw InvalidArgument("finite_difference_check_eR: eta must be a unit vector");
  }
  if (!(h >= 1e-7 && h <= 1e-4)) {
    throw InvalidArgument("finite_difference_check_eR: h must lie in [1e-7, 1e-4]");
  }
  const RotationMatrix perturbed = R * rotation_exp(h * eta);
  const double fd = (psi(perturbed, R_d, K) - psi(R, R_d, K)) / h;
  return {fd, attitude_error_vector(R, R_d, K).dot(eta)};
}

}  // namespace attctl

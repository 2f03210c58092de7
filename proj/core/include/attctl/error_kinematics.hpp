#pragma once

#include "attctl/algebra.hpp"

namespace attctl {

/// Desired attitude, rate and angular acceleration at one instant.
struct DesiredState {
  Quaternion q;
  RotationMatrix R;
  Vec3 omega = Vec3::Zero();
  Vec3 omega_dot = Vec3::Zero();
};

/// Reference attitude as a function of time. Two built-in variants: a constant
/// setpoint, and a constant-rate spin about a fixed axis of the desired body
/// frame starting from a given attitude. The angular acceleration is exact
/// (zero for both).
class DesiredTrajectory {
 public:
  enum class Kind { setpoint, spin };

  static DesiredTrajectory setpoint(const Quaternion& q_d);
  static DesiredTrajectory spin(const Quaternion& q_d0, const Vec3& body_axis,
                                double rate);

  DesiredState at(double t) const;

  Kind kind() const { return kind_; }
  const Quaternion& initial() const { return q0_; }
  const Vec3& axis() const { return axis_; }
  double rate() const { return rate_; }

 private:
  DesiredTrajectory(Kind kind, const Quaternion& q0, const Vec3& axis, double rate)
      : kind_(kind), q0_(q0), axis_(axis), rate_(rate) {}

  Kind kind_;
  Quaternion q0_;
  Vec3 axis_;
  double rate_;
};

/// K = diag(k1, k2, k3) with 0 < k1 < k2 < k3.
class WeightMatrix {
 public:
  WeightMatrix(double k1, double k2, double k3);

  double k1() const { return k_.x(); }
  double k2() const { return k_.y(); }
  double k3() const { return k_.z(); }
  const Vec3& diagonal() const { return k_; }
  Mat3 matrix() const { return k_.asDiagonal(); }

 private:
  Vec3 k_;
};

/// q_e = q_d^* (x) q.
Quaternion quaternion_error(const Quaternion& q_d, const Quaternion& q);

/// R_e = R_d^T R.
RotationMatrix rotation_error(const RotationMatrix& R, const RotationMatrix& R_d);

/// Psi = 1/2 tr(K (I - R_d^T R)).
double psi(const RotationMatrix& R, const RotationMatrix& R_d, const WeightMatrix& K);
double psi(const RotationMatrix& R_e, const WeightMatrix& K);

/// e_R = 1/2 (K R_d^T R - R^T R_d K)^vee.
Vec3 attitude_error_vector(const RotationMatrix& R, const RotationMatrix& R_d,
                           const WeightMatrix& K);
Vec3 attitude_error_vector(const RotationMatrix& R_e, const WeightMatrix& K);

/// e_w = w - R^T R_d w_d.
Vec3 omega_error(const Vec3& omega, const RotationMatrix& R, const RotationMatrix& R_d,
                 const Vec3& omega_d);

struct DirectionalDerivative {
  double finite_difference;
  double analytic;
};

/// Forward difference of Psi along R exp(h hat(eta)) next to e_R^T eta.
/// Requires |eta| == 1 and h in [1e-7, 1e-4].
DirectionalDerivative finite_difference_check_eR(const RotationMatrix& R,
                                                 const RotationMatrix& R_d,
                                                 const WeightMatrix& K, const Vec3& eta,
                                                 double h);

}  // namespace attctl

#pragma once

#include <Eigen/Dense>

namespace attctl {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;

/// Skew-symmetric matrix such that hat(x) * y == x.cross(y).
Mat3 hat(const Vec3& x);

/// Inverse of hat(). Throws NotSkew when max |(S + S^T)/2| exceeds `tol`;
/// the symmetric part is discarded otherwise.
Vec3 vee(const Mat3& s, double tol = 1e-6);

/// Unit quaternion stored as [scalar; vector].
///
/// Every constructor leaves |q| == 1 to within 1e-12. Inputs further than
/// 1e-3 from the unit sphere are rejected with TooFarFromManifold; use
/// Quaternion::normalized() to project an arbitrary nonzero 4-vector.
class Quaternion {
 public:
  Quaternion() = default;
  Quaternion(double q0, const Vec3& qv);
  explicit Quaternion(const Vec4& coeffs);

  static Quaternion identity() { return {}; }
  /// Divides by the Euclidean norm; throws InvalidArgument on a zero vector.
  static Quaternion normalized(double q0, const Vec3& qv);

  double scalar() const { return q0_; }
  const Vec3& vec() const { return qv_; }
  Vec4 coeffs() const { return {q0_, qv_.x(), qv_.y(), qv_.z()}; }

  Quaternion conjugate() const;
  Quaternion operator-() const;

 private:
  struct Trusted {};
  Quaternion(Trusted, double q0, const Vec3& qv) : q0_(q0), qv_(qv) {}
  friend Quaternion operator*(const Quaternion& p, const Quaternion& q);

  double q0_ = 1.0;
  Vec3 qv_ = Vec3::Zero();
};

/// Hamilton product p (x) q. The result is renormalized when its norm
/// drifts from one by more than 1e-12.
Quaternion operator*(const Quaternion& p, const Quaternion& q);

/// Element of SO(3). Construction checks R^T R == I and det R == 1 to 1e-9.
class RotationMatrix {
 public:
  RotationMatrix() = default;
  explicit RotationMatrix(const Mat3& m);

  static RotationMatrix identity() { return {}; }

  const Mat3& matrix() const { return m_; }
  RotationMatrix transpose() const;
  double operator()(int r, int c) const { return m_(r, c); }

 private:
  Mat3 m_ = Mat3::Identity();
};

RotationMatrix operator*(const RotationMatrix& a, const RotationMatrix& b);
Vec3 operator*(const RotationMatrix& r, const Vec3& v);

/// Rotation by `angle` about a unit axis. The constructor normalizes the
/// axis and canonicalizes the angle into [0, pi], flipping the axis when
/// needed, so (-e3, pi/2) and (e3, -pi/2) compare equal.
class AxisAngle {
 public:
  AxisAngle(const Vec3& axis, double angle);

  const Vec3& axis() const { return axis_; }
  double angle() const { return angle_; }

 private:
  Vec3 axis_;
  double angle_;
};

Quaternion to_quaternion(const AxisAngle& aa);
RotationMatrix to_rotation_matrix(const AxisAngle& aa);
RotationMatrix to_rotation_matrix(const Quaternion& q);

/// Exponential map of a rotation vector (axis * angle); zero maps to identity.
Quaternion quaternion_exp(const Vec3& rotation_vector);
RotationMatrix rotation_exp(const Vec3& rotation_vector);

/// Projects a 4-vector back onto S^3. Inputs whose norm differs from one by
/// more than 1e-3 raise TooFarFromManifold.
Quaternion renormalize(const Vec4& q);

/// Nearest rotation in the Frobenius sense (polar factor via SVD).
/// Inputs with max |R^T R - I| above 1e-3 or nonpositive determinant raise
/// TooFarFromManifold.
RotationMatrix reorthonormalize(const Mat3& m);

/// max |R^T R - I| over entries.
double orthogonality_error(const Mat3& m);

}  // namespace attctl

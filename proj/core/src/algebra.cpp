#include "attctl/algebra.hpp"

#include <cmath>
#include <numbers>

#include "attctl/errors.hpp"

namespace attctl {

namespace {

constexpr double kManifoldTolerance = 1e-3;
constexpr double kRotationCheckTolerance = 1e-9;
constexpr double kProductDriftTolerance = 1e-12;

}  // namespace

Mat3 hat(const Vec3& x) {
  Mat3 s;
  s << 0.0, -x.z(), x.y(),
       x.z(), 0.0, -x.x(),
       -x.y(), x.x(), 0.0;
  return s;
}

Vec3 vee(const Mat3& s, double tol) {
  const Mat3 sym = 0.5 * (s + s.transpose());
  if (sym.cwiseAbs().maxCoeff() > tol) {
    throw NotSkew("vee: matrix is not skew-symmetric");
  }
  const Mat3 skew = 0.5 * (s - s.transpose());
  return {skew(2, 1), skew(0, 2), skew(1, 0)};
}

// ---------------------------------------------------------------- Quaternion

Quaternion::Quaternion(double q0, const Vec3& qv) {
  *this = renormalize(Vec4(q0, qv.x(), qv.y(), qv.z()));
}

Quaternion::Quaternion(const Vec4& coeffs) { *this = renormalize(coeffs); }

Quaternion Quaternion::normalized(double q0, const Vec3& qv) {
  const double n = std::sqrt(q0 * q0 + qv.squaredNorm());
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw InvalidArgument("Quaternion::normalized: zero or non-finite input");
  }
  return {Trusted{}, q0 / n, qv / n};
}

Quaternion Quaternion::conjugate() const { return {Trusted{}, q0_, -qv_}; }

Quaternion Quaternion::operator-() const { return {Trusted{}, -q0_, -qv_}; }

Quaternion operator*(const Quaternion& p, const Quaternion& q) {
  const double p0 = p.q0_;
  const double q0 = q.q0_;
  double r0 = p0 * q0 - p.qv_.dot(q.qv_);
  Vec3 rv = p0 * q.qv_ + q0 * p.qv_ + p.qv_.cross(q.qv_);
  const double n2 = r0 * r0 + rv.squaredNorm();
  if (std::abs(n2 - 1.0) > kProductDriftTolerance) {
    const double n = std::sqrt(n2);
    r0 /= n;
    rv /= n;
  }
  return {Quaternion::Trusted{}, r0, rv};
}

Quaternion renormalize(const Vec4& q) {
  const double n = q.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > kManifoldTolerance) {
    throw TooFarFromManifold("renormalize: quaternion norm " + std::to_string(n) +
                             " is too far from 1");
  }
  return Quaternion::normalized(q(0), q.tail<3>());
}

// ------------------------------------------------------------ RotationMatrix

double orthogonality_error(const Mat3& m) {
  return (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
}

RotationMatrix::RotationMatrix(const Mat3& m) : m_(m) {
  if (!m.allFinite() || orthogonality_error(m) > kRotationCheckTolerance ||
      std::abs(m.determinant() - 1.0) > kRotationCheckTolerance) {
    throw InvalidArgument("RotationMatrix: input is not in SO(3)");
  }
}

RotationMatrix RotationMatrix::transpose() const {
  return RotationMatrix(m_.transpose());
}

RotationMatrix operator*(const RotationMatrix& a, const RotationMatrix& b) {
  return RotationMatrix(a.matrix() * b.matrix());
}

Vec3 operator*(const RotationMatrix& r, const Vec3& v) { return r.matrix() * v; }

RotationMatrix reorthonormalize(const Mat3& m) {
  if (!m.allFinite() || orthogonality_error(m) > kManifoldTolerance ||
      m.determinant() <= 0.0) {
    throw TooFarFromManifold("reorthonormalize: matrix is too far from SO(3)");
  }
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return RotationMatrix(svd.matrixU() * svd.matrixV().transpose());
}

// ----------------------------------------------------------------- AxisAngle

AxisAngle::AxisAngle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!(n > 0.0) || !std::isfinite(n) || !std::isfinite(angle)) {
    throw InvalidArgument("AxisAngle: axis must be nonzero and finite");
  }
  axis_ = axis / n;
  // Wrap into (-pi, pi], then fold the sign into the axis.
  constexpr double pi = std::numbers::pi;
  double a = std::remainder(angle, 2.0 * pi);
  if (a <= -pi) a += 2.0 * pi;
  if (a < 0.0) {
    a = -a;
    axis_ = -axis_;
  }
  angle_ = a;
}

Quaternion to_quaternion(const AxisAngle& aa) {
  const double half = 0.5 * aa.angle();
  return Quaternion::normalized(std::cos(half), std::sin(half) * aa.axis());
}

RotationMatrix to_rotation_matrix(const AxisAngle& aa) {
  const Mat3 k = hat(aa.axis());
  const double s = std::sin(aa.angle());
  const double c = std::cos(aa.angle());
  return RotationMatrix(Mat3::Identity() + s * k + (1.0 - c) * k * k);
}

RotationMatrix to_rotation_matrix(const Quaternion& q) {
  const double q0 = q.scalar();
  const Vec3& v = q.vec();
  const Mat3 r = (q0 * q0 - v.squaredNorm()) * Mat3::Identity() +
                 2.0 * v * v.transpose() + 2.0 * q0 * hat(v);
  return RotationMatrix(r);
}

Quaternion quaternion_exp(const Vec3& rotation_vector) {
  const double angle = rotation_vector.norm();
  if (angle == 0.0) return Quaternion::identity();
  return to_quaternion(AxisAngle(rotation_vector, angle));
}

RotationMatrix rotation_exp(const Vec3& rotation_vector) {
  const double angle = rotation_vector.norm();
  if (angle == 0.0) return RotationMatrix::identity();
  return to_rotation_matrix(AxisAngle(rotation_vector, angle));
}

}  // namespace attctl

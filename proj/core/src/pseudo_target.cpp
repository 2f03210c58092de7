#include "attctl/pseudo_target.hpp"

#include <algorithm>
#include <cmath>

#include "attctl/errors.hpp"

namespace attctl {

namespace {

// Exact +90 deg rotations about the body axes.
RotationMatrix quarter_turn(int axis) {
  Mat3 m;
  switch (axis) {
    case 0:
      m << 1, 0, 0,
           0, 0, -1,
           0, 1, 0;
      break;
    case 1:
      m << 0, 0, 1,
           0, 1, 0,
           -1, 0, 0;
      break;
    default:
      m << 0, -1, 0,
           1, 0, 0,
           0, 0, 1;
      break;
  }
  return RotationMatrix(m);
}

}  // namespace

void PseudoConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw InvalidArgument("PseudoConfig: epsilon must lie in (0, 0.5)");
  }
}

void PseudoConfig::validate(const WeightMatrix& K) const {
  validate();
  const double gap = std::min(K.k2() - K.k1(), K.k3() - K.k2());
  if (!(epsilon < 0.5 * gap)) {
    throw InvalidArgument(
        "PseudoConfig: epsilon must be below half the smallest gap between "
        "k2+k3, k1+k3 and k1+k2");
  }
}

std::string_view to_string(ErrorRegion r) {
  switch (r) {
    case ErrorRegion::nominal: return "nominal";
    case ErrorRegion::near_A: return "near_A";
    case ErrorRegion::near_S1: return "near_S1";
    case ErrorRegion::near_S2: return "near_S2";
    case ErrorRegion::near_S3: return "near_S3";
  }
  return "unknown";
}

ErrorRegion classify_error_region(const Quaternion& q_e, const PseudoConfig& cfg) {
  return std::abs(q_e.scalar()) < cfg.epsilon ? ErrorRegion::near_A : ErrorRegion::nominal;
}

ErrorRegion classify_error_region(const RotationMatrix& R_e, const WeightMatrix& K,
                                  const PseudoConfig& cfg) {
  const double value = psi(R_e, K);
  if (std::abs(value - (K.k2() + K.k3())) < cfg.epsilon) return ErrorRegion::near_S1;
  if (std::abs(value - (K.k1() + K.k3())) < cfg.epsilon) return ErrorRegion::near_S2;
  if (std::abs(value - (K.k1() + K.k2())) < cfg.epsilon) return ErrorRegion::near_S3;
  return ErrorRegion::nominal;
}

Quaternion pseudo_quat_error(const Quaternion& q_e, const PseudoConfig& cfg) {
  if (!cfg.enabled || classify_error_region(q_e, cfg) == ErrorRegion::nominal) {
    return q_e;
  }
  const double scalar =
      cfg.sign_policy == SignPolicy::sign_of_q_e0 && q_e.scalar() < 0.0 ? -1.0 : 1.0;
  return Quaternion::normalized(scalar, q_e.vec());
}

RotationMatrix pseudo_rotation_target(const RotationMatrix& R_e, const WeightMatrix& K,
                                      const PseudoConfig& cfg) {
  if (!cfg.enabled) return R_e;
  switch (classify_error_region(R_e, K, cfg)) {
    case ErrorRegion::near_S1: return quarter_turn(0);
    case ErrorRegion::near_S2: return quarter_turn(1);
    case ErrorRegion::near_S3: return quarter_turn(2);
    default: return R_e;
  }
}

Vec3 pseudo_rotation_error(const RotationMatrix& R_e, const WeightMatrix& K,
                           const PseudoConfig& cfg) {
  return attitude_error_vector(pseudo_rotation_target(R_e, K, cfg), K);
}

}  // namespace attctl

#pragma once

#include <string_view>

#include "attctl/error_kinematics.hpp"

namespace attctl {

/// Scalar part given to the intermediate quaternion [+-1, q_ev].
enum class SignPolicy {
  plus,          ///< always +1
  sign_of_q_e0,  ///< sign of the measured q_e0, zero maps to +1
};

struct PseudoConfig {
  double epsilon = 0.01;
  bool enabled = true;
  SignPolicy sign_policy = SignPolicy::plus;

  /// 0 < epsilon < 0.5.
  void validate() const;
  /// Additionally requires epsilon below half the smallest gap between the
  /// critical values k2+k3, k1+k3, k1+k2, so the three bands are disjoint.
  void validate(const WeightMatrix& K) const;
};

/// Which unstable-equilibrium neighbourhood, if any, an attitude error is in.
enum class ErrorRegion {
  nominal,
  near_A,   ///< |q_e0| < epsilon
  near_S1,  ///< |Psi - (k2 + k3)| < epsilon, close to 180 deg about e1
  near_S2,  ///< |Psi - (k1 + k3)| < epsilon, close to 180 deg about e2
  near_S3,  ///< |Psi - (k1 + k2)| < epsilon, close to 180 deg about e3
};

std::string_view to_string(ErrorRegion r);

ErrorRegion classify_error_region(const Quaternion& q_e, const PseudoConfig& cfg);
ErrorRegion classify_error_region(const RotationMatrix& R_e, const WeightMatrix& K,
                                  const PseudoConfig& cfg);

/// Error quaternion handed to the quaternion law. Inside |q_e0| < epsilon
/// the scalar part is forced to +-1 and the result renormalized, which puts
/// |q_e0| >= 1/sqrt(2) > epsilon, so a single pass is final. Outside the
/// band, or when disabled, q_e is returned unchanged.
Quaternion pseudo_quat_error(const Quaternion& q_e, const PseudoConfig& cfg);

/// Error rotation the SO(3) law should see: +90 deg about e_i when R_e lies
/// in band S_i, otherwise R_e itself.
RotationMatrix pseudo_rotation_target(const RotationMatrix& R_e, const WeightMatrix& K,
                                      const PseudoConfig& cfg);

/// e_R evaluated at pseudo_rotation_target(R_e, K, cfg).
Vec3 pseudo_rotation_error(const RotationMatrix& R_e, const WeightMatrix& K,
                           const PseudoConfig& cfg);

}  // namespace attctl

#pragma once

#include <optional>

#include "attctl/dynamics.hpp"
#include "attctl/error_kinematics.hpp"

namespace attctl {

/// Proportional and rate gains of both laws. Defaults are the values used
/// for the 180 degree maneuver simulations.
struct ControllerGains {
  double k_q = 10.0;
  double k_omega_q = 1.5;
  double k_R = 5.0;
  double k_omega_R = 2.1;

  /// Throws InvalidArgument unless every gain is finite and strictly positive.
  void validate() const;
};

// Both laws share the structure
//
//   M = -k_p * (attitude term) - k_w * e_w + hat(w) J w
//       - J hat(e_w) R^T R_d w_d + J R^T R_d w_d_dot
//
// and differ only in the attitude term: q_e0 * q_ev for the quaternion law,
// e_R for the SO(3) law. The optional override replaces that attitude error
// (the pseudo-target hook); feed-forward always uses the true attitude.

/// Quaternion law. Uses only the quaternion part of `s`.
Vec3 moment_quaternion(const BodyState& s, const DesiredTrajectory& traj, double t,
                       const ControllerGains& g, const Inertia& inertia,
                       const std::optional<Quaternion>& q_e_override = std::nullopt);

/// SO(3) law. Uses only the rotation-matrix part of `s`.
Vec3 moment_rotation(const BodyState& s, const DesiredTrajectory& traj, double t,
                     const ControllerGains& g, const WeightMatrix& K,
                     const Inertia& inertia,
                     const std::optional<Vec3>& e_R_override = std::nullopt);

/// J de_w/dt + k_wq e_w + k_q q_e0 q_ev, with J de_w/dt taken from the error
/// dynamics under the quaternion law (with the same override, if any).
/// Zero up to rounding when no override is active.
Vec3 closed_loop_residual_quat(const BodyState& s, const DesiredTrajectory& traj, double t,
                               const ControllerGains& g, const Inertia& inertia,
                               const std::optional<Quaternion>& q_e_override = std::nullopt);

/// J de_w/dt + k_wR e_w + k_R e_R under the SO(3) law.
Vec3 closed_loop_residual_rot(const BodyState& s, const DesiredTrajectory& traj, double t,
                              const ControllerGains& g, const WeightMatrix& K,
                              const Inertia& inertia,
                              const std::optional<Vec3>& e_R_override = std::nullopt);

/// V_q = k_q (1 - q_e0^2) + 1/2 e_w^T J e_w.
double lyapunov_value_quat(const BodyState& s, const DesiredTrajectory& traj, double t,
                           const ControllerGains& g, const Inertia& inertia);

/// V_R = k_R Psi + 1/2 e_w^T J e_w.
double lyapunov_value_rot(const BodyState& s, const DesiredTrajectory& traj, double t,
                          const ControllerGains& g, const WeightMatrix& K,
                          const Inertia& inertia);

}  // namespace attctl

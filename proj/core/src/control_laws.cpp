#include "attctl/control_laws.hpp"

#include <cmath>

#include "attctl/errors.hpp"

namespace attctl {

namespace {

// Quantities shared by both laws, evaluated in one attitude representation.
struct Tracking {
  Mat3 transport;  // R^T R_d
  Vec3 omega_d;
  Vec3 omega_d_dot;
  Vec3 e_omega;
};

Tracking tracking_terms(const Mat3& R, const Mat3& R_d, const Vec3& omega,
                        const DesiredState& d) {
  Tracking k;
  k.transport = R.transpose() * R_d;
  k.omega_d = d.omega;
  k.omega_d_dot = d.omega_dot;
  k.e_omega = omega - k.transport * d.omega;
  return k;
}

Tracking quaternion_tracking(const BodyState& s, const DesiredState& d) {
  return tracking_terms(to_rotation_matrix(s.q).matrix(), to_rotation_matrix(d.q).matrix(),
                        s.omega, d);
}

Tracking rotation_tracking(const BodyState& s, const DesiredState& d) {
  return tracking_terms(s.R.matrix(), d.R.matrix(), s.omega, d);
}

// hat(w) J w - J hat(e_w) R^T R_d w_d + J R^T R_d w_d_dot
Vec3 feedforward(const Vec3& omega, const Tracking& k, const Inertia& inertia) {
  const Mat3& j = inertia.matrix();
  return omega.cross(j * omega) - j * k.e_omega.cross(k.transport * k.omega_d) +
         j * (k.transport * k.omega_d_dot);
}

// J de_w/dt = -hat(w) J w + M + J hat(e_w) R^T R_d w_d - J R^T R_d w_d_dot
Vec3 error_rate(const Vec3& omega, const Tracking& k, const Vec3& moment,
                const Inertia& inertia) {
  const Mat3& j = inertia.matrix();
  return -omega.cross(j * omega) + moment + j * k.e_omega.cross(k.transport * k.omega_d) -
         j * (k.transport * k.omega_d_dot);
}

Vec3 quaternion_attitude_term(const Quaternion& q_e) { return q_e.scalar() * q_e.vec(); }

}  // namespace

void ControllerGains::validate() const {
  for (double g : {k_q, k_omega_q, k_R, k_omega_R}) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw InvalidArgument("ControllerGains: every gain must be positive and finite");
    }
  }
}

Vec3 moment_quaternion(const BodyState& s, const DesiredTrajectory& traj, double t,
                       const ControllerGains& g, const Inertia& inertia,
                       const std::optional<Quaternion>& q_e_override) {
  const DesiredState d = traj.at(t);
  const Tracking k = quaternion_tracking(s, d);
  const Quaternion q_e = q_e_override ? *q_e_override : quaternion_error(d.q, s.q);
  return -g.k_q * quaternion_attitude_term(q_e) - g.k_omega_q * k.e_omega +
         feedforward(s.omega, k, inertia);
}

Vec3 moment_rotation(const BodyState& s, const DesiredTrajectory& traj, double t,
                     const ControllerGains& g, const WeightMatrix& K,
                     const Inertia& inertia, const std::optional<Vec3>& e_R_override) {
  const DesiredState d = traj.at(t);
  const Tracking k = rotation_tracking(s, d);
  const Vec3 e_R = e_R_override ? *e_R_override : attitude_error_vector(s.R, d.R, K);
  return -g.k_R * e_R - g.k_omega_R * k.e_omega + feedforward(s.omega, k, inertia);
}

Vec3 closed_loop_residual_quat(const BodyState& s, const DesiredTrajectory& traj, double t,
                               const ControllerGains& g, const Inertia& inertia,
                               const std::optional<Quaternion>& q_e_override) {
  const DesiredState d = traj.at(t);
  const Tracking k = quaternion_tracking(s, d);
  const Vec3 m = moment_quaternion(s, traj, t, g, inertia, q_e_override);
  const Quaternion q_e = quaternion_error(d.q, s.q);
  return error_rate(s.omega, k, m, inertia) + g.k_omega_q * k.e_omega +
         g.k_q * quaternion_attitude_term(q_e);
}

Vec3 closed_loop_residual_rot(const BodyState& s, const DesiredTrajectory& traj, double t,
                              const ControllerGains& g, const WeightMatrix& K,
                              const Inertia& inertia,
                              const std::optional<Vec3>& e_R_override) {
  const DesiredState d = traj.at(t);
  const Tracking k = rotation_tracking(s, d);
  const Vec3 m = moment_rotation(s, traj, t, g, K, inertia, e_R_override);
  return error_rate(s.omega, k, m, inertia) + g.k_omega_R * k.e_omega +
         g.k_R * attitude_error_vector(s.R, d.R, K);
}

double lyapunov_value_quat(const BodyState& s, const DesiredTrajectory& traj, double t,
                           const ControllerGains& g, const Inertia& inertia) {
  const DesiredState d = traj.at(t);
  const Tracking k = quaternion_tracking(s, d);
  const double q_e0 = quaternion_error(d.q, s.q).scalar();
  return g.k_q * (1.0 - q_e0 * q_e0) +
         0.5 * k.e_omega.dot(inertia.matrix() * k.e_omega);
}

double lyapunov_value_rot(const BodyState& s, const DesiredTrajectory& traj, double t,
                          const ControllerGains& g, const WeightMatrix& K,
                          const Inertia& inertia) {
  const DesiredState d = traj.at(t);
  const Tracking k = rotation_tracking(s, d);
  return g.k_R * psi(s.R, d.R, K) + 0.5 * k.e_omega.dot(inertia.matrix() * k.e_omega);
}

}  // namespace attctl

#pragma once

#include <cstddef>
#include <functional>

#include "attctl/algebra.hpp"

namespace attctl {

/// Body-frame inertia tensor. Symmetric to 1e-12 and positive definite;
/// the inverse is computed once here.
class Inertia {
 public:
  explicit Inertia(const Mat3& j);
  static Inertia diagonal(double j1, double j2, double j3);

  const Mat3& matrix() const { return j_; }
  const Mat3& inverse() const { return j_inv_; }

 private:
  Mat3 j_;
  Mat3 j_inv_;
};

/// Attitude in both representations plus body angular velocity (rad/s).
/// Both attitudes are propagated independently; see consistency_error().
struct BodyState {
  Quaternion q;
  RotationMatrix R;
  Vec3 omega = Vec3::Zero();

  /// Builds R from q so the two start out consistent.
  static BodyState from_quaternion(const Quaternion& q, const Vec3& omega);
};

/// max |to_rotation_matrix(q) - R| over entries.
double consistency_error(const BodyState& s);

/// Time derivative of every propagated coordinate.
struct StateDerivative {
  Vec4 q_dot;
  Mat3 R_dot;
  Vec3 omega_dot;
};

/// q_dot = 1/2 q (x) [0, w],  R_dot = R hat(w),  J w_dot = -hat(w) J w + M.
StateDerivative state_derivative(const BodyState& s, const Vec3& moment,
                                 const Inertia& inertia);

enum class IntegrationScheme { rk4, euler };

struct IntegratorConfig {
  double dt = 1e-3;
  IntegrationScheme scheme = IntegrationScheme::rk4;
  /// Project q onto S^3 and R onto SO(3) every this many steps. Steps in
  /// between still project when the drift would break the 1e-9 invariants
  /// of Quaternion/RotationMatrix.
  std::size_t renormalize_every = 1;

  void validate() const;
};

/// Moment at an integrator stage: `dt_offset` is the stage time minus the
/// step start time, the state is projected back onto the manifolds.
using MomentFunction = std::function<Vec3(double dt_offset, const BodyState&)>;

/// One fixed step with the moment held constant over the step.
/// Throws NonFiniteState carrying `step_index` on NaN/Inf or divergence.
BodyState step(const BodyState& s, const Vec3& moment, const Inertia& inertia,
               const IntegratorConfig& cfg, std::size_t step_index = 0);

/// One fixed step with the moment re-evaluated at every integrator stage.
BodyState step(const BodyState& s, const MomentFunction& moment,
               const Inertia& inertia, const IntegratorConfig& cfg,
               std::size_t step_index = 0);

/// Accepts Eigen expressions such as Vec3::Zero() for the constant moment.
template <class Derived>
BodyState step(const BodyState& s, const Eigen::MatrixBase<Derived>& moment,
               const Inertia& inertia, const IntegratorConfig& cfg,
               std::size_t step_index = 0) {
  return step(s, Vec3(moment), inertia, cfg, step_index);
}

/// 1/2 w^T J w.
double kinetic_energy(const BodyState& s, const Inertia& inertia);
/// R J w, the angular momentum in the inertial frame.
Vec3 inertial_angular_momentum(const BodyState& s, const Inertia& inertia);

}  // namespace attctl

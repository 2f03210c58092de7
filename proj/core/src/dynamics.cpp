#include "attctl/dynamics.hpp"

#include <cmath>
#include <string>

#include "attctl/errors.hpp"

namespace attctl {

namespace {

// Unconstrained coordinates the integrator works in.
struct Coords {
  Vec4 q;
  Mat3 R;
  Vec3 omega;

  Coords plus(double h, const StateDerivative& d) const {
    return {q + h * d.q_dot, R + h * d.R_dot, omega + h * d.omega_dot};
  }
};

Coords coords_of(const BodyState& s) { return {s.q.coeffs(), s.R.matrix(), s.omega}; }

StateDerivative derivative(const Coords& c, const Vec3& moment, const Inertia& inertia) {
  const double q0 = c.q(0);
  const Vec3 qv = c.q.tail<3>();
  const Vec3& w = c.omega;
  StateDerivative d;
  // 1/2 q (x) [0, w]
  d.q_dot(0) = -0.5 * qv.dot(w);
  d.q_dot.tail<3>() = 0.5 * (q0 * w + qv.cross(w));
  d.R_dot = c.R * hat(w);
  const Mat3& j = inertia.matrix();
  d.omega_dot = inertia.inverse() * (-w.cross(j * w) + moment);
  return d;
}

// Nearest valid state, used to feed a controller at intermediate stages.
BodyState project(const Coords& c) {
  return {renormalize(c.q), reorthonormalize(c.R), c.omega};
}

// Drift above this forces a projection regardless of renormalize_every, so
// that the RotationMatrix constructor check (1e-9) never trips.
constexpr double kForcedProjectionDrift = 1e-10;

BodyState finish(const Coords& c, const IntegratorConfig& cfg, std::size_t step_index) {
  if (!c.q.allFinite() || !c.R.allFinite() || !c.omega.allFinite()) {
    throw NonFiniteState("integration produced a non-finite state", step_index);
  }
  const bool scheduled = (step_index + 1) % cfg.renormalize_every == 0;
  BodyState out{renormalize(c.q), RotationMatrix::identity(), c.omega};
  if (scheduled || orthogonality_error(c.R) > kForcedProjectionDrift ||
      std::abs(c.R.determinant() - 1.0) > kForcedProjectionDrift) {
    out.R = reorthonormalize(c.R);
  } else {
    out.R = RotationMatrix(c.R);
  }
  return out;
}

template <typename MomentAt>
BodyState integrate(const BodyState& s, MomentAt&& moment_at, const Inertia& inertia,
                    const IntegratorConfig& cfg, std::size_t step_index) {
  cfg.validate();
  const double h = cfg.dt;
  const Coords x0 = coords_of(s);
  if (cfg.scheme == IntegrationScheme::euler) {
    const StateDerivative k1 = derivative(x0, moment_at(x0, 0.0), inertia);
    return finish(x0.plus(h, k1), cfg, step_index);
  }
  const StateDerivative k1 = derivative(x0, moment_at(x0, 0.0), inertia);
  const Coords x1 = x0.plus(0.5 * h, k1);
  const StateDerivative k2 = derivative(x1, moment_at(x1, 0.5 * h), inertia);
  const Coords x2 = x0.plus(0.5 * h, k2);
  const StateDerivative k3 = derivative(x2, moment_at(x2, 0.5 * h), inertia);
  const Coords x3 = x0.plus(h, k3);
  const StateDerivative k4 = derivative(x3, moment_at(x3, h), inertia);

  Coords out = x0;
  out.q += h / 6.0 * (k1.q_dot + 2.0 * k2.q_dot + 2.0 * k3.q_dot + k4.q_dot);
  out.R += h / 6.0 * (k1.R_dot + 2.0 * k2.R_dot + 2.0 * k3.R_dot + k4.R_dot);
  out.omega +=
      h / 6.0 * (k1.omega_dot + 2.0 * k2.omega_dot + 2.0 * k3.omega_dot + k4.omega_dot);
  return finish(out, cfg, step_index);
}

}  // namespace

Inertia::Inertia(const Mat3& j) : j_(j) {
  if (!j.allFinite() || (j - j.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InvalidArgument("Inertia: matrix must be finite and symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(j);
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw InvalidArgument("Inertia: matrix must be positive definite");
  }
  j_inv_ = j.inverse();
}

Inertia Inertia::diagonal(double j1, double j2, double j3) {
  return Inertia(Vec3(j1, j2, j3).asDiagonal().toDenseMatrix());
}

BodyState BodyState::from_quaternion(const Quaternion& q, const Vec3& omega) {
  return {q, to_rotation_matrix(q), omega};
}

double consistency_error(const BodyState& s) {
  return (to_rotation_matrix(s.q).matrix() - s.R.matrix()).cwiseAbs().maxCoeff();
}

StateDerivative state_derivative(const BodyState& s, const Vec3& moment,
                                 const Inertia& inertia) {
  return derivative(coords_of(s), moment, inertia);
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidArgument("IntegratorConfig: dt must be positive");
  }
  if (renormalize_every < 1) {
    throw InvalidArgument("IntegratorConfig: renormalize_every must be >= 1");
  }
}

BodyState step(const BodyState& s, const Vec3& moment, const Inertia& inertia,
               const IntegratorConfig& cfg, std::size_t step_index) {
  if (!moment.allFinite()) {
    throw NonFiniteState("non-finite moment", step_index);
  }
  try {
    return integrate(
        s, [&](const Coords&, double) { return moment; }, inertia, cfg, step_index);
  } catch (const TooFarFromManifold& e) {
    throw NonFiniteState(std::string("integration diverged: ") + e.what(), step_index);
  }
}

BodyState step(const BodyState& s, const MomentFunction& moment, const Inertia& inertia,
               const IntegratorConfig& cfg, std::size_t step_index) {
  auto moment_at = [&](const Coords& c, double offset) -> Vec3 {
    if (!c.q.allFinite() || !c.R.allFinite() || !c.omega.allFinite()) {
      throw NonFiniteState("integration produced a non-finite stage", step_index);
    }
    const Vec3 m = offset == 0.0 ? moment(0.0, s) : moment(offset, project(c));
    if (!m.allFinite()) throw NonFiniteState("non-finite moment", step_index);
    return m;
  };
  try {
    return integrate(s, moment_at, inertia, cfg, step_index);
  } catch (const TooFarFromManifold& e) {
    throw NonFiniteState(std::string("integration diverged: ") + e.what(), step_index);
  }
}

double kinetic_energy(const BodyState& s, const Inertia& inertia) {
  return 0.5 * s.omega.dot(inertia.matrix() * s.omega);
}

Vec3 inertial_angular_momentum(const BodyState& s, const Inertia& inertia) {
  return s.R.matrix() * (inertia.matrix() * s.omega);
}

}  // namespace attctl

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "attctl/control_laws.hpp"
#include "attctl/pseudo_target.hpp"

namespace attctl {

enum class Representation { quaternion, so3 };

/// Measurement noise. Attitude: q_meas = q (x) exp(n), n ~ N(0, s_att^2 I3)
/// in rad, applied identically to R. Rate: w_meas = w + N(0, s_w^2 I3).
/// One draw per control step.
struct NoiseConfig {
  bool enabled = false;
  double sigma_attitude = 0.01;
  double sigma_omega = 0.01;

  void validate() const;
};

/// When the moment is recomputed during integration.
enum class ControlUpdate {
  continuous,       ///< at every integrator stage (noise draw held over the step)
  zero_order_hold,  ///< once per step, held constant over dt
};

/// A run counts as converged from the first logged time after which these
/// hold at every remaining sample.
struct ConvergenceCriteria {
  double psi_tol = 0.01;    ///< so3: Psi < psi_tol
  double quat_tol = 1e-4;   ///< quaternion: 1 - |q_e0| < quat_tol
  double omega_tol = 0.01;  ///< both: |e_w| < omega_tol (rad/s)
};

struct Scenario {
  Representation representation = Representation::quaternion;
  Quaternion initial_attitude;
  /// Rotation vector (rad) applied on the body side of initial_attitude.
  Vec3 initial_perturbation = Vec3::Zero();
  Vec3 initial_omega = Vec3::Zero();
  DesiredTrajectory desired = DesiredTrajectory::setpoint(Quaternion::identity());
  Inertia inertia = Inertia::diagonal(0.0125, 0.0125, 0.025);
  ControllerGains gains;
  WeightMatrix K{1.0, 2.0, 3.0};
  PseudoConfig pseudo;
  NoiseConfig noise;
  IntegratorConfig integrator;
  ControlUpdate control_update = ControlUpdate::continuous;
  ConvergenceCriteria convergence;
  double duration = 20.0;
  std::uint64_t seed = 1;

  void validate() const;
  BodyState initial_state() const;
  /// round(duration / dt)
  std::size_t step_count() const;
};

/// One logged sample. Error quantities are computed from the true state;
/// the moment, region and pseudo flag reflect what the controller saw.
struct LogRecord {
  double t = 0.0;
  Quaternion q;
  RotationMatrix R;
  Vec3 omega = Vec3::Zero();
  Quaternion q_e;
  double psi = 0.0;
  double e_R_norm = 0.0;
  double e_omega_norm = 0.0;
  Vec3 moment = Vec3::Zero();
  double V = 0.0;
  ErrorRegion region = ErrorRegion::nominal;
  bool pseudo_active = false;
};

struct TrajectoryLog {
  std::vector<LogRecord> records;
};

struct ConvergenceReport {
  bool converged = false;
  double t_converge = std::numeric_limits<double>::infinity();
  double final_V = 0.0;
};

struct RunResult {
  TrajectoryLog log;
  ConvergenceReport report;
};

/// Closed loop: measure, form the error, substitute the pseudo-error when
/// enabled, evaluate the law for the scenario's representation, integrate.
/// Deterministic for a given scenario (seed included). NonFiniteState from
/// the integrator propagates with its step index.
RunResult run_scenario(const Scenario& s);

ConvergenceReport assess_convergence(const TrajectoryLog& log, Representation rep,
                                     const ConvergenceCriteria& criteria);

struct SeedReport {
  std::uint64_t seed;
  ConvergenceReport report;
};

/// Per-seed reports in seed order plus order statistics of t_converge.
/// Non-converged runs count as t_converge = +inf.
struct MonteCarloSummary {
  std::vector<SeedReport> runs;
  std::size_t n_converged = 0;
  double median_t = 0.0;
  double q25_t = 0.0;
  double q75_t = 0.0;
  double q90_t = 0.0;
};

/// Runs seeds s.seed, s.seed + 1, ..., s.seed + n_seeds - 1. `threads` = 0
/// picks the hardware concurrency; results do not depend on it.
MonteCarloSummary run_monte_carlo(const Scenario& s, std::size_t n_seeds,
                                  unsigned threads = 0);

/// Linear-interpolation quantile of a sample, p in [0, 1]. +inf entries
/// sort last; any interpolation touching one yields +inf.
double quantile(std::vector<double> values, double p);

struct SweepRow {
  double beta_deg;
  double q_norm;    ///< |q_e0 q_ev|
  double e_R_norm;  ///< |e_R|
};

/// Error norms for a rotation error of beta about `axis`, beta uniform on
/// [0, 180] deg with n_points >= 2 samples.
std::vector<SweepRow> sweep_error_norms(const WeightMatrix& K, const Vec3& axis,
                                        std::size_t n_points);

/// CSV writers; every double is written with 17 significant digits.
void write_log_csv(std::ostream& os, const TrajectoryLog& log);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
/// Header `label,seed,converged,t_converge,final_V`, then one row per seed of
/// every labelled summary in order. Non-converged runs print t_converge = inf.
void write_monte_carlo_csv(
    std::ostream& os,
    const std::vector<std::pair<std::string, MonteCarloSummary>>& summaries);

/// 180 deg rest-to-rest maneuver about e3: q from [1 0 0 0] to q_d = [0 0 0 1]
/// (R from I to diag(-1, -1, 1)), with the default inertia, gains, K and
/// epsilon. Pseudo-targets on, noise off, 20 s at dt = 1e-3.
Scenario maneuver_180_e3(Representation rep);

}  // namespace attctl

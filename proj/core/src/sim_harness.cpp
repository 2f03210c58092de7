#include "attctl/sim_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "attctl/errors.hpp"

namespace attctl {

namespace {

struct NoiseSample {
  Vec3 attitude = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
};

NoiseSample draw_noise(const NoiseConfig& cfg, std::mt19937_64& rng) {
  NoiseSample n;
  if (!cfg.enabled) return n;
  std::normal_distribution<double> att(0.0, cfg.sigma_attitude);
  std::normal_distribution<double> rate(0.0, cfg.sigma_omega);
  for (int i = 0; i < 3; ++i) n.attitude(i) = att(rng);
  for (int i = 0; i < 3; ++i) n.omega(i) = rate(rng);
  return n;
}

BodyState measure(const BodyState& truth, const NoiseSample& n) {
  if (n.attitude.isZero(0.0) && n.omega.isZero(0.0)) return truth;
  return {truth.q * quaternion_exp(n.attitude), truth.R * rotation_exp(n.attitude),
          truth.omega + n.omega};
}

struct ControlOutput {
  Vec3 moment;
  ErrorRegion region;
  bool pseudo_active;
};

ControlOutput evaluate_control(const Scenario& s, const BodyState& measured, double t) {
  const DesiredState d = s.desired.at(t);
  ControlOutput out{};
  if (s.representation == Representation::quaternion) {
    const Quaternion q_e = quaternion_error(d.q, measured.q);
    out.region = classify_error_region(q_e, s.pseudo);
    out.pseudo_active = s.pseudo.enabled && out.region != ErrorRegion::nominal;
    std::optional<Quaternion> override_q;
    if (out.pseudo_active) override_q = pseudo_quat_error(q_e, s.pseudo);
    out.moment = moment_quaternion(measured, s.desired, t, s.gains, s.inertia, override_q);
  } else {
    const RotationMatrix R_e = rotation_error(measured.R, d.R);
    out.region = classify_error_region(R_e, s.K, s.pseudo);
    out.pseudo_active = s.pseudo.enabled && out.region != ErrorRegion::nominal;
    std::optional<Vec3> override_e;
    if (out.pseudo_active) override_e = pseudo_rotation_error(R_e, s.K, s.pseudo);
    out.moment =
        moment_rotation(measured, s.desired, t, s.gains, s.K, s.inertia, override_e);
  }
  return out;
}

LogRecord make_record(const Scenario& s, const BodyState& truth, double t,
                      const ControlOutput& control) {
  const DesiredState d = s.desired.at(t);
  LogRecord r;
  r.t = t;
  r.q = truth.q;
  r.R = truth.R;
  r.omega = truth.omega;
  r.q_e = quaternion_error(d.q, truth.q);
  r.psi = psi(truth.R, d.R, s.K);
  r.e_R_norm = attitude_error_vector(truth.R, d.R, s.K).norm();
  r.e_omega_norm = omega_error(truth.omega, truth.R, d.R, d.omega).norm();
  r.moment = control.moment;
  r.V = s.representation == Representation::quaternion
            ? lyapunov_value_quat(truth, s.desired, t, s.gains, s.inertia)
            : lyapunov_value_rot(truth, s.desired, t, s.gains, s.K, s.inertia);
  r.region = control.region;
  r.pseudo_active = control.pseudo_active;
  return r;
}

bool within_tolerance(const LogRecord& r, Representation rep,
                      const ConvergenceCriteria& c) {
  if (!(r.e_omega_norm < c.omega_tol)) return false;
  if (rep == Representation::quaternion) {
    return 1.0 - std::abs(r.q_e.scalar()) < c.quat_tol;
  }
  return r.psi < c.psi_tol;
}

}  // namespace

void NoiseConfig::validate() const {
  if (!(sigma_attitude >= 0.0) || !(sigma_omega >= 0.0) || !std::isfinite(sigma_attitude) ||
      !std::isfinite(sigma_omega)) {
    throw InvalidArgument("NoiseConfig: sigmas must be finite and nonnegative");
  }
}

void Scenario::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw InvalidArgument("Scenario: duration must be positive");
  }
  if (!initial_perturbation.allFinite() || !initial_omega.allFinite()) {
    throw InvalidArgument("Scenario: initial state must be finite");
  }
  gains.validate();
  noise.validate();
  integrator.validate();
  if (representation == Representation::so3) {
    pseudo.validate(K);
  } else {
    pseudo.validate();
  }
  if (!(convergence.psi_tol > 0.0) || !(convergence.quat_tol > 0.0) ||
      !(convergence.omega_tol > 0.0)) {
    throw InvalidArgument("Scenario: convergence tolerances must be positive");
  }
}

BodyState Scenario::initial_state() const {
  return BodyState::from_quaternion(initial_attitude * quaternion_exp(initial_perturbation),
                                    initial_omega);
}

std::size_t Scenario::step_count() const {
  return static_cast<std::size_t>(std::llround(duration / integrator.dt));
}

RunResult run_scenario(const Scenario& s) {
  s.validate();
  const std::size_t n_steps = s.step_count();
  const double dt = s.integrator.dt;
  std::mt19937_64 rng(s.seed);

  RunResult result;
  result.log.records.reserve(n_steps + 1);
  BodyState state = s.initial_state();
  for (std::size_t i = 0;; ++i) {
    const double t = static_cast<double>(i) * dt;
    const NoiseSample noise = draw_noise(s.noise, rng);
    const ControlOutput control = evaluate_control(s, measure(state, noise), t);
    result.log.records.push_back(make_record(s, state, t, control));
    if (i == n_steps) break;

    if (s.control_update == ControlUpdate::zero_order_hold) {
      state = step(state, control.moment, s.inertia, s.integrator, i);
    } else {
      const MomentFunction law = [&](double offset, const BodyState& stage) {
        if (offset == 0.0) return control.moment;
        return evaluate_control(s, measure(stage, noise), t + offset).moment;
      };
      state = step(state, law, s.inertia, s.integrator, i);
    }
  }
  result.report = assess_convergence(result.log, s.representation, s.convergence);
  return result;
}

ConvergenceReport assess_convergence(const TrajectoryLog& log, Representation rep,
                                     const ConvergenceCriteria& criteria) {
  ConvergenceReport report;
  if (log.records.empty()) return report;
  report.final_V = log.records.back().V;
  std::size_t first_good = log.records.size();
  while (first_good > 0 && within_tolerance(log.records[first_good - 1], rep, criteria)) {
    --first_good;
  }
  if (first_good < log.records.size()) {
    report.converged = true;
    report.t_converge = log.records[first_good].t;
  }
  return report;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidArgument("quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("quantile: p must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0 || lo + 1 >= values.size()) return values[lo];
  const double a = values[lo];
  const double b = values[lo + 1];
  if (std::isinf(a) || std::isinf(b)) return std::numeric_limits<double>::infinity();
  return a + frac * (b - a);
}

MonteCarloSummary run_monte_carlo(const Scenario& s, std::size_t n_seeds, unsigned threads) {
  if (n_seeds < 1) throw InvalidArgument("run_monte_carlo: n_seeds must be >= 1");
  s.validate();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_seeds));

  MonteCarloSummary summary;
  summary.runs.resize(n_seeds);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < n_seeds; i = next++) {
      try {
        Scenario run = s;
        run.seed = s.seed + i;
        summary.runs[i] = {run.seed, run_scenario(run).report};
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<double> times;
  times.reserve(n_seeds);
  for (const SeedReport& r : summary.runs) {
    times.push_back(r.report.t_converge);
    if (r.report.converged) ++summary.n_converged;
  }
  summary.median_t = quantile(times, 0.5);
  summary.q25_t = quantile(times, 0.25);
  summary.q75_t = quantile(times, 0.75);
  summary.q90_t = quantile(times, 0.9);
  return summary;
}

std::vector<SweepRow> sweep_error_norms(const WeightMatrix& K, const Vec3& axis,
                                        std::size_t n_points) {
  if (n_points < 2) throw InvalidArgument("sweep_error_norms: n_points must be >= 2");
  if (std::abs(axis.norm() - 1.0) > 1e-9) {
    throw InvalidArgument("sweep_error_norms: axis must be a unit vector");
  }
  std::vector<SweepRow> rows;
  rows.reserve(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double beta_deg = 180.0 * static_cast<double>(i) / static_cast<double>(n_points - 1);
    const AxisAngle aa(axis, beta_deg * std::numbers::pi / 180.0);
    const Quaternion q_e = to_quaternion(aa);
    const RotationMatrix R_e = to_rotation_matrix(aa);
    rows.push_back({beta_deg, (q_e.scalar() * q_e.vec()).norm(),
                    attitude_error_vector(R_e, K).norm()});
  }
  return rows;
}

void write_log_csv(std::ostream& os, const TrajectoryLog& log) {
  os << "t,q0,q1,q2,q3,R00,R01,R02,R10,R11,R12,R20,R21,R22,w1,w2,w3,"
        "qe0,qe1,qe2,qe3,psi,eR_norm,ew_norm,M1,M2,M3,V,region,pseudo_active\n";
  for (const LogRecord& r : log.records) {
    const Vec4 q = r.q.coeffs();
    const Vec4 qe = r.q_e.coeffs();
    const Mat3& m = r.R.matrix();
    fmt::print(os, "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}", r.t, q(0), q(1), q(2), q(3));
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) fmt::print(os, ",{:.17g}", m(i, j));
    }
    fmt::print(os, ",{:.17g},{:.17g},{:.17g}", r.omega(0), r.omega(1), r.omega(2));
    fmt::print(os, ",{:.17g},{:.17g},{:.17g},{:.17g}", qe(0), qe(1), qe(2), qe(3));
    fmt::print(os, ",{:.17g},{:.17g},{:.17g}", r.psi, r.e_R_norm, r.e_omega_norm);
    fmt::print(os, ",{:.17g},{:.17g},{:.17g},{:.17g}", r.moment(0), r.moment(1),
               r.moment(2), r.V);
    fmt::print(os, ",{},{}\n", to_string(r.region), r.pseudo_active ? 1 : 0);
  }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "beta_deg,qnorm,ernorm\n";
  for (const SweepRow& r : rows) {
    fmt::print(os, "{:.17g},{:.17g},{:.17g}\n", r.beta_deg, r.q_norm, r.e_R_norm);
  }
}

void write_monte_carlo_csv(
    std::ostream& os,
    const std::vector<std::pair<std::string, MonteCarloSummary>>& summaries) {
  os << "label,seed,converged,t_converge,final_V\n";
  for (const auto& [label, summary] : summaries) {
    for (const SeedReport& r : summary.runs) {
      fmt::print(os, "{},{},{},{:.17g},{:.17g}\n", label, r.seed,
                 r.report.converged ? 1 : 0, r.report.t_converge, r.report.final_V);
    }
  }
}

Scenario maneuver_180_e3(Representation rep) {
  Scenario s;
  s.representation = rep;
  s.initial_attitude = Quaternion::identity();
  s.desired = DesiredTrajectory::setpoint(Quaternion(0.0, Vec3::UnitZ()));
  return s;
}

}  // namespace attctl

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include <doctest.h>

#include "attctl/errors.hpp"
#include "attctl/sim_harness.hpp"
#include "support/oracles.hpp"

using namespace attctl;
using oracle::max_abs;
using std::numbers::pi;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

Scenario short_run(Representation rep, double duration = 2.0) {
  Scenario s = maneuver_180_e3(rep);
  s.duration = duration;
  return s;
}

std::string csv_of(const TrajectoryLog& log) {
  std::ostringstream os;
  write_log_csv(os, log);
  return os.str();
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("scenario defaults and validation") {
  const Scenario s;
  CHECK_NOTHROW(s.validate());
  CHECK(s.inertia.matrix() == Mat3(Vec3(0.0125, 0.0125, 0.025).asDiagonal()));
  CHECK(s.K.diagonal() == Vec3(1, 2, 3));
  CHECK(s.pseudo.epsilon == 0.01);
  CHECK(s.noise.sigma_attitude == 0.01);
  CHECK(s.noise.sigma_omega == 0.01);
  CHECK(s.integrator.dt == 1e-3);
  CHECK(s.duration == 20.0);
  CHECK(s.step_count() == 20000);

  Scenario bad = s;
  bad.duration = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = s;
  bad.noise.sigma_omega = -1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = s;
  bad.gains.k_R = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = s;
  bad.convergence.omega_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = s;
  bad.representation = Representation::so3;
  bad.pseudo.epsilon = 0.49;
  CHECK_NOTHROW(bad.validate());
  bad.K = WeightMatrix(1.0, 1.5, 3.0);
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = s;
  bad.initial_omega = Vec3(std::nan(""), 0, 0);
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  CHECK_THROWS_AS(run_scenario(bad), InvalidArgument);
}

TEST_CASE("initial state applies the body-side perturbation") {
  Scenario s;
  s.initial_attitude = Quaternion(Vec4(0, 0, 0, 1));
  s.initial_perturbation = Vec3(0.01, 0, 0);
  const BodyState b = s.initial_state();
  const Mat3 want = Mat3(Vec3(-1, -1, 1).asDiagonal()) * oracle::axis_angle_matrix(Vec3::UnitX(), 0.01);
  CHECK(max_abs(b.R.matrix() - want) < 1e-15);
  CHECK(consistency_error(b) < 1e-15);
}

TEST_CASE("identity start is converged from the first sample") {
  for (Representation rep : {Representation::quaternion, Representation::so3}) {
    Scenario s;
    s.representation = rep;
    s.duration = 1.0;
    const RunResult r = run_scenario(s);
    CHECK(r.report.converged);
    CHECK(r.report.t_converge == 0.0);
    CHECK(r.report.final_V == 0.0);
    for (const LogRecord& rec : r.log.records) CHECK(rec.moment == Vec3::Zero());
  }
}

TEST_CASE("log layout") {
  const RunResult r = run_scenario(short_run(Representation::quaternion, 0.5));
  REQUIRE(r.log.records.size() == 501);
  for (std::size_t i = 1; i < r.log.records.size(); ++i) {
    CHECK(r.log.records[i].t > r.log.records[i - 1].t);
  }
  CHECK(r.log.records.back().t == doctest::Approx(0.5).epsilon(1e-15));
  const LogRecord& first = r.log.records.front();
  CHECK(first.region == ErrorRegion::near_A);
  CHECK(first.pseudo_active);
  CHECK(first.psi == doctest::Approx(3.0));
  CHECK(first.V == doctest::Approx(10.0));
  for (const LogRecord& rec : r.log.records) {
    CHECK(rec.pseudo_active == (rec.region != ErrorRegion::nominal));
  }
}

TEST_CASE("half turn without pseudo-targets is a fixed point") {
  for (Representation rep : {Representation::quaternion, Representation::so3}) {
    Scenario s = short_run(rep, 5.0);
    s.pseudo.enabled = false;
    const RunResult r = run_scenario(s);
    CHECK_FALSE(r.report.converged);
    CHECK(r.report.t_converge == kInf);
    double worst = 0.0;
    for (const LogRecord& rec : r.log.records) worst = std::max(worst, rec.moment.norm());
    CHECK(worst <= 1e-10);
    CHECK(r.log.records.back().psi == doctest::Approx(3.0).epsilon(1e-12));
    CHECK_FALSE(r.log.records.back().pseudo_active);
  }
}

TEST_CASE("half turn with pseudo-targets converges") {
  for (Representation rep : {Representation::quaternion, Representation::so3}) {
    const RunResult r = run_scenario(short_run(rep, 10.0));
    CHECK(r.report.converged);
    CHECK(r.report.t_converge < 10.0);
    std::size_t last = 0;
    for (std::size_t i = 0; i < r.log.records.size(); ++i) {
      if (r.log.records[i].pseudo_active) last = i;
    }
    CHECK(last < 100);
    for (std::size_t i = last + 2; i < r.log.records.size(); ++i) {
      CHECK(r.log.records[i].V <= r.log.records[i - 1].V + 1e-12);
    }
    CHECK(r.report.final_V < 1e-6);
  }
}

TEST_CASE("runs are deterministic given the seed") {
  Scenario s = short_run(Representation::so3, 1.0);
  s.noise.enabled = true;
  const std::string a = csv_of(run_scenario(s).log);
  CHECK(a == csv_of(run_scenario(s).log));
  s.seed = 2;
  CHECK(a != csv_of(run_scenario(s).log));
}

TEST_CASE("zero-order hold keeps the moment constant over a step") {
  Scenario s = short_run(Representation::quaternion, 5.0);
  s.control_update = ControlUpdate::zero_order_hold;
  const RunResult r = run_scenario(s);
  CHECK(r.report.converged);
  CHECK(r.report.t_converge < 10.0);
}

TEST_CASE("numerical blow-up is reported with its step") {
  Scenario s = short_run(Representation::quaternion, 1.0);
  s.gains.k_omega_q = 1e6;
  s.initial_omega = Vec3(0.1, 0, 0);
  try {
    run_scenario(s);
    FAIL("expected NonFiniteState");
  } catch (const NonFiniteState& e) {
    CHECK(e.step() < 1000);
  }
}

TEST_CASE("convergence assessment") {
  TrajectoryLog log;
  auto add = [&](double t, double qe0, double ew) {
    LogRecord r;
    r.t = t;
    r.q_e = Quaternion::normalized(qe0, Vec3(std::sqrt(std::max(0.0, 1 - qe0 * qe0)), 0, 0));
    r.e_omega_norm = ew;
    r.psi = 1.0 - qe0;
    r.V = t;
    log.records.push_back(r);
  };
  add(0.0, 1.0, 0.0);
  add(1.0, 0.5, 0.0);
  add(2.0, 1.0, 0.005);
  add(3.0, 1.0, 0.0);
  const ConvergenceCriteria c;
  ConvergenceReport r = assess_convergence(log, Representation::quaternion, c);
  CHECK(r.converged);
  CHECK(r.t_converge == 2.0);
  CHECK(r.final_V == 3.0);

  log.records[3].e_omega_norm = 0.02;
  r = assess_convergence(log, Representation::quaternion, c);
  CHECK_FALSE(r.converged);
  CHECK(r.t_converge == kInf);

  // Sign of q_e0 does not matter.
  log.records[3].e_omega_norm = 0.0;
  log.records[3].q_e = Quaternion(Vec4(-1, 0, 0, 0));
  CHECK(assess_convergence(log, Representation::quaternion, c).t_converge == 2.0);

  CHECK_FALSE(assess_convergence(TrajectoryLog{}, Representation::so3, c).converged);
}

TEST_CASE("quantiles") {
  CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == 2.5);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0, 5.0}, 0.25) == 2.0);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.0) == 1.0);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 1.0) == 4.0);
  CHECK(quantile({1.0, kInf, 2.0}, 0.5) == 2.0);
  CHECK(quantile({1.0, kInf, 2.0, kInf}, 0.5) == kInf);
  CHECK(quantile({1.0, kInf}, 1.0) == kInf);
  CHECK_THROWS_AS(quantile({}, 0.5), InvalidArgument);
  CHECK_THROWS_AS(quantile({1.0}, 1.5), InvalidArgument);
}

TEST_CASE("Monte Carlo batches") {
  Scenario s = short_run(Representation::quaternion, 1.0);
  s.noise.enabled = true;
  s.seed = 10;

  SUBCASE("one seed equals a single run") {
    const MonteCarloSummary m = run_monte_carlo(s, 1);
    REQUIRE(m.runs.size() == 1);
    const RunResult r = run_scenario(s);
    CHECK(m.runs[0].seed == 10);
    CHECK(m.runs[0].report.converged == r.report.converged);
    CHECK(m.runs[0].report.t_converge == r.report.t_converge);
    CHECK(m.runs[0].report.final_V == r.report.final_V);
  }
  SUBCASE("seed order and thread count do not change results") {
    const MonteCarloSummary a = run_monte_carlo(s, 6, 1);
    const MonteCarloSummary b = run_monte_carlo(s, 6, 4);
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(a.runs[i].seed == 10 + i);
      CHECK(b.runs[i].seed == 10 + i);
      CHECK(a.runs[i].report.final_V == b.runs[i].report.final_V);
    }
    CHECK(a.median_t == b.median_t);
    CHECK(a.n_converged == b.n_converged);
  }
  SUBCASE("without noise every seed gives the same report") {
    Scenario quiet = s;
    quiet.noise.enabled = false;
    const MonteCarloSummary m = run_monte_carlo(quiet, 5);
    for (const SeedReport& r : m.runs) {
      CHECK(r.report.t_converge == m.runs[0].report.t_converge);
      CHECK(r.report.final_V == m.runs[0].report.final_V);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(run_monte_carlo(s, 0), InvalidArgument);
    Scenario bad = s;
    bad.gains.k_omega_q = 1e6;
    bad.initial_omega = Vec3(0.1, 0, 0);
    CHECK_THROWS_AS(run_monte_carlo(bad, 3, 2), NonFiniteState);
  }
}

TEST_CASE("error-norm sweep") {
  const std::vector<SweepRow> rows = sweep_error_norms(WeightMatrix(1, 2, 3), Vec3::UnitZ(), 181);
  REQUIRE(rows.size() == 181);
  CHECK(rows[0].beta_deg == 0.0);
  CHECK(rows[0].q_norm == 0.0);
  CHECK(rows[0].e_R_norm == 0.0);
  CHECK(rows[90].beta_deg == 90.0);
  CHECK(rows[90].q_norm == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rows[90].e_R_norm == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(rows[180].beta_deg == 180.0);
  CHECK(rows[180].q_norm <= 1e-12);
  CHECK(rows[180].e_R_norm <= 1e-12);

  const std::vector<SweepRow> about_x = sweep_error_norms(WeightMatrix(1, 2, 3), Vec3::UnitX(), 3);
  CHECK(about_x[1].e_R_norm == doctest::Approx(2.5).epsilon(1e-15));

  CHECK_THROWS_AS(sweep_error_norms(WeightMatrix(1, 2, 3), Vec3::UnitZ(), 1), InvalidArgument);
  CHECK_THROWS_AS(sweep_error_norms(WeightMatrix(1, 2, 3), Vec3(0, 0, 2), 10), InvalidArgument);
}

TEST_CASE("CSV writers") {
  SUBCASE("trajectory log") {
    const RunResult r = run_scenario(short_run(Representation::so3, 0.01));
    const std::string csv = csv_of(r.log);
    CHECK(csv.rfind("t,q0,q1,q2,q3,R00,R01,R02,R10,R11,R12,R20,R21,R22,w1,w2,w3,"
                    "qe0,qe1,qe2,qe3,psi,eR_norm,ew_norm,M1,M2,M3,V,region,pseudo_active\n",
                    0) == 0);
    CHECK(count_lines(csv) == 12);
    std::istringstream in(csv);
    std::string header;
    std::string row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(row.find(",near_S3,1") != std::string::npos);
    std::size_t commas = 0;
    for (char c : row) commas += c == ',';
    CHECK(commas == 29);
  }
  SUBCASE("full precision") {
    std::ostringstream os;
    write_sweep_csv(os, {{0.1, 1.0 / 3.0, 2.0}});
    CHECK(os.str() == "beta_deg,qnorm,ernorm\n0.10000000000000001,0.33333333333333331,2\n");
  }
  SUBCASE("Monte Carlo rows") {
    MonteCarloSummary m;
    m.runs.push_back({7, {true, 1.5, 0.25}});
    m.runs.push_back({8, {false, kInf, 3.0}});
    std::ostringstream os;
    write_monte_carlo_csv(os, {{"pseudo_on", m}});
    CHECK(os.str() == "label,seed,converged,t_converge,final_V\n"
                      "pseudo_on,7,1,1.5,0.25\npseudo_on,8,0,inf,3\n");
  }
}

TEST_CASE("half-turn preset") {
  for (Representation rep : {Representation::quaternion, Representation::so3}) {
    const Scenario s = maneuver_180_e3(rep);
    CHECK(s.representation == rep);
    CHECK(s.pseudo.enabled);
    CHECK_FALSE(s.noise.enabled);
    CHECK(s.duration == 20.0);
    CHECK(s.desired.at(0.0).q.coeffs() == Vec4(0, 0, 0, 1));
    CHECK(s.initial_attitude.coeffs() == Vec4(1, 0, 0, 0));
  }
}

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include <doctest.h>

#include "attctl/errors.hpp"
#include "attctl/scenario_file.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace attctl;
using oracle::max_abs;
using std::numbers::pi;

namespace {

std::string message_of(std::string_view text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, std::string_view needle) {
  return s.find(needle) != std::string::npos;
}

void check_same(const Scenario& a, const Scenario& b) {
  CHECK(a.representation == b.representation);
  CHECK(a.initial_attitude.coeffs() == b.initial_attitude.coeffs());
  CHECK(a.initial_perturbation == b.initial_perturbation);
  CHECK(a.initial_omega == b.initial_omega);
  CHECK(a.desired.kind() == b.desired.kind());
  CHECK(a.desired.initial().coeffs() == b.desired.initial().coeffs());
  CHECK(a.desired.axis() == b.desired.axis());
  CHECK(a.desired.rate() == b.desired.rate());
  CHECK(a.inertia.matrix() == b.inertia.matrix());
  CHECK(a.gains.k_q == b.gains.k_q);
  CHECK(a.gains.k_omega_q == b.gains.k_omega_q);
  CHECK(a.gains.k_R == b.gains.k_R);
  CHECK(a.gains.k_omega_R == b.gains.k_omega_R);
  CHECK(a.K.diagonal() == b.K.diagonal());
  CHECK(a.pseudo.enabled == b.pseudo.enabled);
  CHECK(a.pseudo.epsilon == b.pseudo.epsilon);
  CHECK(a.pseudo.sign_policy == b.pseudo.sign_policy);
  CHECK(a.noise.enabled == b.noise.enabled);
  CHECK(a.noise.sigma_attitude == b.noise.sigma_attitude);
  CHECK(a.noise.sigma_omega == b.noise.sigma_omega);
  CHECK(a.integrator.dt == b.integrator.dt);
  CHECK(a.integrator.scheme == b.integrator.scheme);
  CHECK(a.integrator.renormalize_every == b.integrator.renormalize_every);
  CHECK(a.control_update == b.control_update);
  CHECK(a.convergence.psi_tol == b.convergence.psi_tol);
  CHECK(a.convergence.quat_tol == b.convergence.quat_tol);
  CHECK(a.convergence.omega_tol == b.convergence.omega_tol);
  CHECK(a.duration == b.duration);
  CHECK(a.seed == b.seed);
}

}  // namespace

TEST_CASE("empty text gives the default scenario") {
  check_same(parse_scenario(""), Scenario{});
  check_same(parse_scenario("# only a comment\n\n"), Scenario{});
}

TEST_CASE("every section parses") {
  const Scenario s = parse_scenario(R"(
# half turn about e3, noisy
[scenario]
representation = "so3"
duration = 12.5
seed = 99
control_update = "zero_order_hold"

[initial]
axis = [0, 0, 1]
angle_deg = 90
perturbation = [0.001, 0, 0]   # body-side offset
omega = [0.1, -0.2, 0.3]

[desired]
kind = "spin"
quaternion = [1, 0, 0, 0]
spin_axis = [0, 0, 2]
spin_rate = 0.5

[inertia]
diagonal = [0.02, 0.03, 0.04]

[gains]
k_q = 8
k_omega_q = 1.2
k_R = 4
k_omega_R = 1.7

[weights]
K = [1.5, 2.5, 4]

[pseudo]
enabled = false
epsilon = 0.05
sign_policy = "sign_of_q_e0"

[noise]
enabled = true
sigma_attitude = 0.002
sigma_omega = 0.003

[integrator]
dt = 5e-4
scheme = "euler"
renormalize_every = 4

[convergence]
psi_tol = 0.02
quat_tol = 2e-4
omega_tol = 0.05
)");
  CHECK(s.representation == Representation::so3);
  CHECK(s.duration == 12.5);
  CHECK(s.seed == 99);
  CHECK(s.control_update == ControlUpdate::zero_order_hold);
  CHECK(max_abs(s.initial_attitude.coeffs() - oracle::axis_angle_quat(Vec3::UnitZ(), pi / 2)) < 1e-15);
  CHECK(s.initial_perturbation == Vec3(0.001, 0, 0));
  CHECK(s.initial_omega == Vec3(0.1, -0.2, 0.3));
  CHECK(s.desired.kind() == DesiredTrajectory::Kind::spin);
  CHECK(s.desired.axis() == Vec3::UnitZ());
  CHECK(s.desired.rate() == 0.5);
  CHECK(s.inertia.matrix() == Mat3(Vec3(0.02, 0.03, 0.04).asDiagonal()));
  CHECK(s.gains.k_q == 8);
  CHECK(s.gains.k_omega_q == 1.2);
  CHECK(s.gains.k_R == 4);
  CHECK(s.gains.k_omega_R == 1.7);
  CHECK(s.K.diagonal() == Vec3(1.5, 2.5, 4));
  CHECK_FALSE(s.pseudo.enabled);
  CHECK(s.pseudo.epsilon == 0.05);
  CHECK(s.pseudo.sign_policy == SignPolicy::sign_of_q_e0);
  CHECK(s.noise.enabled);
  CHECK(s.noise.sigma_attitude == 0.002);
  CHECK(s.noise.sigma_omega == 0.003);
  CHECK(s.integrator.dt == 5e-4);
  CHECK(s.integrator.scheme == IntegrationScheme::euler);
  CHECK(s.integrator.renormalize_every == 4);
  CHECK(s.convergence.psi_tol == 0.02);
  CHECK(s.convergence.quat_tol == 2e-4);
  CHECK(s.convergence.omega_tol == 0.05);
}

TEST_CASE("full inertia matrix") {
  const Scenario s = parse_scenario("[inertia]\nmatrix = [2, 0.1, 0, 0.1, 3, 0, 0, 0, 4]\n");
  Mat3 want;
  want << 2, 0.1, 0, 0.1, 3, 0, 0, 0, 4;
  CHECK(s.inertia.matrix() == want);
}

TEST_CASE("syntax errors carry line numbers") {
  CHECK(contains(message_of("[scenario]\nduration 5\n"), "line 2"));
  CHECK(contains(message_of("duration = 5\n"), "outside of any section"));
  CHECK(contains(message_of("[scenario\n"), "malformed section header"));
  CHECK(contains(message_of("[scenario]\nduration = 5\nduration = 6\n"), "line 3: duplicate key 'duration'"));
  CHECK(contains(message_of("[noise]\n[noise]\n"), "duplicate section"));
  CHECK(contains(message_of("[scenario]\nduration = abc\n"), "bad value"));
  CHECK(contains(message_of("[scenario]\nduration = nan\n"), "bad value"));
  CHECK(contains(message_of("[scenario]\nrepresentation = \"so3\n"), "unterminated string"));
  CHECK(contains(message_of("[initial]\nomega = [1, 2\n"), "unterminated array"));
  CHECK(contains(message_of("[initial]\nomega = [1, 2,]\n"), "trailing comma"));
  CHECK(contains(message_of("[initial]\nomega = [1, x, 3]\n"), "bad array element"));
  CHECK(contains(message_of("[scenario]\nduration =\n"), "missing value"));
  CHECK(contains(message_of("[scenario]\n = 3\n"), "empty key"));
}

TEST_CASE("semantic errors") {
  CHECK(contains(message_of("[bogus]\n"), "unknown section [bogus]"));
  CHECK(contains(message_of("[gains]\nk_x = 1\n"), "line 2: unknown key 'k_x' in [gains]"));
  CHECK(contains(message_of("[scenario]\nrepresentation = \"euler\"\n"), "unknown representation"));
  CHECK(contains(message_of("[scenario]\nduration = \"long\"\n"), "must be a number"));
  CHECK(contains(message_of("[pseudo]\nenabled = 1\n"), "must be a boolean"));
  CHECK(contains(message_of("[initial]\nomega = [1, 2]\n"), "needs 3 numbers"));
  CHECK(contains(message_of("[scenario]\nseed = 1.5\n"), "nonnegative integer"));
  CHECK(contains(message_of("[scenario]\nseed = -1\n"), "nonnegative integer"));
  CHECK(contains(message_of("[initial]\nquaternion = [1, 0, 0, 0]\naxis = [0, 0, 1]\nangle_deg = 3\n"),
                 "not both"));
  CHECK(contains(message_of("[initial]\naxis = [0, 0, 1]\n"), "go together"));
  CHECK(contains(message_of("[initial]\nquaternion = [2, 0, 0, 0]\n"), "line 2"));
  CHECK(contains(message_of("[desired]\nspin_rate = 1\n"), "need kind = \"spin\""));
  CHECK(contains(message_of("[desired]\nkind = \"ramp\"\n"), "unknown desired kind"));
  CHECK(contains(message_of("[inertia]\ndiagonal = [1, 1, 1]\nmatrix = [1, 0, 0, 0, 1, 0, 0, 0, 1]\n"),
                 "not both"));
  CHECK(contains(message_of("[weights]\nK = [3, 2, 1]\n"), "k1 < k2 < k3"));
  CHECK(contains(message_of("[scenario]\nduration = -1\n"), "duration"));
  CHECK(contains(message_of("[pseudo]\nepsilon = 0.7\n"), "epsilon"));
  CHECK(contains(message_of("[integrator]\nrenormalize_every = 0\n"), "renormalize_every"));
  CHECK(contains(message_of("[inertia]\ndiagonal = [1, -1, 1]\n"), "positive definite"));
}

TEST_CASE("format round trip") {
  gen::Source src(51);
  Scenario s;
  s.representation = Representation::so3;
  s.initial_attitude = src.quaternion();
  s.initial_perturbation = src.vec3(0.01);
  s.initial_omega = src.vec3(1.0);
  s.desired = DesiredTrajectory::spin(src.quaternion(), src.unit_vec3(), 0.1 / 3.0);
  Mat3 j;
  j << 0.02, 0.001, 0, 0.001, 0.03, 0, 0, 0, 1.0 / 30.0;
  s.inertia = Inertia(j);
  s.gains.k_q = 1.0 / 7.0;
  s.K = WeightMatrix(0.1, 0.2, 0.3);
  s.pseudo.epsilon = 0.01;
  s.pseudo.sign_policy = SignPolicy::sign_of_q_e0;
  s.noise.enabled = true;
  s.noise.sigma_omega = 1e-3 / 3.0;
  s.integrator.dt = 1.0 / 3000.0;
  s.integrator.renormalize_every = 5;
  s.control_update = ControlUpdate::zero_order_hold;
  s.convergence.omega_tol = 0.03;
  s.duration = 7.25;
  s.seed = 18446744073709551615ull;

  const std::string text = format_scenario(s);
  check_same(parse_scenario(text), s);
  CHECK(format_scenario(parse_scenario(text)) == text);
  check_same(parse_scenario(format_scenario(Scenario{})), Scenario{});
}

TEST_CASE("loading from disk") {
  const auto dir = std::filesystem::temp_directory_path() / "attctl_scenario_file_test";
  std::filesystem::create_directories(dir);
  const auto good = dir / "good.toml";
  {
    std::ofstream out(good);
    out << "[scenario]\nduration = 3\n";
  }
  CHECK(load_scenario(good).duration == 3.0);

  const auto bad = dir / "bad.toml";
  {
    std::ofstream out(bad);
    out << "[scenario]\nduratoin = 3\n";
  }
  try {
    load_scenario(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(contains(e.what(), "bad.toml"));
    CHECK(contains(e.what(), "line 2"));
  }
  CHECK_THROWS_AS(load_scenario(dir / "missing.toml"), ConfigError);
  std::filesystem::remove_all(dir);
}

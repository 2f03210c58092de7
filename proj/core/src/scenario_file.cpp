#include "attctl/scenario_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "attctl/errors.hpp"

namespace attctl {

namespace {

struct Value {
  enum class Type { number, boolean, string, array } type;
  double number = 0.0;
  bool boolean = false;
  std::string text;  // string contents, or the raw token for numbers
  std::vector<double> array;
  int line = 0;
  bool used = false;
};

using Section = std::map<std::string, Value, std::less<>>;
using Document = std::map<std::string, Section, std::less<>>;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError(fmt::format("line {}: {}", line, msg));
}

bool parse_double(std::string_view token, double& out) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size() && std::isfinite(out);
}

std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

Value parse_value(std::string_view token, int line) {
  Value v;
  v.line = line;
  if (token.empty()) fail(line, "missing value");
  if (token.front() == '"') {
    if (token.size() < 2 || token.back() != '"') fail(line, "unterminated string");
    v.type = Value::Type::string;
    v.text = std::string(token.substr(1, token.size() - 2));
    if (v.text.find('"') != std::string::npos) fail(line, "embedded quote in string");
    return v;
  }
  if (token == "true" || token == "false") {
    v.type = Value::Type::boolean;
    v.boolean = token == "true";
    return v;
  }
  if (token.front() == '[') {
    if (token.back() != ']') fail(line, "unterminated array");
    v.type = Value::Type::array;
    std::string_view body = trim(token.substr(1, token.size() - 2));
    while (!body.empty()) {
      const auto comma = body.find(',');
      const std::string_view item = trim(body.substr(0, comma));
      double x = 0.0;
      if (!parse_double(item, x)) fail(line, fmt::format("bad array element '{}'", item));
      v.array.push_back(x);
      if (comma == std::string_view::npos) break;
      body = trim(body.substr(comma + 1));
      if (body.empty()) fail(line, "trailing comma in array");
    }
    return v;
  }
  v.type = Value::Type::number;
  v.text = std::string(token);
  if (!parse_double(token, v.number)) fail(line, fmt::format("bad value '{}'", token));
  return v;
}

Document parse_document(std::string_view text) {
  Document doc;
  Section* current = nullptr;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "malformed section header");
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (doc.contains(name)) fail(line_no, fmt::format("duplicate section [{}]", name));
      current = &doc[name];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
    if (current == nullptr) fail(line_no, "key outside of any section");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) fail(line_no, "empty key");
    if (current->contains(key)) fail(line_no, fmt::format("duplicate key '{}'", key));
    current->emplace(key, parse_value(trim(line.substr(eq + 1)), line_no));
  }
  return doc;
}

// Typed accessors that mark keys as consumed.
class Reader {
 public:
  Reader(Document& doc, std::string_view section) {
    const auto it = doc.find(section);
    if (it != doc.end()) section_ = &it->second;
    name_ = section;
  }

  Value* find(std::string_view key) {
    if (section_ == nullptr) return nullptr;
    const auto it = section_->find(key);
    if (it == section_->end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  void number(std::string_view key, double& out) {
    if (Value* v = find(key)) out = expect(*v, Value::Type::number, key).number;
  }

  void boolean(std::string_view key, bool& out) {
    if (Value* v = find(key)) out = expect(*v, Value::Type::boolean, key).boolean;
  }

  bool string(std::string_view key, std::string& out) {
    if (Value* v = find(key)) {
      out = expect(*v, Value::Type::string, key).text;
      return true;
    }
    return false;
  }

  bool array(std::string_view key, std::size_t n, std::vector<double>& out) {
    Value* v = find(key);
    if (v == nullptr) return false;
    expect(*v, Value::Type::array, key);
    if (v->array.size() != n) {
      fail(v->line, fmt::format("[{}] {} needs {} numbers", name_, key, n));
    }
    out = v->array;
    return true;
  }

  bool vec3(std::string_view key, Vec3& out) {
    std::vector<double> a;
    if (!array(key, 3, a)) return false;
    out = Vec3(a[0], a[1], a[2]);
    return true;
  }

  void unsigned_integer(std::string_view key, std::uint64_t& out) {
    Value* v = find(key);
    if (v == nullptr) return;
    expect(*v, Value::Type::number, key);
    const std::string& t = v->text;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
      fail(v->line, fmt::format("[{}] {} must be a nonnegative integer", name_, key));
    }
  }

  int line_of(std::string_view key) {
    if (section_ == nullptr) return 0;
    const auto it = section_->find(key);
    return it == section_->end() ? 0 : it->second.line;
  }

 private:
  const Value& expect(const Value& v, Value::Type type, std::string_view key) const {
    if (v.type != type) {
      static constexpr const char* names[] = {"a number", "a boolean", "a string",
                                              "an array"};
      fail(v.line, fmt::format("[{}] {} must be {}", name_, key,
                               names[static_cast<int>(type)]));
    }
    return v;
  }

  Section* section_ = nullptr;
  std::string name_;
};

// Attitude given either as `quaternion = [q0, q1, q2, q3]` or as
// `axis = [x, y, z]` plus `angle_deg`.
bool read_attitude(Reader& r, std::string_view section, Quaternion& out) {
  std::vector<double> q;
  Vec3 axis;
  const bool has_q = r.array("quaternion", 4, q);
  const bool has_axis = r.vec3("axis", axis);
  double angle_deg = 0.0;
  const bool has_angle = r.find("angle_deg") != nullptr;
  r.number("angle_deg", angle_deg);
  if (has_q && (has_axis || has_angle)) {
    fail(r.line_of("quaternion"),
         fmt::format("[{}] give either quaternion or axis/angle_deg, not both", section));
  }
  if (has_axis != has_angle) {
    fail(r.line_of(has_axis ? "axis" : "angle_deg"),
         fmt::format("[{}] axis and angle_deg go together", section));
  }
  try {
    if (has_q) {
      out = Quaternion(Vec4(q[0], q[1], q[2], q[3]));
      return true;
    }
    if (has_axis) {
      out = to_quaternion(AxisAngle(axis, angle_deg * std::numbers::pi / 180.0));
      return true;
    }
  } catch (const Error& e) {
    fail(r.line_of(has_q ? "quaternion" : "axis"), fmt::format("[{}] {}", section, e.what()));
  }
  return false;
}

template <typename Enum>
Enum parse_enum(Reader& r, std::string_view key, Enum current,
                std::initializer_list<std::pair<std::string_view, Enum>> options) {
  std::string text;
  if (!r.string(key, text)) return current;
  for (const auto& [name, value] : options) {
    if (name == text) return value;
  }
  fail(r.line_of(key), fmt::format("unknown {} '{}'", key, text));
}

void reject_unused(const Document& doc) {
  static constexpr std::string_view known[] = {"scenario", "initial", "desired",
                                               "inertia",  "gains",   "weights",
                                               "pseudo",   "noise",   "integrator",
                                               "convergence"};
  for (const auto& [name, section] : doc) {
    if (std::find(std::begin(known), std::end(known), name) == std::end(known)) {
      throw ConfigError(fmt::format("unknown section [{}]", name));
    }
    for (const auto& [key, value] : section) {
      if (!value.used) fail(value.line, fmt::format("unknown key '{}' in [{}]", key, name));
    }
  }
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  Document doc = parse_document(text);
  Scenario s;

  Reader scenario(doc, "scenario");
  s.representation = parse_enum(scenario, "representation", s.representation,
                                {{"quaternion", Representation::quaternion},
                                 {"so3", Representation::so3}});
  scenario.number("duration", s.duration);
  scenario.unsigned_integer("seed", s.seed);
  s.control_update = parse_enum(scenario, "control_update", s.control_update,
                                {{"continuous", ControlUpdate::continuous},
                                 {"zero_order_hold", ControlUpdate::zero_order_hold}});

  Reader initial(doc, "initial");
  read_attitude(initial, "initial", s.initial_attitude);
  initial.vec3("perturbation", s.initial_perturbation);
  initial.vec3("omega", s.initial_omega);

  Reader desired(doc, "desired");
  std::string kind = "setpoint";
  desired.string("kind", kind);
  Quaternion q_d = s.desired.initial();
  read_attitude(desired, "desired", q_d);
  Vec3 spin_axis = Vec3::UnitZ();
  double spin_rate = 0.0;
  const bool has_spin = desired.vec3("spin_axis", spin_axis) | (desired.find("spin_rate") != nullptr);
  desired.number("spin_rate", spin_rate);

  try {
    if (kind == "setpoint") {
      if (has_spin) fail(desired.line_of("kind"), "spin_axis/spin_rate need kind = \"spin\"");
      s.desired = DesiredTrajectory::setpoint(q_d);
    } else if (kind == "spin") {
      s.desired = DesiredTrajectory::spin(q_d, spin_axis, spin_rate);
    } else {
      fail(desired.line_of("kind"), fmt::format("unknown desired kind '{}'", kind));
    }

    Reader inertia(doc, "inertia");
    Vec3 diag;
    std::vector<double> full;
    const bool has_diag = inertia.vec3("diagonal", diag);
    const bool has_full = inertia.array("matrix", 9, full);
    if (has_diag && has_full) fail(inertia.line_of("matrix"), "give diagonal or matrix, not both");
    if (has_diag) s.inertia = Inertia::diagonal(diag.x(), diag.y(), diag.z());
    if (has_full) s.inertia = Inertia(Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(full.data()));

    Reader gains(doc, "gains");
    gains.number("k_q", s.gains.k_q);
    gains.number("k_omega_q", s.gains.k_omega_q);
    gains.number("k_R", s.gains.k_R);
    gains.number("k_omega_R", s.gains.k_omega_R);

    Reader weights(doc, "weights");
    Vec3 k;
    if (weights.vec3("K", k)) s.K = WeightMatrix(k.x(), k.y(), k.z());

    Reader pseudo(doc, "pseudo");
    pseudo.boolean("enabled", s.pseudo.enabled);
    pseudo.number("epsilon", s.pseudo.epsilon);
    s.pseudo.sign_policy = parse_enum(pseudo, "sign_policy", s.pseudo.sign_policy,
                                      {{"plus", SignPolicy::plus},
                                       {"sign_of_q_e0", SignPolicy::sign_of_q_e0}});

    Reader noise(doc, "noise");
    noise.boolean("enabled", s.noise.enabled);
    noise.number("sigma_attitude", s.noise.sigma_attitude);
    noise.number("sigma_omega", s.noise.sigma_omega);

    Reader integrator(doc, "integrator");
    integrator.number("dt", s.integrator.dt);
    s.integrator.scheme = parse_enum(integrator, "scheme", s.integrator.scheme,
                                     {{"rk4", IntegrationScheme::rk4},
                                      {"euler", IntegrationScheme::euler}});
    std::uint64_t every = s.integrator.renormalize_every;
    integrator.unsigned_integer("renormalize_every", every);
    s.integrator.renormalize_every = static_cast<std::size_t>(every);

    Reader convergence(doc, "convergence");
    convergence.number("psi_tol", s.convergence.psi_tol);
    convergence.number("quat_tol", s.convergence.quat_tol);
    convergence.number("omega_tol", s.convergence.omega_tol);

    reject_unused(doc);
    s.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open scenario file '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_scenario(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string format_scenario(const Scenario& s) {
  auto v3 = [](const Vec3& v) { return fmt::format("[{:.17g}, {:.17g}, {:.17g}]", v.x(), v.y(), v.z()); };
  auto v4 = [](const Vec4& v) {
    return fmt::format("[{:.17g}, {:.17g}, {:.17g}, {:.17g}]", v(0), v(1), v(2), v(3));
  };
  std::string out;
  out += "[scenario]\n";
  out += fmt::format("representation = \"{}\"\n",
                     s.representation == Representation::quaternion ? "quaternion" : "so3");
  out += fmt::format("duration = {:.17g}\nseed = {}\n", s.duration, s.seed);
  out += fmt::format("control_update = \"{}\"\n", s.control_update == ControlUpdate::continuous
                                                      ? "continuous"
                                                      : "zero_order_hold");
  out += "\n[initial]\n";
  out += fmt::format("quaternion = {}\nperturbation = {}\nomega = {}\n",
                     v4(s.initial_attitude.coeffs()), v3(s.initial_perturbation),
                     v3(s.initial_omega));
  out += "\n[desired]\n";
  if (s.desired.kind() == DesiredTrajectory::Kind::setpoint) {
    out += fmt::format("kind = \"setpoint\"\nquaternion = {}\n", v4(s.desired.initial().coeffs()));
  } else {
    out += fmt::format("kind = \"spin\"\nquaternion = {}\nspin_axis = {}\nspin_rate = {:.17g}\n",
                       v4(s.desired.initial().coeffs()), v3(s.desired.axis()), s.desired.rate());
  }
  const Mat3& j = s.inertia.matrix();
  out += "\n[inertia]\nmatrix = [";
  for (int i = 0; i < 9; ++i) out += fmt::format("{}{:.17g}", i ? ", " : "", j(i / 3, i % 3));
  out += "]\n";
  out += fmt::format("\n[gains]\nk_q = {:.17g}\nk_omega_q = {:.17g}\nk_R = {:.17g}\nk_omega_R = {:.17g}\n",
                     s.gains.k_q, s.gains.k_omega_q, s.gains.k_R, s.gains.k_omega_R);
  out += fmt::format("\n[weights]\nK = {}\n", v3(s.K.diagonal()));
  out += fmt::format("\n[pseudo]\nenabled = {}\nepsilon = {:.17g}\nsign_policy = \"{}\"\n",
                     s.pseudo.enabled, s.pseudo.epsilon,
                     s.pseudo.sign_policy == SignPolicy::plus ? "plus" : "sign_of_q_e0");
  out += fmt::format("\n[noise]\nenabled = {}\nsigma_attitude = {:.17g}\nsigma_omega = {:.17g}\n",
                     s.noise.enabled, s.noise.sigma_attitude, s.noise.sigma_omega);
  out += fmt::format("\n[integrator]\ndt = {:.17g}\nscheme = \"{}\"\nrenormalize_every = {}\n",
                     s.integrator.dt,
                     s.integrator.scheme == IntegrationScheme::rk4 ? "rk4" : "euler",
                     s.integrator.renormalize_every);
  out += fmt::format("\n[convergence]\npsi_tol = {:.17g}\nquat_tol = {:.17g}\nomega_tol = {:.17g}\n",
                     s.convergence.psi_tol, s.convergence.quat_tol, s.convergence.omega_tol);
  return out;
}

}  // namespace attctl

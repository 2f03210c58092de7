#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "attctl/errors.hpp"
#include "attctl/scenario_file.hpp"
#include "attctl/sim_harness.hpp"

namespace attctl::cli {

namespace {

// Thrown for semantic usage errors found after CLI11 parsing succeeded.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string out;
  std::optional<double> dt;
  std::optional<double> duration;
  std::optional<std::string> pseudo;
  std::optional<std::string> noise;
  std::optional<std::string> representation;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--out", f.out, "Output CSV path (default: standard output)");
  cmd->add_option("--dt", f.dt, "Integration step in seconds")->check(CLI::PositiveNumber);
  cmd->add_option("--duration", f.duration, "Simulated time in seconds")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--pseudo", f.pseudo, "Pseudo-target substitution")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--noise", f.noise, "Measurement noise")->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--representation", f.representation, "Attitude representation of the law")
      ->check(CLI::IsMember({"quat", "so3"}));
  cmd->add_option("--seed", f.seed, "Noise seed (first seed for montecarlo)");
}

Representation parse_representation(const std::string& s) {
  return s == "quat" ? Representation::quaternion : Representation::so3;
}

void apply_common(const CommonFlags& f, Scenario& s) {
  if (f.dt) s.integrator.dt = *f.dt;
  if (f.duration) s.duration = *f.duration;
  if (f.pseudo) s.pseudo.enabled = *f.pseudo == "on";
  if (f.noise) s.noise.enabled = *f.noise == "on";
  if (f.representation) s.representation = parse_representation(*f.representation);
  if (f.seed) s.seed = *f.seed;
  try {
    s.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

// Comparison table for a figure preset: one column set per run.
std::string figure_csv(const std::string& figure, const TrajectoryLog& with,
                       const TrajectoryLog& without) {
  std::ostringstream os;
  if (figure == "fig2") {
    os << "t,qe0,qe1,qe2,qe3,qe0_wpe,qe1_wpe,qe2_wpe,qe3_wpe\n";
  } else if (figure == "fig3") {
    os << "t,psi,psi_wpe\n";
  } else {
    os << "t,eR_norm,eR_norm_wpe\n";
  }
  for (std::size_t i = 0; i < with.records.size(); ++i) {
    const LogRecord& a = with.records[i];
    const LogRecord& b = without.records[i];
    fmt::print(os, "{:.17g}", a.t);
    if (figure == "fig2") {
      const Vec4 qa = a.q_e.coeffs();
      const Vec4 qb = b.q_e.coeffs();
      for (int k = 0; k < 4; ++k) fmt::print(os, ",{:.17g}", qa(k));
      for (int k = 0; k < 4; ++k) fmt::print(os, ",{:.17g}", qb(k));
    } else if (figure == "fig3") {
      fmt::print(os, ",{:.17g},{:.17g}", a.psi, b.psi);
    } else {
      fmt::print(os, ",{:.17g},{:.17g}", a.e_R_norm, b.e_R_norm);
    }
    os << '\n';
  }
  return os.str();
}

void print_summary(std::ostream& os, const std::string& label, const MonteCarloSummary& m) {
  fmt::print(os, "{}: {}/{} converged, t_converge median {:.6g} s, q25 {:.6g} s, q75 {:.6g} s, q90 {:.6g} s\n",
             label, m.n_converged, m.runs.size(), m.median_t, m.q25_t, m.q75_t, m.q90_t);
}

void emit(const std::string& csv, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << csv;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open output file '" + path + "'");
  file << csv;
  if (!file) throw std::runtime_error("failed writing output file '" + path + "'");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rigid-body attitude control simulations with pseudo-target error shaping",
               "attctl"};
  app.require_subcommand(1);

  CommonFlags sim_flags;
  std::string sim_file;
  auto* simulate = app.add_subcommand("simulate", "Run one scenario file and write its trajectory log");
  simulate->add_option("scenario", sim_file, "Scenario file")->required();
  add_common(simulate, sim_flags);

  std::string sweep_out;
  std::vector<double> sweep_axis{0.0, 0.0, 1.0};
  std::vector<double> sweep_k{1.0, 2.0, 3.0};
  std::size_t sweep_points = 181;
  auto* sweep = app.add_subcommand("sweep", "Tabulate |q_e0 q_ev| and |e_R| over a 0-180 deg error sweep");
  sweep->add_option("--axis", sweep_axis, "Rotation axis x,y,z (normalized)")
      ->delimiter(',')->expected(3)->capture_default_str();
  sweep->add_option("--points", sweep_points, "Number of samples (>= 2)")
      ->check(CLI::Range(std::size_t{2}, std::size_t{10'000'000}))->capture_default_str();
  sweep->add_option("--K", sweep_k, "Weight matrix diagonal k1,k2,k3")
      ->delimiter(',')->expected(3)->capture_default_str();
  sweep->add_option("--out", sweep_out, "Output CSV path (default: standard output)");

  CommonFlags mc_flags;
  std::string mc_file;
  std::size_t mc_seeds = 50;
  bool mc_compare = false;
  unsigned mc_threads = 0;
  auto* montecarlo = app.add_subcommand("montecarlo", "Run a scenario over consecutive seeds");
  montecarlo->add_option("scenario", mc_file, "Scenario file")->required();
  montecarlo->add_option("--seeds", mc_seeds, "Number of seeds")
      ->check(CLI::PositiveNumber)->capture_default_str();
  montecarlo->add_flag("--compare-pseudo", mc_compare, "Run every seed with pseudo-targets on and off");
  montecarlo->add_option("--threads", mc_threads, "Worker threads (0: hardware concurrency)");
  add_common(montecarlo, mc_flags);

  CommonFlags preset_flags;
  std::string preset_name;
  auto* preset = app.add_subcommand(
      "preset",
      "Built-in 180 deg maneuver about e3: fig2 (quaternion law, q_e components), "
      "fig3 (SO(3) law, Psi), fig4 (SO(3) law, |e_R|). Noise on by default. Without "
      "--pseudo, writes pseudo-on and pseudo-off columns side by side; with --pseudo, "
      "writes the full trajectory log of that single run");
  preset->add_option("name", preset_name, "fig2 | fig3 | fig4")
      ->required()->check(CLI::IsMember({"fig2", "fig3", "fig4"}));
  add_common(preset, preset_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "attctl: " << e.what() << "\n";
    return kUsageError;
  }

  // Diagnostics go wherever CSV is not going.
  auto diagnostics = [&](const std::string& path) -> std::ostream& {
    return path.empty() ? err : out;
  };

  try {
    if (*simulate) {
      Scenario s = load_scenario(sim_file);
      apply_common(sim_flags, s);
      const RunResult r = run_scenario(s);
      std::ostringstream csv;
      write_log_csv(csv, r.log);
      emit(csv.str(), sim_flags.out, out);
      fmt::print(diagnostics(sim_flags.out), "converged: {}, t_converge: {:.6g} s, final V: {:.6g}\n",
                 r.report.converged ? "yes" : "no", r.report.t_converge, r.report.final_V);
      return kSuccess;
    }

    if (*sweep) {
      const Vec3 axis(sweep_axis[0], sweep_axis[1], sweep_axis[2]);
      if (!(axis.norm() > 0.0)) throw UsageError("--axis must be nonzero");
      std::vector<SweepRow> rows;
      try {
        rows = sweep_error_norms(WeightMatrix(sweep_k[0], sweep_k[1], sweep_k[2]),
                                 axis.normalized(), sweep_points);
      } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
      }
      std::ostringstream csv;
      write_sweep_csv(csv, rows);
      emit(csv.str(), sweep_out, out);
      return kSuccess;
    }

    if (*montecarlo) {
      if (mc_compare && mc_flags.pseudo) {
        throw UsageError("--compare-pseudo and --pseudo are mutually exclusive");
      }
      Scenario s = load_scenario(mc_file);
      apply_common(mc_flags, s);
      std::vector<std::pair<std::string, MonteCarloSummary>> results;
      if (mc_compare) {
        Scenario on = s;
        on.pseudo.enabled = true;
        Scenario off = s;
        off.pseudo.enabled = false;
        results.emplace_back("pseudo_on", run_monte_carlo(on, mc_seeds, mc_threads));
        results.emplace_back("pseudo_off", run_monte_carlo(off, mc_seeds, mc_threads));
      } else {
        results.emplace_back(s.pseudo.enabled ? "pseudo_on" : "pseudo_off",
                             run_monte_carlo(s, mc_seeds, mc_threads));
      }
      std::ostringstream csv;
      write_monte_carlo_csv(csv, results);
      emit(csv.str(), mc_flags.out, out);
      for (const auto& [label, summary] : results) {
        print_summary(diagnostics(mc_flags.out), label, summary);
      }
      return kSuccess;
    }

    // preset
    const Representation rep =
        preset_name == "fig2" ? Representation::quaternion : Representation::so3;
    if (preset_flags.representation && parse_representation(*preset_flags.representation) != rep) {
      throw UsageError("preset " + preset_name + " fixes --representation " +
                       (rep == Representation::quaternion ? "quat" : "so3"));
    }
    Scenario s = maneuver_180_e3(rep);
    s.noise.enabled = true;
    apply_common(preset_flags, s);
    std::ostringstream csv;
    if (preset_flags.pseudo) {
      write_log_csv(csv, run_scenario(s).log);
    } else {
      Scenario off = s;
      off.pseudo.enabled = false;
      csv << figure_csv(preset_name, run_scenario(s).log, run_scenario(off).log);
    }
    emit(csv.str(), preset_flags.out, out);
    return kSuccess;
  } catch (const UsageError& e) {
    err << "attctl: " << e.what() << "\n";
    return kUsageError;
  } catch (const ConfigError& e) {
    err << "attctl: " << e.what() << "\n";
    return kUsageError;
  } catch (const NonFiniteState& e) {
    err << "attctl: simulation failed at step " << e.step() << ": " << e.what() << "\n";
    return kRuntimeFailure;
  } catch (const std::exception& e) {
    err << "attctl: " << e.what() << "\n";
    return kRuntimeFailure;
  }
}

}  // namespace attctl::cli

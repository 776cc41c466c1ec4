// rabisim command-line tool. Exit codes: 0 success, 1 usage, 2 configuration
// error, 3 solver failure (including failed sweep points), 4 validation failure.

#include "rabisim/config.hpp"
#include "rabisim/figures.hpp"
#include "rabisim/io.hpp"
#include "rabisim/solvers.hpp"
#include "rabisim/spectral.hpp"
#include "rabisim/sweep.hpp"
#include "rabisim/trajectory.hpp"
#include "rabisim/validation.hpp"
#include "rabisim/version.hpp"
#include "rabisim/weak_excitation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace rabisim;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kConfigError = 2, kSolverFailure = 3, kValidationFailure = 4 };

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;  // section.key=value
  std::optional<long long> seed;
  std::optional<int> n_max;
  std::optional<std::string> out_dir;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config_path, "INI configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--set", o.overrides, "Override a config key: section.key=value (repeatable)");
  cmd->add_option("--seed", o.seed, "Random seed (numerics.seed)");
  cmd->add_option("--n-max", o.n_max, "Fock cutoff (numerics.n_max)")->check(CLI::Range(2, 63));
  cmd->add_option("--out-dir", o.out_dir, "Output directory (output.out_dir)");
  cmd->add_option("--jobs", o.jobs, "Worker threads, 0 = hardware concurrency (numerics.jobs)");
}

// File values first, then --set, then the dedicated flags.
Config load_config(const CommonOptions& o) {
  Config c = o.config_path.empty() ? Config{} : Config::load(o.config_path);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + kv + "'");
    c.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) c.set("numerics.seed", std::to_string(*o.seed));
  if (o.n_max) c.set("numerics.n_max", std::to_string(*o.n_max));
  if (o.out_dir) c.set("output.out_dir", *o.out_dir);
  if (o.jobs) c.set("numerics.jobs", std::to_string(*o.jobs));
  return c;
}

int n_max_of(const Config& c) { return static_cast<int>(c.get_int("numerics.n_max", kDefaultNMax)); }
int jobs_of(const Config& c) { return static_cast<int>(c.get_int("numerics.jobs", 1)); }
fs::path out_dir_of(const Config& c) { return c.get_string("output.out_dir", "out"); }

std::vector<std::pair<std::string, std::string>> config_settings(const Config& c) {
  std::vector<std::pair<std::string, std::string>> s(c.values().begin(), c.values().end());
  s.emplace_back("rabisim_version", kVersion);
  return s;
}

void record(Manifest& m, const fs::path& dir, const std::string& file, const CsvTable& table,
            const std::string& description, const ModelParams& p,
            std::vector<std::pair<std::string, std::string>> metadata = {}) {
  write_csv_file(dir / file, table);
  m.files.push_back({file, description, parameter_list(p), std::move(metadata)});
  std::cout << (dir / file).string() << "\n";
}

void finish(const Manifest& m, const fs::path& dir) {
  write_manifest(dir / "manifest.json", m);
  std::cout << (dir / "manifest.json").string() << "\n";
}

int cmd_sweep(const Config& c) {
  const SweepSpec spec = sweep_from_config(c);
  const auto result = run_sweep(spec, jobs_of(c));
  const fs::path dir = out_dir_of(c);
  Manifest m{"sweep", "sweep_" + to_string(spec.axis), config_settings(c), {}};
  record(m, dir, "sweep.csv", sweep_table(result), "one-parameter sweep", spec.base, sweep_summary(result));
  finish(m, dir);
  const auto failed = failed_points(result);
  if (failed) std::cerr << "sweep: " << failed << " point(s) failed; see the error columns\n";
  return failed ? kSolverFailure : kOk;
}

int cmd_figure(const Config& c, const std::string& name) {
  FigureOptions opts;
  opts.out_dir = out_dir_of(c);
  opts.n_max = n_max_of(c);
  opts.jobs = jobs_of(c);
  opts.seed = static_cast<std::uint64_t>(c.get_int("numerics.seed", 0));
  const auto out = run_figure(name, opts);
  for (const auto& f : out.files) std::cout << f.string() << "\n";
  std::cout << out.manifest.string() << "\n";
  if (out.failures) std::cerr << "figure " << name << ": " << out.failures << " point(s) failed\n";
  return out.failures ? kSolverFailure : kOk;
}

std::string grid_text(const std::vector<double>& g) {
  return format_number(g.front()) + ":" + format_number(g.back()) + ":" + std::to_string(g.size());
}

int cmd_spectrum(const Config& c) {
  const ModelParams p = model_from_config(c);
  const double w = frequency_scale(c);
  std::vector<double> nu = c.get_grid("spectrum.nu", parse_grid("-15:15:150001"));
  for (double& x : nu) x *= w;
  const int n_max = n_max_of(c);
  const auto space = make_space(n_max);
  const auto spec = emission_spectrum(p, nu, spectrum_options_from_config(c), space);
  const auto dressed = dressed_states(p, space);
  const double smax = *std::max_element(spec.s.begin(), spec.s.end());
  const auto lines = assign_lines(dressed, spec, p, 0.0, kPeakTableThreshold);

  const fs::path dir = out_dir_of(c);
  Manifest m{"spectrum", "spectrum", config_settings(c), {}};
  record(m, dir, "spectrum.csv", spectrum_table(spec, p, n_max), "cavity emission spectrum", p,
         {{"nu_grid", grid_text(nu)},
          {"tau_step", format_number(spec.tau_step)},
          {"tau_points", std::to_string(spec.tau_points)},
          {"window_decay", format_number(spec.window_decay)},
          {"photon_number", format_number(spec.photon_number)},
          {"sum_rule_integral", format_number(spectrum_integral(spec))}});
  record(m, dir, "peaks.csv", peak_table(spec), "detected peaks", p);
  record(m, dir, "lines.csv", line_table(lines, smax), "dressed-state line assignment", p);
  record(m, dir, "dressed.csv", dressed_table(dressed), "named dressed states", p);
  finish(m, dir);
  for (const auto& warning : spec.warnings) std::cerr << "warning: " << warning << "\n";
  return kOk;
}

int cmd_g2tau(const Config& c) {
  const ModelParams p = model_from_config(c);
  const double w = frequency_scale(c);
  std::vector<double> tau = c.get_grid("g2tau.tau", {});
  if (tau.empty()) {
    for (int k = 0; k <= 1000; ++k) tau.push_back(10.0 / p.kappa * k / 1000.0);
  } else {
    for (double& t : tau) t /= w;
  }
  const int n_max = n_max_of(c);
  const auto qrt = g2_tau(p, tau, make_space(n_max));
  const auto approx = g2_tau_approx(p, tau);
  const fs::path dir = out_dir_of(c);
  Manifest m{"g2tau", "g2tau", config_settings(c), {}};
  record(m, dir, "g2tau.csv", g2tau_table(p, qrt, &approx, n_max), "intensity correlation g2(tau)", p,
         {{"tau_grid", grid_text(tau)}});
  finish(m, dir);
  for (const auto& warning : approx.warnings) std::cerr << "warning: " << warning << "\n";
  return kOk;
}

CsvTable estimates_table(const TrajectoryEstimates& e, const ModelParams& p, int n_max,
                         const std::optional<Observables>& master, std::optional<double> master_p1) {
  CsvTable t;
  t.header = {"quantity", "value", "std_error", "master_equation"};
  for (const auto& [k, v] : parameter_list(p)) t.metadata.emplace_back(k, format_number(v));
  t.metadata.emplace_back("n_max", std::to_string(n_max));
  t.metadata.emplace_back("jumps", std::to_string(e.jumps));
  t.metadata.emplace_back("elapsed", format_number(e.elapsed));
  t.metadata.emplace_back("batches", std::to_string(e.batches));
  for (const auto& w : e.warnings) t.metadata.emplace_back("warning", w);
  const auto row = [&t](const std::string& name, const Estimate& est, std::optional<double> ref) {
    t.add_row({name, est.value, est.std_error, ref ? CsvCell{*ref} : CsvCell{}});
  };
  std::optional<double> n, sz, g2, p1, p2;
  if (master) n = master->photon_number, sz = master->inversion, g2 = master->g2_zero;
  if (master_p1) p1 = *master_p1, p2 = 1.0 - *master_p1;
  row("flux", e.flux, n ? std::optional<double>(2.0 * p.kappa * *n) : std::nullopt);
  row("photon_number", e.photon_number, n);
  row("photon_number_direct", e.photon_number_direct, n);
  row("inversion", e.inversion, sz);
  row("p1", e.manifold_one_fraction, p1);
  row("p2", e.manifold_two_fraction, p2);
  row("g2_zero", e.g2_zero, g2);
  for (const auto& b : e.g2_bins) row("g2_bin_" + format_number(b.bin), b.g2, g2);
  t.add_row({std::string("alternation_rate"), e.alternation_rate, CsvCell{}, CsvCell{}});
  return t;
}

int cmd_trajectory(const Config& c) {
  const ModelParams p = model_from_config(c);
  const TrajectoryConfig tc = trajectory_from_config(c, p);
  const int n_max = static_cast<int>(c.get_int("trajectory.n_max", 6));
  const auto space = make_space(n_max);
  const auto records = run_ensemble(p, space, tc, basis_state(space, 0, Qubit::g), jobs_of(c));
  const auto est = estimate_observables(records, p);

  std::optional<Observables> master;
  std::optional<double> p1;
  try {
    const auto ss = steady_state(liouvillian(p, make_space(n_max_of(c))));
    master = observables(ss.rho);
    p1 = manifold_one_population(ss.rho);
  } catch (const SolverError& e) {
    std::cerr << "warning: master-equation reference unavailable: " << e.what() << "\n";
  }

  const fs::path dir = out_dir_of(c);
  fs::create_directories(dir);
  std::ostringstream jumps;
  write_jump_times(jumps, records);
  write_text_file(dir / "jump_times.csv", jumps.str());
  std::cout << (dir / "jump_times.csv").string() << "\n";

  Manifest m{"trajectory", "trajectory", config_settings(c), {}};
  const std::vector<std::pair<std::string, std::string>> meta{{"seed", std::to_string(tc.seed)},
                                                               {"t_burn", format_number(tc.t_burn)},
                                                               {"t_total", format_number(tc.t_total)},
                                                               {"dt_max", format_number(tc.dt_max)},
                                                               {"n_trajectories", std::to_string(tc.n_trajectories)},
                                                               {"n_max", std::to_string(n_max)}};
  m.files.push_back({"jump_times.csv", "jump times per trajectory", parameter_list(p), meta});
  record(m, dir, "estimates.csv", estimates_table(est, p, n_max, master, p1), "trajectory estimators", p, meta);
  finish(m, dir);
  for (const auto& w : est.warnings) std::cerr << "warning: " << w << "\n";
  return kOk;
}

int cmd_validate(const Config& c, bool full, const std::vector<int>& only, std::optional<double> g) {
  ValidationConfig vc;
  vc.n_max = n_max_of(c);
  vc.seed = static_cast<std::uint64_t>(c.get_int("numerics.seed", 1));
  vc.reduced = !full;
  vc.jobs = jobs_of(c);
  vc.only = only;
  if (g) {
    vc.g_override = g;
  } else if (c.has("model.g")) {
    vc.g_override = c.get_double("model.g", 0.1);
  }
  const auto report = run_validation(vc);
  for (const auto& r : report.criteria) std::cout << summary_line(r) << "\n";
  const fs::path dir = out_dir_of(c);
  write_text_file(dir / "validation.json", to_json(report) + "\n");
  std::cout << (dir / "validation.json").string() << "\n";
  return report.all_passed() ? kOk : kValidationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dissipative generalized Rabi model toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOptions common;
  auto* sweep = app.add_subcommand("sweep", "One-parameter sweep over the model");
  auto* figure = app.add_subcommand("figure", "Write the tables of a named preset");
  auto* spectrum = app.add_subcommand("spectrum", "Cavity emission spectrum with peak and line tables");
  auto* g2tau = app.add_subcommand("g2tau", "Intensity correlation g2(tau), numerical and analytic");
  auto* trajectory = app.add_subcommand("trajectory", "Quantum-jump trajectories and estimators");
  auto* validate = app.add_subcommand("validate", "Run the acceptance checks and write a JSON report");
  for (auto* cmd : {sweep, figure, spectrum, g2tau, trajectory, validate}) add_common(cmd, common);

  std::string preset;
  figure->add_option("preset", preset, "Preset name")->required();

  bool full = false;
  std::vector<int> criteria;
  std::optional<double> g_override;
  validate->add_flag("--full", full, "Full grids instead of the reduced ones");
  validate->add_option("--criterion", criteria, "Criterion id (repeatable)")->check(CLI::Range(1, kCriterionCount));
  validate->add_option("--g", g_override, "Weak coupling g/omega used by the checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    const Config c = load_config(common);
    if (*sweep) return cmd_sweep(c);
    if (*figure) return cmd_figure(c, preset);
    if (*spectrum) return cmd_spectrum(c);
    if (*g2tau) return cmd_g2tau(c);
    if (*trajectory) return cmd_trajectory(c);
    if (*validate) return cmd_validate(c, full, criteria, g_override);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const UnknownPreset& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  }
  return kUsage;
}

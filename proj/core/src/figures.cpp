#include "rabisim/figures.hpp"

#include "rabisim/weak_excitation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

namespace rabisim {

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
  v.back() = b;
  return v;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : "; ") + s;
  return out;
}

std::string fmt(double x) { return format_number(x); }

// Shortest form for file names and labels, e.g. 0.2 rather than 0.20000000000000001.
std::string label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

struct Context {
  const FigureOptions& options;
  std::filesystem::path dir;
  Manifest manifest;
  FigureOutput output;

  void write(const std::string& file, const CsvTable& table, const std::string& description,
             const std::vector<std::pair<std::string, double>>& parameters,
             std::vector<std::pair<std::string, std::string>> metadata = {}) {
    const auto path = dir / file;
    write_csv_file(path, table);
    output.files.push_back(path);
    manifest.files.push_back({file, description, parameters, std::move(metadata)});
  }
};

void run_u_sweep(Context& ctx, const std::string& file, const std::string& description, const ModelParams& base,
                 std::vector<Quantity> outputs, Axis axis, std::vector<double> grid) {
  SweepSpec spec;
  spec.base = base;
  spec.axis = axis;
  spec.grid = std::move(grid);
  spec.outputs = std::move(outputs);
  spec.engines = {Engine::master, Engine::analytic};
  spec.n_max = ctx.options.n_max;
  const auto result = run_sweep(spec, ctx.options.jobs);
  ctx.output.failures += failed_points(result);
  ctx.write(file, sweep_table(result), description, parameter_list(base), sweep_summary(result));
}

// U/omega from -24 to 6 in steps of 0.05.
std::vector<double> u_grid(double omega) {
  auto g = linspace(-24.0, 6.0, 601);
  for (double& x : g) x *= omega;
  return g;
}

void g2tau_pair(Context& ctx, const std::string& file, const std::string& description, const ModelParams& p,
                double tau_max) {
  const auto tau = linspace(0.0, tau_max, 1001);
  const auto space = make_space(ctx.options.n_max);
  const auto qrt = g2_tau(p, tau, space);
  const auto approx = g2_tau_approx(p, tau);
  ctx.write(file, g2tau_table(p, qrt, &approx, ctx.options.n_max), description, parameter_list(p),
            {{"tau_grid", "0:" + fmt(tau_max) + ":1001"}});
}

void spectrum_set(Context& ctx, const std::string& stem, const std::string& description, const ModelParams& p,
                  double nu_max, double nu_step) {
  const auto n = static_cast<std::size_t>(std::llround(2.0 * nu_max / nu_step)) + 1;
  const auto nu = linspace(-nu_max, nu_max, n);
  const auto space = make_space(ctx.options.n_max);
  const auto spec = emission_spectrum(p, nu, {}, space);
  const auto dressed = dressed_states(p, space);
  const double smax = spec.s.empty() ? 0.0 : *std::max_element(spec.s.begin(), spec.s.end());
  const auto lines = assign_lines(dressed, spec, p, 0.0, kPeakTableThreshold);
  const std::vector<std::pair<std::string, std::string>> meta{
      {"nu_grid", fmt(-nu_max) + ":" + fmt(nu_max) + ":" + std::to_string(n)},
      {"tau_step", fmt(spec.tau_step)},
      {"tau_points", std::to_string(spec.tau_points)},
      {"window_decay", fmt(spec.window_decay)},
      {"photon_number", fmt(spec.photon_number)},
      {"sum_rule_integral", fmt(spectrum_integral(spec))}};
  ctx.write(stem + ".csv", spectrum_table(spec, p, ctx.options.n_max), description, parameter_list(p), meta);
  ctx.write(stem + "_peaks.csv", peak_table(spec), description + " (detected peaks)", parameter_list(p));
  ctx.write(stem + "_lines.csv", line_table(lines, smax), description + " (dressed-state line assignment)",
            parameter_list(p));
  ctx.write(stem + "_dressed.csv", dressed_table(dressed), description + " (named dressed states)", parameter_list(p));
}

using Preset = std::function<void(Context&)>;

const std::map<std::string, Preset>& presets() {
  static const std::map<std::string, Preset> table{
      {"fig1",
       [](Context& ctx) {
         for (double w0 : {2.0, 5.0, 10.0}) {
           const ModelParams base{w0, 1.0, 0.1, -2.0 * w0, 0.2};
           run_u_sweep(ctx, "fig1_omega0_" + std::to_string(static_cast<int>(w0)) + ".csv",
                       "photon number, inversion and g2(0) vs U, omega0/omega = " + label(w0), base,
                       {Quantity::photon_number, Quantity::inversion, Quantity::g2_zero}, Axis::U, u_grid(1.0));
         }
       }},
      {"fig2_p1p2",
       [](Context& ctx) {
         run_u_sweep(ctx, "fig2_p1p2.csv", "manifold populations vs U", {10.0, 1.0, 0.1, -20.0, 0.2},
                     {Quantity::p1, Quantity::p2}, Axis::U, u_grid(1.0));
       }},
      {"fig4_g2tau",
       [](Context& ctx) {
         // {omega0, g}/kappa = {50, 0.5}, U = -2 omega0, omega/kappa in {5, 2.5}; omega = 1.
         for (double ratio : {5.0, 2.5}) {
           const double kappa = 1.0 / ratio;
           const ModelParams p{50.0 * kappa, 1.0, 0.5 * kappa, -100.0 * kappa, kappa};
           g2tau_pair(ctx, "fig4_omega_over_kappa_" + label(ratio) + ".csv", "g2(tau), omega/kappa = " + label(ratio), p,
                      10.0 / kappa);
         }
       }},
      {"fig5_g2tau_offsets",
       [](Context& ctx) {
         for (double offset : {2.0, 4.0, 10.0}) {
           const ModelParams p{10.0, 1.0, 0.1, -20.0 + offset, 0.2};
           g2tau_pair(ctx, "fig5_offset_" + label(offset) + ".csv",
                      "g2(tau), U = -2 omega0 + " + label(offset) + " omega", p, 10.0 / p.kappa);
         }
       }},
      {"fig6_spectrum",
       [](Context& ctx) {
         spectrum_set(ctx, "fig6_spectrum", "emission spectrum, U = -2 omega0", {10.0, 1.0, 0.1, -20.0, 0.1}, 15.0,
                      2e-4);
       }},
      {"fig7_spectrum",
       [](Context& ctx) {
         spectrum_set(ctx, "fig7_spectrum", "emission spectrum, U = -2 omega0 - 2 omega", {10.0, 1.0, 0.1, -22.0, 0.1},
                      15.0, 2e-4);
         spectrum_set(ctx, "fig7_spectrum_kappa_0.05", "emission spectrum, U = -2 omega0 - 2 omega, kappa = 0.05",
                      {10.0, 1.0, 0.1, -22.0, 0.05}, 15.0, 2e-4);
       }},
      {"fig8_large_g_sweep",
       [](Context& ctx) {
         for (double g : {0.2, 0.5, 1.0}) {
           run_u_sweep(ctx, "fig8_g_" + label(g) + ".csv", "photon number, inversion and g2(0) vs U, g/omega = " + label(g),
                       {10.0, 1.0, g, -20.0, 0.2}, {Quantity::photon_number, Quantity::inversion, Quantity::g2_zero},
                       Axis::U, u_grid(1.0));
         }
       }},
      {"fig9_saturation",
       [](Context& ctx) {
         run_u_sweep(ctx, "fig9_saturation.csv", "photon number, inversion and g2(0) vs g at U = -2 omega0",
                     {10.0, 1.0, 0.05, -20.0, 0.2}, {Quantity::photon_number, Quantity::inversion, Quantity::g2_zero},
                     Axis::g, linspace(0.05, 2.0, 196));
       }},
      {"fig_spec_large_g",
       [](Context& ctx) {
         spectrum_set(ctx, "spec_large_g_U_-20", "emission spectrum, g = omega, U = -2 omega0",
                      {10.0, 1.0, 1.0, -20.0, 0.1}, 16.0, 5e-4);
         spectrum_set(ctx, "spec_large_g_U_-22", "emission spectrum, g = omega, U = -2 omega0 - 2 omega",
                      {10.0, 1.0, 1.0, -22.0, 0.1}, 16.0, 5e-4);
       }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& figure_presets() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : presets()) v.push_back(k);
    return v;
  }();
  return names;
}

FigureOutput run_figure(const std::string& name, const FigureOptions& options) {
  const auto it = presets().find(name);
  if (it == presets().end()) {
    std::string known;
    for (const auto& n : figure_presets()) known += (known.empty() ? "" : ", ") + n;
    throw UnknownPreset("unknown figure preset '" + name + "' (available: " + known + ")");
  }
  Context ctx{options, options.out_dir / name, {"figure", name, {}, {}}, {}};
  ctx.manifest.settings = {{"n_max", std::to_string(options.n_max)},
                           {"seed", std::to_string(options.seed)},
                           {"units", "rates in units of omega, times in units of 1/omega"}};
  it->second(ctx);
  ctx.output.manifest = ctx.dir / "manifest.json";
  write_manifest(ctx.output.manifest, ctx.manifest);
  return ctx.output;
}

std::vector<std::pair<std::string, double>> parameter_list(const ModelParams& p) {
  return {{"omega0", p.omega0}, {"omega", p.omega}, {"g", p.g}, {"U", p.U}, {"kappa", p.kappa}};
}

namespace {

std::vector<std::pair<std::string, std::string>> param_metadata(const ModelParams& p, int n_max) {
  std::vector<std::pair<std::string, std::string>> m;
  for (const auto& [k, v] : parameter_list(p)) m.emplace_back(k, fmt(v));
  m.emplace_back("n_max", std::to_string(n_max));
  return m;
}

}  // namespace

CsvTable spectrum_table(const Spectrum& spectrum, const ModelParams& params, int n_max) {
  CsvTable t;
  t.header = {"nu", "S"};
  t.metadata = param_metadata(params, n_max);
  t.metadata.emplace_back("photon_number", fmt(spectrum.photon_number));
  t.metadata.emplace_back("tau_step", fmt(spectrum.tau_step));
  t.metadata.emplace_back("tau_window", fmt(spectrum.tau_window));
  t.metadata.emplace_back("window_decay", fmt(spectrum.window_decay));
  for (const auto& w : spectrum.warnings) t.metadata.emplace_back("warning", w);
  for (std::size_t k = 0; k < spectrum.nu.size(); ++k) t.add_row({spectrum.nu[k], spectrum.s[k]});
  return t;
}

CsvTable peak_table(const Spectrum& spectrum, double detection_threshold) {
  CsvTable t;
  t.header = {"nu", "height", "relative_height", "fwhm", "above_1_percent"};
  t.metadata = {{"detection_threshold", fmt(detection_threshold)}};
  const auto peaks = find_peaks(spectrum, detection_threshold);
  const double smax = spectrum.s.empty() ? 0.0 : *std::max_element(spectrum.s.begin(), spectrum.s.end());
  for (const auto& p : peaks) {
    const double rel = p.height / smax;
    t.add_row({p.nu, p.height, rel, p.fwhm ? CsvCell(*p.fwhm) : CsvCell(), std::int64_t{rel >= 0.01 ? 1 : 0}});
  }
  return t;
}

CsvTable line_table(const std::vector<LineAssignment>& lines, double max_height) {
  CsvTable t;
  t.header = {"peak_nu", "relative_height", "matched", "from", "to", "transition_nu", "amplitude", "mismatch"};
  for (const auto& l : lines) {
    const double rel = max_height > 0.0 ? l.peak.height / max_height : 0.0;
    if (l.matched) {
      t.add_row({l.peak.nu, rel, std::int64_t{1}, to_string(l.from), to_string(l.to), l.transition_nu, l.amplitude,
                 l.mismatch});
    } else {
      t.add_row({l.peak.nu, rel, std::int64_t{0}, CsvCell(), CsvCell(), CsvCell(), CsvCell(), CsvCell()});
    }
  }
  return t;
}

CsvTable dressed_table(const DressedStateSet& d) {
  CsvTable t;
  t.header = {"name", "energy", "manifold", "bare_n", "bare_s", "weight", "doublet_partner"};
  for (DressedName n : {DressedName::psi1_plus, DressedName::psi1_minus, DressedName::psi2_plus, DressedName::psi2_minus}) {
    const auto i = static_cast<std::size_t>(d.index(n));
    std::vector<CsvCell> row{to_string(n), d.energies[i], std::int64_t{d.manifolds[i]}};
    if (const auto& l = d.labels[i]) {
      row.insert(row.end(), {std::int64_t{l->n}, std::string(l->s == Qubit::e ? "e" : "g"), l->weight});
      row.push_back(l->partner ? CsvCell("|" + std::to_string(l->partner->first) + "," +
                                         (l->partner->second == Qubit::e ? "e" : "g") + ">")
                               : CsvCell());
    } else {
      row.insert(row.end(), {CsvCell(), CsvCell(), CsvCell(), CsvCell()});
    }
    t.add_row(std::move(row));
  }
  return t;
}

CsvTable g2tau_table(const ModelParams& params, const CorrelationTrace& qrt, const CorrelationTrace* analytic,
                     int n_max) {
  CsvTable t;
  t.header = {"tau", "kappa_tau", "g2_qrt", "g2_analytic"};
  t.metadata = param_metadata(params, n_max);
  if (analytic && !analytic->warnings.empty()) t.metadata.emplace_back("analytic_warnings", join(analytic->warnings));
  for (std::size_t k = 0; k < qrt.tau.size(); ++k) {
    t.add_row({qrt.tau[k], params.kappa * qrt.tau[k], qrt.values[k].real(),
               analytic ? CsvCell(analytic->values[k].real()) : CsvCell()});
  }
  return t;
}

}  // namespace rabisim

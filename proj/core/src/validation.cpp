#include "rabisim/validation.hpp"

#include "rabisim/model.hpp"
#include "rabisim/solvers.hpp"
#include "rabisim/spectral.hpp"
#include "rabisim/sweep.hpp"
#include "rabisim/trajectory.hpp"
#include "rabisim/version.hpp"
#include "rabisim/weak_excitation.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace rabisim {

namespace {

constexpr double kOmega = 1.0;
constexpr double kWeakG = 0.1;
constexpr double kSweepKappa = 0.2;
constexpr double kPeakThreshold = 0.01;
constexpr double kLowThreshold = 1e-5;

const char* const kNames[kCriterionCount] = {
    "lorentzian_resonance",   "inversion_zero_and_extrema", "antibunching_minimum",  "analytic_vs_numeric",
    "g2_tau_consistency",     "degeneracy_g2_tau",          "spectrum_structure",    "single_sideband_spectrum",
    "saturation",             "trajectory_consistency",     "property_suites",
};

std::vector<double> linear_grid(double start, double stop, double step) {
  const auto count = static_cast<std::size_t>(std::llround((stop - start) / step)) + 1;
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) grid[k] = start + step * static_cast<double>(k);
  return grid;
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

class Harness {
 public:
  explicit Harness(const ValidationConfig& config) : config_(config) {}

  double weak_g() const { return config_.g_override.value_or(kWeakG) * kOmega; }
  double u_step() const { return config_.reduced ? 0.25 : 0.05; }
  int tau_points() const { return config_.reduced ? 201 : 1001; }

  ModelParams weak(double omega0, double U, double kappa) const { return {omega0, kOmega, weak_g(), U, kappa}; }

  // Master and analytic engines over U in [-24, 6] omega at kappa = 0.2 omega.
  const SweepResult& u_sweep(double omega0) {
    auto it = sweeps_.find(omega0);
    if (it != sweeps_.end()) return it->second;
    SweepSpec spec;
    spec.base = weak(omega0, -2.0 * omega0, kSweepKappa);
    spec.axis = Axis::U;
    spec.grid = linear_grid(-24.0, 6.0, u_step());
    spec.n_max = config_.n_max;
    SweepResult result = run_sweep(spec, config_.jobs);
    for (const auto& row : result.rows) {
      if (row.master.error) throw SolverError("master engine at U = " + fmt(row.axis_value) + ": " + *row.master.error);
    }
    return sweeps_.emplace(omega0, std::move(result)).first->second;
  }

  static const Observables& master(const SweepRow& row) { return row.master.value->observables; }

  void lorentzian(CriterionReport& r);
  void inversion(CriterionReport& r);
  void antibunching(CriterionReport& r);
  void analytic_agreement(CriterionReport& r);
  void g2_tau_shape(CriterionReport& r);
  void degeneracy_g2_tau(CriterionReport& r);
  void spectrum_structure(CriterionReport& r);
  void single_sideband(CriterionReport& r);
  void saturation(CriterionReport& r);
  void trajectories(CriterionReport& r);
  void properties(CriterionReport& r);

 private:
  ValidationConfig config_;
  std::map<double, SweepResult> sweeps_;
};

void metric(CriterionReport& r, std::string key, double value) { r.metrics.emplace_back(std::move(key), value); }

// Pass only when every check holds; each failed check leaves a note.
struct Checks {
  CriterionReport& r;
  bool ok = true;
  void require(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      r.notes.push_back("failed: " + what);
    }
  }
};

void Harness::lorentzian(CriterionReport& r) {
  const double omega0 = 10.0;
  const auto& rows = u_sweep(omega0).rows;
  const double target = -2.0 * omega0;
  std::size_t peak = 0, nearest = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (master(rows[k]).photon_number > master(rows[peak]).photon_number) peak = k;
    if (std::abs(rows[k].axis_value - target) < std::abs(rows[nearest].axis_value - target)) nearest = k;
  }
  const double n_peak = master(rows[peak]).photon_number;
  const double g = weak_g();
  const double oracle_peak = g * g / (kOmega * kOmega + kSweepKappa * kSweepKappa);
  const double oracle_hwhm = 2.0 * std::sqrt(kOmega * kOmega + kSweepKappa * kSweepKappa);

  // 1/n of a Lorentzian is a parabola in U: fit it over the contiguous half-maximum core.
  std::size_t lo = peak, hi = peak;
  while (lo > 0 && master(rows[lo - 1]).photon_number >= 0.5 * n_peak) --lo;
  while (hi + 1 < rows.size() && master(rows[hi + 1]).photon_number >= 0.5 * n_peak) ++hi;
  const auto m = static_cast<Eigen::Index>(hi - lo + 1);
  double hwhm = std::numeric_limits<double>::quiet_NaN();
  if (m >= 3) {
    Eigen::MatrixXd A(m, 3);
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto& row = rows[lo + static_cast<std::size_t>(i)];
      const double x = row.axis_value - rows[peak].axis_value;
      A(i, 0) = 1.0;
      A(i, 1) = x;
      A(i, 2) = x * x;
      y(i) = 1.0 / master(row).photon_number;
    }
    const Eigen::Vector3d c = A.colPivHouseholderQr().solve(y);
    const double shift = -c(1) / (2.0 * c(2));
    const double width2 = c(0) / c(2) - shift * shift;
    if (c(2) > 0.0 && width2 > 0.0) hwhm = std::sqrt(width2);
  }

  metric(r, "U_peak", rows[peak].axis_value);
  metric(r, "U_nearest_resonance", rows[nearest].axis_value);
  metric(r, "photon_number_peak", n_peak);
  metric(r, "photon_number_oracle", oracle_peak);
  metric(r, "peak_rel_error", n_peak / oracle_peak - 1.0);
  metric(r, "hwhm_fit", hwhm);
  metric(r, "hwhm_oracle", oracle_hwhm);
  metric(r, "hwhm_fit_points", static_cast<double>(m));

  Checks c{r};
  c.require(peak == nearest, "photon-number maximum is not at the grid point nearest U = -2 omega0");
  c.require(std::abs(n_peak / oracle_peak - 1.0) <= 0.05, "peak value differs from g^2/(omega^2+kappa^2) by more than 5%");
  c.require(std::isfinite(hwhm) && std::abs(hwhm / oracle_hwhm - 1.0) <= 0.10,
            "fitted half width differs from 2 sqrt(omega^2+kappa^2) by more than 10%");
  r.passed = c.ok;
}

void Harness::inversion(CriterionReport& r) {
  const double omega0 = 10.0;
  const auto& rows = u_sweep(omega0).rows;
  const double target = -2.0 * omega0;
  double crossing = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    const double a = master(rows[k]).inversion, b = master(rows[k + 1]).inversion;
    if (a * b > 0.0) continue;
    const double u = a == b ? rows[k].axis_value
                            : rows[k].axis_value + (rows[k + 1].axis_value - rows[k].axis_value) * a / (a - b);
    if (!std::isfinite(crossing) || std::abs(u - target) < std::abs(crossing - target)) crossing = u;
  }
  double max_sz = -2.0, min_sz = 2.0, u_max = 0.0, u_min = 0.0;
  for (const auto& row : rows) {
    const double u = row.axis_value, sz = master(row).inversion;
    if (u >= target - 3.0 * kOmega && u <= target && sz > max_sz) max_sz = sz, u_max = u;
    if (u >= target && u <= target + 3.0 * kOmega && sz < min_sz) min_sz = sz, u_min = u;
  }
  const double k2 = kSweepKappa * kSweepKappa, w2 = kOmega * kOmega;
  const double oracle = 2.0 * w2 / (2.0 * w2 + k2);

  metric(r, "U_zero_crossing", crossing);
  metric(r, "grid_step", u_step());
  metric(r, "inversion_max", max_sz);
  metric(r, "U_inversion_max", u_max);
  metric(r, "inversion_min", min_sz);
  metric(r, "U_inversion_min", u_min);
  metric(r, "extremum_oracle", oracle);

  Checks c{r};
  c.require(std::isfinite(crossing) && std::abs(crossing - target) <= u_step(),
            "inversion does not cross zero within one grid step of U = -2 omega0");
  c.require(std::abs(max_sz / oracle - 1.0) <= 0.05, "maximum below resonance differs from +2w^2/(2w^2+k^2) by more than 5%");
  c.require(std::abs(-min_sz / oracle - 1.0) <= 0.05, "minimum above resonance differs from -2w^2/(2w^2+k^2) by more than 5%");
  r.passed = c.ok;
}

void Harness::antibunching(CriterionReport& r) {
  const double omega0 = 10.0;
  const auto& rows = u_sweep(omega0).rows;
  const double target = -2.0 * omega0;
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& g2 = master(rows[k]).g2_zero;
    if (g2 && (!best || *g2 < *master(rows[*best]).g2_zero)) best = k;
  }
  if (!best) throw SolverError("g2(0) undefined at every grid point");
  const double g2_min = *master(rows[*best]).g2_zero;
  const double u_min = rows[*best].axis_value;
  const double w2 = kOmega * kOmega, k2 = kSweepKappa * kSweepKappa;
  const double oracle = 0.5 * ((w2 + k2) / ((kOmega - omega0) * (kOmega - omega0) + k2) +
                               (w2 + k2) / ((kOmega + omega0) * (kOmega + omega0) + k2));
  const double limit = w2 / (omega0 * omega0);
  // The closed form has its own minimum slightly off resonance; compare locations.
  std::size_t analytic_best = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& a = rows[k].analytic;
    if (a.value && a.value->observables.g2_zero &&
        (!rows[analytic_best].analytic.value ||
         *a.value->observables.g2_zero < *rows[analytic_best].analytic.value->observables.g2_zero))
      analytic_best = k;
  }

  metric(r, "U_g2_min", u_min);
  metric(r, "U_g2_min_analytic", rows[analytic_best].axis_value);
  metric(r, "g2_min", g2_min);
  metric(r, "g2_resonance_oracle", oracle);
  metric(r, "g2_large_omega0_limit", limit);
  metric(r, "rel_error_oracle", g2_min / oracle - 1.0);
  metric(r, "rel_error_limit", g2_min / limit - 1.0);

  Checks c{r};
  c.require(std::abs(u_min - target) <= 0.5 * kOmega, "g2(0) minimum lies farther than omega/2 from U = -2 omega0");
  c.require(std::abs(g2_min / oracle - 1.0) <= 0.10, "minimum differs from the closed-form resonance value by more than 10%");
  c.require(std::abs(g2_min / limit - 1.0) <= 0.25, "minimum differs from omega^2/omega0^2 by more than 25%");
  r.passed = c.ok;
}

void Harness::analytic_agreement(CriterionReport& r) {
  Checks c{r};
  for (double omega0 : {2.0, 5.0, 10.0}) {
    const auto& rows = u_sweep(omega0).rows;
    double dn = 0.0, dg2 = 0.0, dsz = 0.0, u_n = 0.0, u_g2 = 0.0, u_sz = 0.0;
    int points = 0;
    for (const auto& row : rows) {
      const double u = row.axis_value;
      if (std::abs(u - 2.0 * kOmega) < kOmega || std::abs(u + 2.0 * kOmega) < kOmega) continue;
      if (!row.analytic.value) throw SolverError("analytic engine at U = " + fmt(u) + ": " + row.analytic.error.value_or(""));
      const auto& m = master(row);
      const auto& a = row.analytic.value->observables;
      ++points;
      const double en = std::abs(a.photon_number / m.photon_number - 1.0);
      const double esz = std::abs(a.inversion - m.inversion);
      const double eg2 = (m.g2_zero && a.g2_zero) ? std::abs(*a.g2_zero / *m.g2_zero - 1.0)
                                                  : std::numeric_limits<double>::infinity();
      if (en > dn) dn = en, u_n = u;
      if (esz > dsz) dsz = esz, u_sz = u;
      if (eg2 > dg2) dg2 = eg2, u_g2 = u;
    }
    const std::string tag = "omega0_" + fmt(omega0) + "_";
    metric(r, tag + "points", points);
    metric(r, tag + "photon_number_max_rel", dn);
    metric(r, tag + "photon_number_worst_U", u_n);
    metric(r, tag + "g2_max_rel", dg2);
    metric(r, tag + "g2_worst_U", u_g2);
    metric(r, tag + "inversion_max_abs", dsz);
    metric(r, tag + "inversion_worst_U", u_sz);
    c.require(dn < 0.05, "omega0/omega = " + fmt(omega0) + ": photon number deviates by " + fmt(100 * dn) +
                             "% at U = " + fmt(u_n));
    c.require(dg2 < 0.05, "omega0/omega = " + fmt(omega0) + ": g2(0) deviates by " + fmt(100 * dg2) + "% at U = " +
                              fmt(u_g2));
    c.require(dsz < 0.02, "omega0/omega = " + fmt(omega0) + ": inversion deviates by " + fmt(dsz) + " at U = " +
                              fmt(u_sz));
  }
  r.passed = c.ok;
}

struct TraceComparison {
  double max_rel = 0.0;
  double worst_tau = 0.0;
  std::optional<double> rise;  // first kappa*tau with g2 >= 0.5
};

TraceComparison compare_traces(const ModelParams& p, double kappa_tau_lo, double kappa_tau_hi, int points, int n_max) {
  std::vector<double> tau(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) tau[static_cast<std::size_t>(k)] = kappa_tau_hi / p.kappa * k / (points - 1);
  const auto exact = g2_tau(p, tau, make_space(n_max));
  const auto approx = g2_tau_approx(p, tau);
  TraceComparison out;
  for (std::size_t k = 0; k < tau.size(); ++k) {
    const double x = exact.values[k].real(), y = approx.values[k].real();
    if (!out.rise && x >= 0.5) out.rise = tau[k] * p.kappa;
    if (tau[k] * p.kappa < kappa_tau_lo) continue;
    const double rel = std::abs(y - x) / std::abs(x);
    if (rel > out.max_rel) out.max_rel = rel, out.worst_tau = tau[k] * p.kappa;
  }
  return out;
}

void Harness::g2_tau_shape(CriterionReport& r) {
  Checks c{r};
  const ModelParams base = weak(10.0, -20.0, kSweepKappa);
  const double zero[] = {0.0};
  const double qrt0 = g2_tau(base, zero, make_space(config_.n_max)).values.front().real();
  const auto stat = observables(steady_state(liouvillian(base, make_space(config_.n_max))).rho).g2_zero;
  if (!stat) throw UndefinedCorrelation("static g2(0) undefined");
  metric(r, "qrt_g2_zero", qrt0);
  metric(r, "static_g2_zero", *stat);
  metric(r, "g2_zero_abs_diff", std::abs(qrt0 - *stat));
  c.require(std::abs(qrt0 - *stat) <= 1e-10, "QRT g2(0) differs from the static value by more than 1e-10");

  // kappa is the unit: omega0 = 50 kappa, g = 0.5 kappa (scaled by the g override), U = -2 omega0.
  std::vector<std::pair<double, std::optional<double>>> rises;
  for (double ratio : {5.0, 2.5}) {
    const double kappa = kOmega / ratio;
    const ModelParams p{50.0 * kappa, kOmega, 5.0 * weak_g() * kappa, -100.0 * kappa, kappa};
    const auto cmp = compare_traces(p, 0.0, 2.0, tau_points(), config_.n_max);
    const std::string tag = "omega_over_kappa_" + fmt(ratio) + "_";
    metric(r, tag + "max_rel_dev", cmp.max_rel);
    metric(r, tag + "worst_kappa_tau", cmp.worst_tau);
    metric(r, tag + "rise_kappa_tau", cmp.rise.value_or(std::numeric_limits<double>::quiet_NaN()));
    c.require(cmp.max_rel <= 0.15, "omega/kappa = " + fmt(ratio) + ": analytic trace deviates by " +
                                       fmt(100 * cmp.max_rel) + "% for kappa tau <= 2");
    rises.emplace_back(ratio, cmp.rise);
  }
  c.require(rises[0].second && rises[1].second && *rises[0].second < *rises[1].second,
            "g2(tau) does not rise faster for the larger omega/kappa");
  r.passed = c.ok;
}

void Harness::degeneracy_g2_tau(CriterionReport& r) {
  const ModelParams p = weak(10.0, -20.0 + 2.0 * kOmega, kSweepKappa);
  const auto cmp = compare_traces(p, 2.0, 10.0, tau_points(), config_.n_max);
  metric(r, "max_rel_dev", cmp.max_rel);
  metric(r, "worst_kappa_tau", cmp.worst_tau);
  Checks c{r};
  c.require(cmp.max_rel > 0.5, "analytic trace stays within 50% of the QRT trace for kappa tau in [2, 10]");
  r.passed = c.ok;
}

const Peak* nearest_peak(const std::vector<Peak>& peaks, double nu, double window) {
  const Peak* best = nullptr;
  for (const auto& p : peaks) {
    if (std::abs(p.nu - nu) <= window && (!best || std::abs(p.nu - nu) < std::abs(best->nu - nu))) best = &p;
  }
  return best;
}

double max_height(const std::vector<double>& s) { return *std::max_element(s.begin(), s.end()); }

void Harness::spectrum_structure(CriterionReport& r) {
  const double omega0 = 10.0, kappa = 0.1, step = 2e-4;
  const ModelParams p = weak(omega0, -2.0 * omega0, kappa);
  const auto space = make_space(config_.n_max);
  const auto grid = linear_grid(-15.0, 15.0, step);
  const Spectrum spec = emission_spectrum(p, grid, {}, space);
  const double n_ss = observables(steady_state(liouvillian(p, space)).rho).photon_number;
  const double integral = spectrum_integral(spec);
  const auto peaks = find_peaks(spec, kPeakThreshold);
  const auto faint = find_peaks(spec, kLowThreshold);
  const double top = max_height(spec.s);

  Checks c{r};
  metric(r, "sum_rule_rel_error", integral / n_ss - 1.0);
  metric(r, "detected_peaks", static_cast<double>(peaks.size()));
  c.require(std::abs(integral / n_ss - 1.0) <= 0.01, "(1/2pi) integral of S differs from <a+a> by more than 1%");

  for (double sign : {1.0, -1.0}) {
    const std::string side = sign > 0 ? "pos_" : "neg_";
    const Peak* central = nearest_peak(peaks, sign * omega0, 0.5 * kOmega);
    metric(r, side + "central_nu", central ? central->nu : std::numeric_limits<double>::quiet_NaN());
    c.require(central && std::abs(central->nu - sign * omega0) <= step,
              "no detected peak within one grid step of nu = " + fmt(sign * omega0));
    for (double offset : {-kOmega, kOmega}) {
      const double nu = sign * (omega0 + offset);
      const std::string tag = side + "sideband_" + fmt(std::abs(nu)) + "_";
      const Peak* detected = nearest_peak(peaks, nu, 0.5 * kOmega);
      const Peak* weak_line = nearest_peak(faint, nu, 0.5 * kOmega);
      if (weak_line) {
        metric(r, tag + "nu", weak_line->nu);
        metric(r, tag + "rel_height", weak_line->height / top);
        metric(r, tag + "fwhm", weak_line->fwhm.value_or(std::numeric_limits<double>::quiet_NaN()));
        r.notes.push_back("line near nu = " + fmt(nu) + " at nu = " + fmt(weak_line->nu) + ", height " +
                          fmt(weak_line->height / top) + " of the maximum, FWHM " +
                          (weak_line->fwhm ? fmt(*weak_line->fwhm) : std::string("n/a")));
      }
      c.require(detected != nullptr && std::abs(detected->nu - nu) <= step,
                "no peak above the 1% threshold within one grid step of nu = " + fmt(nu));
      const Peak* line = detected ? detected : weak_line;
      c.require(line && line->fwhm && std::abs(*line->fwhm / (2.0 * kappa) - 1.0) <= 0.20,
                "sideband near nu = " + fmt(nu) + " has FWHM outside 20% of 2 kappa");
    }
  }
  r.passed = c.ok;
}

void Harness::single_sideband(CriterionReport& r) {
  const double omega0 = 10.0, step = 2e-4;
  const auto space = make_space(config_.n_max);
  const auto grid = linear_grid(-16.0, 16.0, step);
  Checks c{r};
  for (double kappa : {0.1, 0.05}) {
    const ModelParams p = weak(omega0, -2.0 * omega0 - 2.0 * kOmega, kappa);
    const Spectrum spec = emission_spectrum(p, grid, {}, space);
    const auto peaks = find_peaks(spec, kPeakThreshold);
    const auto faint = find_peaks(spec, kLowThreshold);
    const double top = max_height(spec.s);
    const std::string tag = "kappa_" + fmt(kappa) + "_";
    for (double sign : {1.0, -1.0}) {
      const double lower = sign * (omega0 - kOmega), upper = sign * (omega0 + 2.0 * kOmega);
      const Peak* forbidden = nearest_peak(peaks, lower, 0.5 * kOmega);
      const Peak* forbidden_faint = nearest_peak(faint, lower, 0.5 * kOmega);
      const Peak* sideband = nearest_peak(faint, upper, 0.5 * kOmega);
      metric(r, tag + "peaks_near_" + fmt(lower), forbidden ? 1.0 : 0.0);
      metric(r, tag + "faint_peaks_near_" + fmt(lower), forbidden_faint ? 1.0 : 0.0);
      if (sideband) {
        metric(r, tag + "sideband_nu_" + fmt(upper), sideband->nu);
        metric(r, tag + "sideband_rel_height_" + fmt(upper), sideband->height / top);
      }
      c.require(forbidden == nullptr, "kappa = " + fmt(kappa) + ": detected peak near nu = " + fmt(lower));
    }
    if (kappa == 0.05) {
      std::vector<const Peak*> central;
      for (const auto& pk : peaks) {
        if (std::abs(pk.nu - omega0) <= 0.5 * kOmega) central.push_back(&pk);
      }
      std::sort(central.begin(), central.end(), [](const Peak* a, const Peak* b) { return a->height > b->height; });
      if (central.size() >= 2) {
        const double split = std::abs(central[0]->nu - central[1]->nu);
        metric(r, "central_splitting", split);
        metric(r, "splitting_oracle", 2.0 * p.g);
        c.require(std::abs(split / (2.0 * p.g) - 1.0) <= 0.25, "central-line splitting outside 25% of 2g");
      } else {
        c.require(false, "central line not resolved into two peaks at kappa = 0.05");
      }
    }
  }
  r.passed = c.ok;
}

void Harness::saturation(CriterionReport& r) {
  const ModelParams p{10.0, kOmega, 2.0 * kOmega, -20.0, kSweepKappa};
  const auto ss = steady_state(liouvillian(p, make_space(config_.n_max)));
  const auto obs = observables(ss.rho);
  const double g2 = obs.g2_zero.value_or(std::numeric_limits<double>::quiet_NaN());
  metric(r, "photon_number", obs.photon_number);
  metric(r, "g2_zero", g2);
  metric(r, "residual", ss.residual);
  Checks c{r};
  c.require(obs.photon_number >= 0.38 && obs.photon_number <= 0.50, "photon number outside [0.38, 0.50]");
  c.require(g2 >= 0.05 && g2 <= 0.2, "g2(0) outside [0.05, 0.2]");
  r.passed = c.ok;
}

void Harness::trajectories(CriterionReport& r) {
  constexpr int kTrajectoryNMax = 6;
  constexpr double kTargetJumps = 1.25e4;
  Checks c{r};
  const auto traj_space = make_space(kTrajectoryNMax);
  for (double offset : {0.0, -2.0 * kOmega, 2.0 * kOmega}) {
    const ModelParams p = weak(10.0, -20.0 + offset, kSweepKappa);
    const auto ss = steady_state(liouvillian(p, make_space(config_.n_max)));
    const auto obs = observables(ss.rho);
    const double p1 = manifold_one_population(ss.rho);
    TrajectoryConfig tc;
    tc.seed = config_.seed;
    tc.dt_max = 0.5;
    tc.t_burn = default_burn_in(p);
    tc.t_total = tc.t_burn + kTargetJumps / (2.0 * p.kappa * obs.photon_number);
    const auto rec = run_trajectory(p, traj_space, tc, basis_state(traj_space, 0, Qubit::g));
    const auto est = estimate_observables({rec}, p);

    const std::string tag = "U_" + fmt(p.U) + "_";
    const auto zscore = [](const Estimate& e, double ref) { return (e.value - ref) / e.std_error; };
    metric(r, tag + "jumps", static_cast<double>(est.jumps));
    metric(r, tag + "photon_number", est.photon_number.value);
    metric(r, tag + "photon_number_se", est.photon_number.std_error);
    metric(r, tag + "photon_number_me", obs.photon_number);
    metric(r, tag + "photon_number_z", zscore(est.photon_number, obs.photon_number));
    metric(r, tag + "photon_number_direct_z", zscore(est.photon_number_direct, obs.photon_number));
    metric(r, tag + "p1", est.manifold_one_fraction.value);
    metric(r, tag + "p1_me", p1);
    metric(r, tag + "p1_z", zscore(est.manifold_one_fraction, p1));
    metric(r, tag + "p2_z", zscore(est.manifold_two_fraction, 1.0 - p1));
    metric(r, tag + "alternation_rate", est.alternation_rate);

    const std::string at = " at U = " + fmt(p.U);
    c.require(est.jumps >= 10000, "fewer than 1e4 jumps" + at);
    c.require(std::abs(zscore(est.photon_number, obs.photon_number)) <= 3.0, "photon number outside 3 SE" + at);
    c.require(std::abs(zscore(est.manifold_one_fraction, p1)) <= 3.0, "p1 outside 3 SE" + at);
    c.require(std::abs(zscore(est.manifold_two_fraction, 1.0 - p1)) <= 3.0, "p2 outside 3 SE" + at);
    c.require(est.alternation_rate > 0.99, "manifold alternation rate not above 99%" + at);
  }
  r.passed = c.ok;
}

void Harness::properties(CriterionReport& r) {
  Checks c{r};
  const ModelParams p = weak(10.0, -20.0, kSweepKappa);
  const auto space = make_space(config_.n_max);
  const Liouvillian L = liouvillian(p, space);

  std::mt19937_64 rng(config_.seed);
  std::normal_distribution<double> normal;
  double trace_err = 0.0, herm_err = 0.0;
  for (int trial = 0; trial < 8; ++trial) {
    DenseMatrix m(space.dim(), space.dim());
    for (int i = 0; i < space.dim(); ++i)
      for (int j = 0; j < space.dim(); ++j) m(i, j) = cplx(normal(rng), normal(rng));
    DenseMatrix rho = m * m.adjoint();
    rho /= rho.trace().real();
    const DenseMatrix out = L.apply(rho);
    const double scale = std::max(out.norm(), 1e-300);
    trace_err = std::max(trace_err, std::abs(out.trace()) / scale);
    herm_err = std::max(herm_err, (out - out.adjoint()).norm() / scale);
  }
  metric(r, "liouvillian_trace_rel", trace_err);
  metric(r, "liouvillian_hermiticity_rel", herm_err);
  c.require(trace_err < 1e-12, "Liouvillian does not preserve the trace");
  c.require(herm_err < 1e-12, "Liouvillian does not preserve Hermiticity");

  const auto ss = steady_state(L);
  const double min_eig = ss.rho.min_eigenvalue();
  const double amp = std::abs(field_amplitude(ss.rho));
  const double herm_ss = hermiticity_error(ss.rho.dense());
  metric(r, "steady_min_eigenvalue", min_eig);
  metric(r, "steady_hermiticity", herm_ss);
  metric(r, "steady_residual", ss.residual);
  metric(r, "field_amplitude_abs", amp);
  c.require(min_eig >= -DensityMatrix::kPositivityTol, "steady state is not positive semidefinite");
  c.require(herm_ss <= DensityMatrix::kHermiticityTol, "steady state is not Hermitian");
  c.require(ss.converged, "steady state residual above tolerance");
  c.require(amp < 1e-10, "steady-state <a> does not vanish");

  const auto wider = steady_state(liouvillian(p, make_space(config_.n_max + 4)));
  const auto a = observables(ss.rho), b = observables(wider.rho);
  double change = std::max(std::abs(a.photon_number - b.photon_number), std::abs(a.inversion - b.inversion));
  if (a.g2_zero && b.g2_zero) change = std::max(change, std::abs(*a.g2_zero - *b.g2_zero));
  metric(r, "cutoff_change", change);
  c.require(change < 1e-8, "observables change by " + fmt(change) + " from n_max " + std::to_string(config_.n_max) +
                               " to " + std::to_string(config_.n_max + 4));

  const auto tspace = make_space(std::min(config_.n_max, 6));
  TrajectoryConfig tc;
  tc.seed = config_.seed;
  tc.t_total = 2e4;
  tc.dt_max = 0.5;
  tc.n_trajectories = 4;
  const auto psi0 = basis_state(tspace, 0, Qubit::g);
  const auto first = run_ensemble(p, tspace, tc, psi0, 1);
  const auto again = run_ensemble(p, tspace, tc, psi0, 2);
  bool same = first.size() == again.size();
  for (std::size_t k = 0; same && k < first.size(); ++k) same = first[k].jump_times == again[k].jump_times;
  tc.seed = config_.seed + 1;
  const auto other = run_ensemble(p, tspace, tc, psi0, 1);
  bool differs = false;
  for (std::size_t k = 0; k < first.size(); ++k) differs = differs || first[k].jump_times != other[k].jump_times;
  metric(r, "trajectory_seed_deterministic", same ? 1.0 : 0.0);
  metric(r, "trajectory_seed_sensitive", differs ? 1.0 : 0.0);
  c.require(same, "identical seeds gave different jump records");
  c.require(differs, "different seeds gave identical jump records");
  r.passed = c.ok;
}

}  // namespace

std::string criterion_name(int id) {
  if (id < 1 || id > kCriterionCount) throw std::invalid_argument("criterion_name: id out of range");
  return kNames[id - 1];
}

bool ValidationReport::all_passed() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const CriterionReport& c) { return c.passed; });
}

ValidationReport run_validation(const ValidationConfig& config) {
  if (config.n_max < 2) throw std::invalid_argument("run_validation: n_max must be >= 2");
  for (int id : config.only) {
    if (id < 1 || id > kCriterionCount) throw std::invalid_argument("run_validation: criterion id out of range");
  }
  if (config.g_override && !(*config.g_override >= 0.0)) throw std::invalid_argument("run_validation: g must be >= 0");

  Harness h(config);
  using Check = void (Harness::*)(CriterionReport&);
  const Check checks[kCriterionCount] = {
      &Harness::lorentzian,       &Harness::inversion,          &Harness::antibunching, &Harness::analytic_agreement,
      &Harness::g2_tau_shape,     &Harness::degeneracy_g2_tau,  &Harness::spectrum_structure,
      &Harness::single_sideband,  &Harness::saturation,         &Harness::trajectories, &Harness::properties,
  };

  ValidationReport report;
  report.config = config;
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (!config.only.empty() && std::find(config.only.begin(), config.only.end(), id) == config.only.end()) continue;
    CriterionReport r;
    r.id = id;
    r.name = kNames[id - 1];
    try {
      (h.*checks[id - 1])(r);
    } catch (const std::exception& e) {
      r.passed = false;
      r.error = e.what();
    }
    report.criteria.push_back(std::move(r));
  }
  return report;
}

std::string summary_line(const CriterionReport& r) {
  std::ostringstream s;
  s << "criterion " << r.id << " [" << r.name << "]: " << (r.passed ? "PASS" : "FAIL");
  if (r.error) {
    s << " error: " << *r.error;
  } else if (!r.passed) {
    bool first = true;
    for (const auto& n : r.notes) {
      if (n.rfind("failed: ", 0) != 0) continue;
      s << (first ? " (" : "; ") << n.substr(8);
      first = false;
    }
    if (!first) s << ")";
  }
  return s.str();
}

std::string to_json(const ValidationReport& report) {
  using json = nlohmann::ordered_json;
  json out;
  out["version"] = kVersion;
  out["config"] = {{"n_max", report.config.n_max},
                   {"seed", report.config.seed},
                   {"reduced", report.config.reduced},
                   {"g_over_omega", report.config.g_override.value_or(kWeakG)},
                   {"jobs", report.config.jobs}};
  out["passed"] = report.all_passed();
  json list = json::array();
  for (const auto& r : report.criteria) {
    json item;
    item["id"] = r.id;
    item["name"] = r.name;
    item["passed"] = r.passed;
    json metrics = json::object();
    // JSON has no NaN; non-finite metrics become null.
    for (const auto& [k, v] : r.metrics) metrics[k] = std::isfinite(v) ? json(v) : json(nullptr);
    item["metrics"] = std::move(metrics);
    item["notes"] = r.notes;
    item["error"] = r.error ? json(*r.error) : json(nullptr);
    list.push_back(std::move(item));
  }
  out["criteria"] = std::move(list);
  return out.dump(2);
}

}  // namespace rabisim

#include "rabisim/spectral.hpp"

#include "rabisim/solvers.hpp"
#include "sector_propagator.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace rabisim {

namespace {

constexpr long double kTwoPiL = 2.0L * std::numbers::pi_v<long double>;

void check_tau_grid(std::span<const double> tau, const char* who) {
  if (tau.empty()) throw std::invalid_argument(std::string(who) + ": empty tau grid");
  if (tau.front() < 0.0) throw std::invalid_argument(std::string(who) + ": tau must be nonnegative");
  for (std::size_t k = 1; k < tau.size(); ++k) {
    if (!(tau[k] > tau[k - 1])) throw std::invalid_argument(std::string(who) + ": tau grid must increase");
  }
}

// Tr[observable exp(L tau)(x0)] on the grid, propagating in the sector that contains x0.
std::vector<cplx> regression(const Liouvillian& L, ParitySector sector, const DenseMatrix& x0,
                             const DenseMatrix& observable, std::span<const double> tau) {
  detail::SectorPropagator prop(L, sector);
  std::vector<double> grid;
  grid.reserve(tau.size() + 1);
  const bool starts_at_zero = tau.front() == 0.0;
  if (!starts_at_zero) grid.push_back(0.0);
  grid.insert(grid.end(), tau.begin(), tau.end());
  const DenseVector r = prop.trace_functional(observable);
  const auto xs = prop.evolve(prop.restrict_operator(x0), grid);
  std::vector<cplx> out;
  out.reserve(tau.size());
  for (std::size_t k = starts_at_zero ? 0 : 1; k < xs.size(); ++k) out.push_back(r.transpose() * xs[k]);
  return out;
}

struct SteadyContext {
  Liouvillian L;
  DensityMatrix rho;
  double photon_number;
};

SteadyContext steady_context(const ModelParams& params, const SpaceSpec& space) {
  params.validate();
  Liouvillian L = liouvillian(params, space);
  auto ss = steady_state(L);
  const double n = observables(ss.rho).photon_number;
  return {std::move(L), std::move(ss.rho), n};
}

void require_photons(double n, const char* who) {
  if (!(n >= kMinPhotonNumber)) {
    std::ostringstream s;
    s << who << ": <a†a> = " << n << " below " << kMinPhotonNumber << "; correlation undefined";
    throw UndefinedCorrelation(s.str());
  }
}

// Uniform to within 1e-6 of the step; the transform then samples the ideal grid.
bool is_uniform(std::span<const double> x) {
  if (x.size() < 3) return false;
  const double step = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  if (step == 0.0) return false;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (std::abs(x[j] - (x.front() + step * static_cast<double>(j))) > 1e-6 * std::abs(step)) return false;
  }
  return true;
}

cplx unit_phasor(long double angle) {
  angle = std::fmod(angle, kTwoPiL);
  return {static_cast<double>(std::cos(angle)), static_cast<double>(std::sin(angle))};
}

// X_j = Σ_k c_k exp(-i nu_j k h) for a uniform nu grid via Bluestein's algorithm.
std::vector<cplx> chirp_z(std::span<const cplx> c, double h, double nu0, double dnu, std::size_t m) {
  const std::size_t n = c.size();
  std::size_t len = 1;
  while (len < n + m - 1) len <<= 1;
  const long double half_step = 0.5L * static_cast<long double>(dnu) * static_cast<long double>(h);
  const long double base = static_cast<long double>(nu0) * static_cast<long double>(h);

  std::vector<cplx> y(len, cplx(0.0)), v(len, cplx(0.0));
  for (std::size_t k = 0; k < n; ++k) {
    const long double kk = static_cast<long double>(k);
    y[k] = c[k] * unit_phasor(-(base * kk + half_step * kk * kk));
  }
  for (std::size_t j = 0; j < m; ++j) {
    const long double jj = static_cast<long double>(j);
    v[j] = unit_phasor(half_step * jj * jj);
  }
  for (std::size_t k = 1; k < n; ++k) {
    const long double kk = static_cast<long double>(k);
    v[len - k] = unit_phasor(half_step * kk * kk);
  }
  Eigen::FFT<double> fft;
  std::vector<cplx> fy, fv, z;
  fft.fwd(fy, y);
  fft.fwd(fv, v);
  for (std::size_t i = 0; i < len; ++i) fy[i] *= fv[i];
  fft.inv(z, fy);
  std::vector<cplx> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    const long double jj = static_cast<long double>(j);
    out[j] = z[j] * unit_phasor(-half_step * jj * jj);
  }
  return out;
}

// X(nu) = Σ_k c_k exp(-i nu k h) on an arbitrary grid.
std::vector<cplx> fourier_sum(std::span<const cplx> c, double h, std::span<const double> nu) {
  if (is_uniform(nu)) {
    const double dnu = (nu.back() - nu.front()) / static_cast<double>(nu.size() - 1);
    return chirp_z(c, h, nu.front(), dnu, nu.size());
  }
  std::vector<cplx> out(nu.size());
  for (std::size_t j = 0; j < nu.size(); ++j) {
    const long double step = -static_cast<long double>(nu[j]) * h;
    const cplx rot = unit_phasor(step);
    cplx phase = 1.0, acc = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (k % 1024 == 0) phase = unit_phasor(step * static_cast<long double>(k));
      acc += c[k] * phase;
      phase *= rot;
    }
    out[j] = acc;
  }
  return out;
}

// Largest Bohr frequency among dressed states living mostly in the zero- and one-photon states,
// padded by the coupling and linewidth scales.
double system_bandwidth(const ModelParams& params, const SpaceSpec& space) {
  const auto dressed = dressed_states(params, space);
  std::vector<double> low;
  for (std::size_t i = 0; i < dressed.states.size(); ++i) {
    double w = 0.0;
    for (int k = 0; k < std::min(space.dim(), 4); ++k) w += std::norm(dressed.states[i][k]);
    if (w >= 0.5) low.push_back(dressed.energies[i]);
  }
  double span = 0.0;
  if (!low.empty()) span = *std::max_element(low.begin(), low.end()) - *std::min_element(low.begin(), low.end());
  return span + 4.0 * (params.g + params.kappa);
}

struct CorrelationSeries {
  std::vector<cplx> values;
  double h = 0.0;
  double decay = 0.0;
  bool reached_target = false;
};

CorrelationSeries field_series(const SteadyContext& ctx, const ModelParams& params, std::span<const double> nu_grid,
                               const SpectrumOptions& opt) {
  const SpaceSpec& space = ctx.L.space();
  double nu_max = system_bandwidth(params, space);
  for (double v : nu_grid) nu_max = std::max(nu_max, std::abs(v));
  CorrelationSeries out;
  out.h = std::numbers::pi / (2.0 * nu_max);

  const DenseMatrix a = annihilation(space).dense();
  detail::SectorPropagator prop(ctx.L, ParitySector::cross);
  const DenseVector x0 = prop.restrict_operator(a * ctx.rho.dense());
  const DenseVector r = prop.trace_functional(a.adjoint());
  const double c0 = ctx.photon_number;
  std::size_t checked = 0;
  auto stop = [&](const std::vector<cplx>& values) {
    double block_max = 0.0;
    for (std::size_t k = checked; k < values.size(); ++k) block_max = std::max(block_max, std::abs(values[k]));
    checked = values.size();
    out.decay = block_max / c0;
    out.reached_target = out.decay < opt.decay_target;
    return out.reached_target;
  };
  out.values = prop.uniform_series(r, x0, out.h, opt.max_points, stop);
  return out;
}

void check_window(const CorrelationSeries& series, const SpectrumOptions& opt, std::vector<std::string>& warnings) {
  if (series.reached_target) return;
  std::ostringstream s;
  s << "C(tau) decayed only to " << series.decay << " of C(0) within " << series.values.size() << " samples";
  if (series.decay >= opt.required_decay) {
    throw SpectrumWindowError("emission_spectrum: " + s.str() + "; refusing a truncated transform");
  }
  warnings.push_back(s.str());
}

}  // namespace

CorrelationTrace g2_tau(const ModelParams& params, std::span<const double> tau_grid, const SpaceSpec& space) {
  check_tau_grid(tau_grid, "g2_tau");
  const auto ctx = steady_context(params, space);
  require_photons(ctx.photon_number, "g2_tau");
  const DenseMatrix a = annihilation(space).dense();
  const DenseMatrix x0 = a * ctx.rho.dense() * a.adjoint();
  CorrelationTrace trace;
  trace.tau.assign(tau_grid.begin(), tau_grid.end());
  trace.values = regression(ctx.L, ParitySector::same, x0, number_op(space).dense(), tau_grid);
  const double norm = ctx.photon_number * ctx.photon_number;
  for (auto& v : trace.values) v /= norm;
  return trace;
}

CorrelationTrace field_correlation(const ModelParams& params, std::span<const double> tau_grid,
                                   const SpaceSpec& space) {
  check_tau_grid(tau_grid, "field_correlation");
  const auto ctx = steady_context(params, space);
  require_photons(ctx.photon_number, "field_correlation");
  const DenseMatrix a = annihilation(space).dense();
  CorrelationTrace trace;
  trace.tau.assign(tau_grid.begin(), tau_grid.end());
  trace.values = regression(ctx.L, ParitySector::cross, a * ctx.rho.dense(), a.adjoint(), tau_grid);
  return trace;
}

CorrelationTrace field_correlation_reversed(const ModelParams& params, std::span<const double> tau_grid,
                                            const SpaceSpec& space) {
  check_tau_grid(tau_grid, "field_correlation_reversed");
  const auto ctx = steady_context(params, space);
  require_photons(ctx.photon_number, "field_correlation_reversed");
  const DenseMatrix a = annihilation(space).dense();
  CorrelationTrace trace;
  trace.tau.assign(tau_grid.begin(), tau_grid.end());
  trace.values = regression(ctx.L, ParitySector::cross, ctx.rho.dense() * a.adjoint(), a, tau_grid);
  return trace;
}

std::vector<double> one_sided_transform(std::span<const cplx> c, double h, std::span<const double> nu_grid) {
  if (c.empty()) throw std::invalid_argument("one_sided_transform: no samples");
  const auto x = fourier_sum(c, h, nu_grid);
  std::vector<double> s(nu_grid.size());
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = 2.0 * (h * (x[j] - 0.5 * c[0])).real();
  return s;
}

Spectrum emission_spectrum(const ModelParams& params, std::span<const double> nu_grid, const SpectrumOptions& opt,
                           const SpaceSpec& space) {
  if (nu_grid.empty()) throw std::invalid_argument("emission_spectrum: empty frequency grid");
  if (!(opt.decay_target > 0.0) || !(opt.required_decay > 0.0)) {
    throw std::invalid_argument("emission_spectrum: decay thresholds must be positive");
  }
  const auto ctx = steady_context(params, space);
  Spectrum spec;
  spec.nu.assign(nu_grid.begin(), nu_grid.end());
  spec.photon_number = ctx.photon_number;
  if (!(ctx.photon_number >= kMinPhotonNumber)) {
    spec.s.assign(nu_grid.size(), 0.0);
    spec.warnings.push_back("no emission: <a†a> below 1e-14, spectrum set to zero");
    return spec;
  }
  const auto series = field_series(ctx, params, nu_grid, opt);
  check_window(series, opt, spec.warnings);
  spec.tau_step = series.h;
  spec.tau_points = series.values.size();
  spec.tau_window = series.h * static_cast<double>(series.values.size() - 1);
  spec.window_decay = series.decay;
  spec.s = one_sided_transform(series.values, series.h, nu_grid);
  return spec;
}

std::vector<cplx> emission_spectrum_two_sided(const ModelParams& params, std::span<const double> nu_grid,
                                              const SpectrumOptions& opt, const SpaceSpec& space) {
  if (nu_grid.empty()) throw std::invalid_argument("emission_spectrum_two_sided: empty frequency grid");
  const auto ctx = steady_context(params, space);
  require_photons(ctx.photon_number, "emission_spectrum_two_sided");
  const auto forward = field_series(ctx, params, nu_grid, opt);
  std::vector<std::string> ignored;
  check_window(forward, opt, ignored);

  const DenseMatrix a = annihilation(space).dense();
  detail::SectorPropagator prop(ctx.L, ParitySector::cross);
  const DenseVector x0 = prop.restrict_operator(ctx.rho.dense() * a.adjoint());
  const DenseVector r = prop.trace_functional(a);
  const auto backward =
      prop.uniform_series(r, x0, forward.h, forward.values.size(), [](const std::vector<cplx>&) { return false; });

  std::vector<double> neg_nu(nu_grid.size());
  std::transform(nu_grid.begin(), nu_grid.end(), neg_nu.begin(), [](double v) { return -v; });
  const auto xf = fourier_sum(forward.values, forward.h, nu_grid);
  const auto xb = fourier_sum(backward, forward.h, neg_nu);
  std::vector<cplx> s(nu_grid.size());
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = forward.h * (xf[j] + xb[j] - backward[0]);
  return s;
}

double spectrum_integral(const Spectrum& spectrum) {
  double acc = 0.0;
  for (std::size_t j = 1; j < spectrum.nu.size(); ++j) {
    acc += 0.5 * (spectrum.s[j] + spectrum.s[j - 1]) * (spectrum.nu[j] - spectrum.nu[j - 1]);
  }
  return acc / (2.0 * std::numbers::pi);
}

std::vector<Peak> find_peaks(const Spectrum& spectrum, double rel_threshold) {
  const auto& s = spectrum.s;
  const auto& nu = spectrum.nu;
  std::vector<Peak> peaks;
  if (s.size() < 3) return peaks;
  const double smax = *std::max_element(s.begin(), s.end());
  if (!(smax > 0.0)) return peaks;
  const double threshold = rel_threshold * smax;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (!(s[i] > s[i - 1] && s[i] >= s[i + 1] && s[i] > threshold)) continue;
    Peak p;
    p.index = i;
    p.nu = nu[i];
    p.height = s[i];
    // Parabola through the three samples (nonuniform spacing allowed).
    const double x0 = nu[i - 1] - nu[i], x2 = nu[i + 1] - nu[i];
    const double y0 = s[i - 1] - s[i], y2 = s[i + 1] - s[i];
    const double curv = (y0 * x2 - y2 * x0) / (x0 * x2 * (x0 - x2));
    const double slope = (y0 - curv * x0 * x0) / x0;
    if (curv < 0.0) {
      const double dx = std::clamp(-slope / (2.0 * curv), x0, x2);
      p.nu = nu[i] + dx;
      p.height = s[i] + slope * dx + curv * dx * dx;
    }
    const double half = 0.5 * p.height;
    std::optional<double> left, right;
    for (std::size_t k = i; k > 0; --k) {
      if (s[k - 1] < half) {
        left = nu[k - 1] + (half - s[k - 1]) * (nu[k] - nu[k - 1]) / (s[k] - s[k - 1]);
        break;
      }
    }
    for (std::size_t k = i; k + 1 < s.size(); ++k) {
      if (s[k + 1] < half) {
        right = nu[k] + (s[k] - half) * (nu[k + 1] - nu[k]) / (s[k] - s[k + 1]);
        break;
      }
    }
    if (left && right) p.fwhm = *right - *left;
    peaks.push_back(p);
  }
  return peaks;
}

std::string to_string(DressedName name) {
  switch (name) {
    case DressedName::psi1_plus: return "psi1+";
    case DressedName::psi1_minus: return "psi1-";
    case DressedName::psi2_plus: return "psi2+";
    case DressedName::psi2_minus: return "psi2-";
  }
  return "?";
}

DressedStateSet dressed_states(const ModelParams& params, const SpaceSpec& space) {
  params.validate();
  const DenseMatrix H = hamiltonian(params, space).dense();
  struct Eigenpair {
    double energy;
    DenseVector vec;
    int manifold;
  };
  std::vector<Eigenpair> pairs;
  for (int m : {1, 2}) {
    std::vector<int> idx;
    for (int i = 0; i < space.dim(); ++i)
      if (manifold_of_index(i) == m) idx.push_back(i);
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd block(k, k);
    for (Eigen::Index r = 0; r < k; ++r)
      for (Eigen::Index c = 0; c < k; ++c) block(r, c) = H(idx[r], idx[c]).real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
    for (Eigen::Index c = 0; c < k; ++c) {
      DenseVector v = DenseVector::Zero(space.dim());
      for (Eigen::Index r = 0; r < k; ++r) v(idx[r]) = es.eigenvectors()(r, c);
      pairs.push_back({es.eigenvalues()(c), std::move(v), m});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) { return x.energy < y.energy; });

  DressedStateSet set{space, {}, {}, {}, {}, {}, {}, Eigen::Matrix4d::Zero()};
  for (auto& p : pairs) {
    set.energies.push_back(p.energy);
    set.states.emplace_back(space, std::move(p.vec));
    set.manifolds.push_back(p.manifold);
  }
  const std::size_t count = set.states.size();

  const double degeneracy_tol = 1e-10 * params.omega0;
  std::vector<bool> unresolvable(count, false);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count && set.energies[j] - set.energies[i] < degeneracy_tol; ++j) {
      set.degenerate_pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
      if (set.manifolds[i] == set.manifolds[j]) unresolvable[i] = unresolvable[j] = true;
    }
  }

  for (std::size_t i = 0; i < count; ++i) {
    std::optional<DressedLabel> label;
    if (!unresolvable[i]) {
      const DenseVector& v = set.states[i].amplitudes();
      Eigen::Index first = 0;
      const Eigen::VectorXd w = v.cwiseAbs2();
      w.maxCoeff(&first);
      Eigen::Index second = first == 0 ? 1 : 0;
      for (Eigen::Index k = 0; k < w.size(); ++k)
        if (k != first && w(k) > w(second)) second = k;
      const int fi = static_cast<int>(first), si = static_cast<int>(second);
      DressedLabel l{SpaceSpec::photons_of(fi), SpaceSpec::qubit_of(fi), w(first), std::nullopt};
      if (w(first) - w(second) < 1e-3) {
        l.partner = std::make_pair(SpaceSpec::photons_of(si), SpaceSpec::qubit_of(si));
        l.weight += w(second);
      }
      if (l.weight > 0.5) label = l;
    }
    set.labels.push_back(label);
  }

  // Zero- and one-photon bare states of each manifold.
  const std::array<std::array<int, 2>, 2> low{{{space.index(0, Qubit::e), space.index(1, Qubit::g)},
                                               {space.index(0, Qubit::g), space.index(1, Qubit::e)}}};
  for (int m : {1, 2}) {
    std::vector<std::pair<double, int>> ranked;
    for (std::size_t i = 0; i < count; ++i) {
      if (set.manifolds[i] != m) continue;
      const auto& st = set.states[i];
      const auto& l = low[static_cast<std::size_t>(m - 1)];
      ranked.emplace_back(std::norm(st[l[0]]) + std::norm(st[l[1]]), static_cast<int>(i));
    }
    std::partial_sort(ranked.begin(), ranked.begin() + 2, ranked.end(), std::greater<>());
    int lo = ranked[0].second, hi = ranked[1].second;
    if (set.energies[static_cast<std::size_t>(lo)] > set.energies[static_cast<std::size_t>(hi)]) std::swap(lo, hi);
    const std::size_t base = m == 1 ? 0 : 2;
    set.named[base] = hi;      // "+"
    set.named[base + 1] = lo;  // "-"
  }

  const DenseMatrix a = annihilation(space).dense();
  for (int f = 0; f < 4; ++f) {
    for (int i = 0; i < 4; ++i) {
      const auto& sf = set.states[static_cast<std::size_t>(set.named[static_cast<std::size_t>(f)])].amplitudes();
      const auto& si = set.states[static_cast<std::size_t>(set.named[static_cast<std::size_t>(i)])].amplitudes();
      set.transition_amplitudes(f, i) = std::abs(sf.dot(a * si));
    }
  }
  return set;
}

std::vector<LineAssignment> assign_lines(const DressedStateSet& dressed, const Spectrum& spectrum,
                                         const ModelParams& params, double tolerance, double rel_threshold) {
  if (tolerance <= 0.0) tolerance = 4.0 * params.kappa;
  std::vector<LineAssignment> lines;
  for (const auto& peak : find_peaks(spectrum, rel_threshold)) {
    LineAssignment best;
    best.peak = peak;
    best.mismatch = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
      for (int f = 0; f < 4; ++f) {
        const double amp = dressed.transition_amplitudes(f, i);
        if (amp == 0.0) continue;  // a changes the manifold; same-manifold pairs have no amplitude
        const auto from = static_cast<DressedName>(i);
        const auto to = static_cast<DressedName>(f);
        const double nu = dressed.energy(from) - dressed.energy(to);
        const double mismatch = std::abs(peak.nu - nu);
        if (mismatch < best.mismatch) {
          best.from = from;
          best.to = to;
          best.transition_nu = nu;
          best.amplitude = amp;
          best.mismatch = mismatch;
        }
      }
    }
    best.matched = best.mismatch <= tolerance;
    lines.push_back(best);
  }
  return lines;
}

}  // namespace rabisim

#include "rabisim/weak_excitation.hpp"

#include <cmath>
#include <sstream>

namespace rabisim {

namespace {

constexpr cplx I{0.0, 1.0};
const double kSqrt2 = std::sqrt(2.0);

struct Detunings {
  cplx d1, d2;    // beta equations
  cplx m1, m2;    // mu equations: 2 omega +- U - 2 i kappa
};

Detunings detunings(const ModelParams& p) {
  const cplx k{0.0, p.kappa};
  return {p.omega - p.omega0 - p.U / 2 - k, p.omega + p.omega0 + p.U / 2 - k, 2 * p.omega + p.U - 2.0 * k,
          2 * p.omega - p.U - 2.0 * k};
}

double mixed_norm(const ManifoldAmplitudes& a, const ManifoldPopulations& pop) {
  return std::sqrt(pop.p1 * std::norm(a.beta1) + pop.p2 * std::norm(a.beta2));
}

}  // namespace

ManifoldAmplitudes amplitudes(const ModelParams& p) {
  p.validate();
  const auto d = detunings(p);
  const cplx k{0.0, p.kappa};
  ManifoldAmplitudes a;
  a.beta1 = -p.g / d.d1;
  a.beta2 = -p.g / d.d2;
  a.mu1 = p.g * p.g / (kSqrt2 * (p.omega + p.U / 2 - k) * d.d1);
  a.mu2 = p.g * p.g / (kSqrt2 * (p.omega - p.U / 2 - k) * d.d2);
  return a;
}

ManifoldPopulations populations(const ManifoldAmplitudes& a) {
  const double b1 = std::norm(a.beta1);
  const double b2 = std::norm(a.beta2);
  if (b1 == 0.0 || b2 == 0.0) {
    throw UndefinedPopulations("populations: beta amplitudes vanish (g = 0); manifold populations undefined");
  }
  ManifoldPopulations pop;
  pop.xi = b2 / b1;
  // The smaller population is computed directly so its relative accuracy survives.
  if (pop.xi <= 1.0) {
    pop.p1 = pop.xi / (1.0 + pop.xi);
    pop.p2 = 1.0 - pop.p1;
  } else {
    pop.p2 = 1.0 / (1.0 + pop.xi);
    pop.p1 = 1.0 - pop.p2;
  }
  return pop;
}

std::vector<std::string> regime_warnings(const ManifoldAmplitudes& a) {
  std::vector<std::string> out;
  const auto check = [&out](int k, cplx beta, cplx mu) {
    if (std::abs(beta) > kRegimeWarningThreshold) {
      std::ostringstream s;
      s << "weak-excitation regime exceeded: |beta" << k << "| = " << std::abs(beta) << " > "
        << kRegimeWarningThreshold;
      out.push_back(s.str());
    }
    if (beta != cplx(0.0) && std::abs(mu / beta) > kRegimeWarningThreshold) {
      std::ostringstream s;
      s << "weak-excitation regime exceeded: |mu" << k << "/beta" << k << "| = " << std::abs(mu / beta) << " > "
        << kRegimeWarningThreshold;
      out.push_back(s.str());
    }
  };
  check(1, a.beta1, a.mu1);
  check(2, a.beta2, a.mu2);
  return out;
}

WeakExcitationSolution solve_weak_excitation(const ModelParams& params) {
  WeakExcitationSolution s;
  s.amplitudes = amplitudes(params);
  s.populations = populations(s.amplitudes);
  s.warnings = regime_warnings(s.amplitudes);
  return s;
}

Observables closed_form_observables(const ModelParams& p) {
  p.validate();
  const double s = p.omega0 + p.U / 2;
  const double w2 = p.omega * p.omega, k2 = p.kappa * p.kappa;
  const double denom = s * s + w2 + k2;
  const double a = p.omega + p.U / 2, b = p.omega - p.U / 2;
  Observables o;
  o.photon_number = p.g * p.g / denom;
  o.inversion = -2 * p.omega * s / denom;
  o.g2_zero = 0.5 * denom * (1 / (a * a + k2) + 1 / (b * b + k2));
  return o;
}

LimitResults limit_results(const ModelParams& p) {
  p.validate();
  const double w2 = p.omega * p.omega, k2 = p.kappa * p.kappa;
  LimitResults r;
  r.resonance_U = -2 * p.omega0;
  r.peak_photon_number = p.g * p.g / (w2 + k2);
  r.lorentzian_half_width = 2 * std::sqrt(w2 + k2);
  r.inversion_at_upper = -2 * w2 / (2 * w2 + k2);
  r.inversion_at_lower = -r.inversion_at_upper;
  const double dm = p.omega - p.omega0, dp = p.omega + p.omega0;
  r.g2_at_resonance = 0.5 * ((w2 + k2) / (dm * dm + k2) + (w2 + k2) / (dp * dp + k2));
  r.g2_large_omega0 = (w2 + k2) / (p.omega0 * p.omega0 + k2);
  return r;
}

std::vector<ManifoldAmplitudes> transient_amplitudes(const ModelParams& p, std::span<const double> t_grid,
                                                     const TransientInitial& init, const OdeOptions& options) {
  p.validate();
  if (t_grid.empty() || t_grid.front() != 0.0) {
    throw std::invalid_argument("transient_amplitudes: t_grid must start at 0");
  }
  const auto d = detunings(p);
  const double g = p.g;
  const cplx drive1 = -I * g * init.alpha1;
  const cplx drive2 = -I * g * init.alpha2;
  auto rhs = [&](double, const Eigen::VectorXcd& y) {
    Eigen::VectorXcd dy(4);
    dy(0) = drive1 - I * d.d1 * y(0) - I * kSqrt2 * g * y(1);
    dy(1) = -I * kSqrt2 * g * y(0) - I * d.m1 * y(1);
    dy(2) = drive2 - I * d.d2 * y(2) - I * kSqrt2 * g * y(3);
    dy(3) = -I * kSqrt2 * g * y(2) - I * d.m2 * y(3);
    return dy;
  };
  Eigen::VectorXcd y0(4);
  y0 << init.amplitudes.beta1, init.amplitudes.mu1, init.amplitudes.beta2, init.amplitudes.mu2;
  const auto ys = integrate_dopri5(rhs, y0, t_grid, options);
  std::vector<ManifoldAmplitudes> out;
  out.reserve(ys.size());
  for (const auto& y : ys) out.push_back({y(0), y(1), y(2), y(3)});
  return out;
}

ManifoldAmplitudes transient_fixed_point(const ModelParams& p) {
  p.validate();
  const auto d = detunings(p);
  const double g = p.g;
  // 0 = -g - D beta - sqrt2 g mu,  0 = -sqrt2 g beta - M mu.
  const auto solve = [g](cplx D, cplx M, cplx& beta, cplx& mu) {
    beta = -g * M / (D * M - 2.0 * g * g);
    mu = -kSqrt2 * g * beta / M;
  };
  ManifoldAmplitudes a;
  solve(d.d1, d.m1, a.beta1, a.mu1);
  solve(d.d2, d.m2, a.beta2, a.mu2);
  return a;
}

PostJumpStates post_jump_states(const ModelParams& params) {
  const auto a = amplitudes(params);
  const auto pop = populations(a);
  PostJumpStates s;
  s.norm = mixed_norm(a, pop);
  s.alpha1 = a.beta2 / s.norm;
  s.beta1 = kSqrt2 * a.mu2 / s.norm;
  s.alpha2 = a.beta1 / s.norm;
  s.beta2 = kSqrt2 * a.mu1 / s.norm;
  return s;
}

ManifoldAmplitudes post_jump_betas(const ModelParams& params, double tau) {
  const auto a = amplitudes(params);
  const auto pop = populations(a);
  const double n = mixed_norm(a, pop);
  const auto d = detunings(params);
  const cplx e1 = std::exp(-I * d.d1 * tau);
  const cplx e2 = std::exp(-I * d.d2 * tau);
  ManifoldAmplitudes out;
  out.beta1 = kSqrt2 * a.mu2 / n * e1 - a.beta2 * a.beta1 / n * (e1 - 1.0);
  out.beta2 = kSqrt2 * a.mu1 / n * e2 - a.beta1 * a.beta2 / n * (e2 - 1.0);
  return out;
}

CorrelationTrace g2_tau_approx(const ModelParams& params, std::span<const double> tau_grid) {
  const auto sol = solve_weak_excitation(params);
  const auto& a = sol.amplitudes;
  const auto& pop = sol.populations;
  const double denom = pop.p1 * std::norm(a.beta1) + pop.p2 * std::norm(a.beta2);
  CorrelationTrace trace;
  trace.warnings = sol.warnings;
  trace.tau.assign(tau_grid.begin(), tau_grid.end());
  trace.values.reserve(tau_grid.size());
  for (std::size_t k = 0; k < tau_grid.size(); ++k) {
    if (tau_grid[k] < 0.0 || (k > 0 && !(tau_grid[k] > tau_grid[k - 1]))) {
      throw std::invalid_argument("g2_tau_approx: tau grid must be nonnegative and increasing");
    }
    const auto b = post_jump_betas(params, tau_grid[k]);
    trace.values.emplace_back((pop.p2 * std::norm(b.beta1) + pop.p1 * std::norm(b.beta2)) / denom, 0.0);
  }
  return trace;
}

}  // namespace rabisim

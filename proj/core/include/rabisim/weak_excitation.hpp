// weak_excitation.hpp: analytic two-manifold theory for small g.
//
// Between emissions the state lives in one of two manifolds,
//   manifold 1: |0,e> + beta1 |1,g> + mu1 |2,e>
//   manifold 2: |0,g> + beta2 |1,e> + mu2 |2,g>
// and an emission maps one manifold onto the other. With
//   D1 = omega - omega0 - U/2 - i kappa,  D2 = omega + omega0 + U/2 - i kappa
// the quasi-steady amplitudes are beta_k = -g/D_k and
//   mu1 = g^2 / (sqrt2 (omega + U/2 - i kappa) D1),  mu2 = g^2 / (sqrt2 (omega - U/2 - i kappa) D2).
// Everything here is exact evaluation of this truncated theory; higher Fock
// corrections belong to the numerical solvers.

#pragma once

#include "rabisim/correlation.hpp"
#include "rabisim/model.hpp"
#include "rabisim/ode.hpp"
#include "rabisim/solvers.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rabisim {

struct ManifoldAmplitudes {
  cplx beta1{}, mu1{}, beta2{}, mu2{};
};

struct ManifoldPopulations {
  double xi = 0.0;  // |beta2|^2 / |beta1|^2
  double p1 = 0.0;
  double p2 = 0.0;
};

struct WeakExcitationSolution {
  ManifoldAmplitudes amplitudes;
  ManifoldPopulations populations;
  std::vector<std::string> warnings;
};

// Populations are undefined when both beta amplitudes vanish (g = 0).
class UndefinedPopulations : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kRegimeWarningThreshold = 0.3;

ManifoldAmplitudes amplitudes(const ModelParams& params);
ManifoldPopulations populations(const ManifoldAmplitudes& amps);

// Non-empty when |beta| or |mu/beta| exceeds 0.3 in either manifold.
std::vector<std::string> regime_warnings(const ManifoldAmplitudes& amps);

WeakExcitationSolution solve_weak_excitation(const ModelParams& params);

// Closed forms for <a†a>, <sz> and g2(0). g2_zero is always set.
Observables closed_form_observables(const ModelParams& params);

// Closed-form features of the U dependence at fixed omega0, omega, g, kappa.
struct LimitResults {
  double resonance_U = 0.0;            // -2 omega0: photon-number maximum, inversion zero
  double peak_photon_number = 0.0;     // g^2 / (omega^2 + kappa^2)
  double lorentzian_half_width = 0.0;  // 2 sqrt(omega^2 + kappa^2), in U
  double inversion_at_lower = 0.0;     // at U = -2 omega0 - 2 omega: +2 omega^2 / (2 omega^2 + kappa^2)
  double inversion_at_upper = 0.0;     // at U = -2 omega0 + 2 omega: -2 omega^2 / (2 omega^2 + kappa^2)
  double g2_at_resonance = 0.0;        // g2(0) at U = -2 omega0
  double g2_large_omega0 = 0.0;        // (omega^2 + kappa^2) / (omega0^2 + kappa^2)
};

LimitResults limit_results(const ModelParams& params);

// Start of the amplitude equations of motion. alpha1 and alpha2 are the
// (frozen) vacuum amplitudes that drive each manifold; 1 reproduces the
// steady-state problem.
struct TransientInitial {
  ManifoldAmplitudes amplitudes{};
  cplx alpha1{1.0, 0.0};
  cplx alpha2{1.0, 0.0};
};

// Integrates the two decoupled 2x2 systems
//   beta1' = -i g alpha1 - i D1 beta1 - i sqrt2 g mu1,  mu1' = -i sqrt2 g beta1 - i (2 omega + U - 2 i kappa) mu1
//   beta2' = -i g alpha2 - i D2 beta2 - i sqrt2 g mu2,  mu2' = -i sqrt2 g beta2 - i (2 omega - U - 2 i kappa) mu2
// with the same tolerances as the master-equation integrator. t_grid starts at 0.
std::vector<ManifoldAmplitudes> transient_amplitudes(const ModelParams& params, std::span<const double> t_grid,
                                                     const TransientInitial& initial = {},
                                                     const OdeOptions& options = {});

// Exact fixed point of the transient system for alpha1 = alpha2 = 1. Agrees
// with amplitudes() up to O(g^3) corrections.
ManifoldAmplitudes transient_fixed_point(const ModelParams& params);

// States right after an emission from the mixed steady state, normalised by
// the common factor sqrt(p1 |beta1|^2 + p2 |beta2|^2) (the two kets are not
// individually unit norm):
//   |psi1~> = (beta2 |0,e> + sqrt2 mu2 |1,g>) / norm,  |psi2~> = (beta1 |0,g> + sqrt2 mu1 |1,e>) / norm.
struct PostJumpStates {
  cplx alpha1{}, beta1{};  // manifold 1, reached from manifold 2
  cplx alpha2{}, beta2{};  // manifold 2, reached from manifold 1
  double norm = 0.0;
};

PostJumpStates post_jump_states(const ModelParams& params);

// Small-g closed-form beta~(tau) with frozen alpha~.
ManifoldAmplitudes post_jump_betas(const ModelParams& params, double tau);

// g2(tau) = [p2 |beta1~(tau)|^2 + p1 |beta2~(tau)|^2] / [p1 |beta1|^2 + p2 |beta2|^2].
// Regime warnings are copied into the trace.
CorrelationTrace g2_tau_approx(const ModelParams& params, std::span<const double> tau_grid);

}  // namespace rabisim

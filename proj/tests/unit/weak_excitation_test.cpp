#include "rabisim/weak_excitation.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace rabisim;

namespace {

ModelParams weak(double U, double omega0 = 10.0) { return {omega0, 1.0, 0.1, U, 0.2}; }

double hwhm_right(const ModelParams& base) {
  // Bisection for the half-maximum crossing of the closed-form photon number above U = -2 omega0.
  const double peak = closed_form_observables({base.omega0, base.omega, base.g, -2 * base.omega0, base.kappa}).photon_number;
  double lo = -2 * base.omega0, hi = -2 * base.omega0 + 50;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    ModelParams p = base;
    p.U = mid;
    (closed_form_observables(p).photon_number > 0.5 * peak ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) + 2 * base.omega0;
}

}  // namespace

TEST(Amplitudes, SymmetricAtResonance) {
  const ModelParams p = weak(-20);
  const auto a = amplitudes(p);
  const double expected = p.g * p.g / (p.omega * p.omega + p.kappa * p.kappa);
  EXPECT_NEAR(std::norm(a.beta1), expected, 1e-16);
  EXPECT_NEAR(std::norm(a.beta2), expected, 1e-16);
}

TEST(Amplitudes, ExplicitFormulas) {
  const ModelParams p{7.0, 1.3, 0.2, -3.1, 0.4};
  const auto a = amplitudes(p);
  const cplx k(0, p.kappa);
  EXPECT_NEAR(std::abs(a.beta1 - (-p.g / (p.omega - p.omega0 - p.U / 2 - k))), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(a.beta2 - (-p.g / (p.omega + p.omega0 + p.U / 2 - k))), 0.0, 1e-16);
  // mu = -sqrt2 g beta / (2 omega +- U - 2 i kappa), the leading-order mu equation fixed point.
  EXPECT_NEAR(std::abs(a.mu1 - (-std::sqrt(2.0) * p.g * a.beta1 / (2 * p.omega + p.U - 2.0 * k))), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(a.mu2 - (-std::sqrt(2.0) * p.g * a.beta2 / (2 * p.omega - p.U - 2.0 * k))), 0.0, 1e-16);
}

TEST(Amplitudes, ZeroCoupling) {
  ModelParams p = weak(-20);
  p.g = 0.0;
  const auto a = amplitudes(p);
  EXPECT_EQ(a.beta1, cplx(0.0));
  EXPECT_EQ(a.mu1, cplx(0.0));
  EXPECT_EQ(a.beta2, cplx(0.0));
  EXPECT_EQ(a.mu2, cplx(0.0));
  EXPECT_THROW(populations(a), UndefinedPopulations);
}

TEST(Populations, DegeneracyPoints) {
  ModelParams p = weak(-20 + 2);
  auto pop = populations(amplitudes(p));
  EXPECT_NEAR(pop.xi, 0.04 / 4.04, 1e-14);
  EXPECT_NEAR(pop.p2, 0.990, 5e-4);

  p.U = -20 - 2;
  pop = populations(amplitudes(p));
  EXPECT_NEAR(pop.xi, 4.04 / 0.04, 1e-9);
  EXPECT_NEAR(pop.p1, 0.990, 5e-4);

  p.U = -20;
  pop = populations(amplitudes(p));
  EXPECT_DOUBLE_EQ(pop.p1, 0.5);
  EXPECT_DOUBLE_EQ(pop.p2, 0.5);
}

TEST(Populations, Invariants) {
  for (double U = -30; U <= 10; U += 0.37) {
    const auto pop = populations(amplitudes(weak(U)));
    EXPECT_DOUBLE_EQ(pop.p1 + pop.p2, 1.0);
    EXPECT_LT(std::abs(pop.p1 / pop.p2 - pop.xi) / pop.xi, 1e-12);
  }
}

TEST(ClosedForm, ResonanceValues) {
  const auto o = closed_form_observables(weak(-20));
  EXPECT_NEAR(o.inversion, 0.0, 1e-16);
  EXPECT_NEAR(*o.g2_zero, 0.52 * (1 / 81.04 + 1 / 121.04), 1e-14);
  EXPECT_NEAR(*o.g2_zero, 0.0107, 5e-5);
  EXPECT_NEAR(closed_form_observables(weak(-18)).inversion, -2 / 2.04, 1e-14);
  EXPECT_NEAR(closed_form_observables(weak(-22)).inversion, 2 / 2.04, 1e-14);
}

TEST(ClosedForm, MatchesAmplitudeExpressions) {
  for (double U : {-25.0, -20.5, -17.0, -3.0, 0.7, 5.0}) {
    for (double w0 : {2.0, 5.0, 10.0}) {
      const ModelParams p = weak(U, w0);
      const auto a = amplitudes(p);
      const auto pop = populations(a);
      const double n = pop.p1 * std::norm(a.beta1) + pop.p2 * std::norm(a.beta2);
      const double sz = pop.p1 * (1 - std::norm(a.beta1)) - pop.p2 * (1 - std::norm(a.beta2));
      const double g2 = 2 * (pop.p1 * std::norm(a.mu1) + pop.p2 * std::norm(a.mu2)) / (n * n);
      const auto o = closed_form_observables(p);
      EXPECT_LT(test::rel_diff(o.photon_number, n), 1e-12);
      EXPECT_NEAR(o.inversion, sz, 1e-12);
      EXPECT_LT(test::rel_diff(*o.g2_zero, g2), 1e-12);
    }
  }
}

TEST(ClosedForm, LorentzianHalfWidth) {
  for (double w0 : {2.0, 5.0, 10.0}) {
    const ModelParams p = weak(-2 * w0, w0);
    EXPECT_NEAR(hwhm_right(p), limit_results(p).lorentzian_half_width, 1e-6);
    EXPECT_NEAR(limit_results(p).lorentzian_half_width, 2 * std::sqrt(1.04), 1e-15);
  }
}

TEST(ClosedForm, LimitResultsConsistent) {
  const ModelParams p = weak(-20);
  const auto r = limit_results(p);
  EXPECT_DOUBLE_EQ(r.resonance_U, -20.0);
  EXPECT_NEAR(r.peak_photon_number, closed_form_observables(p).photon_number, 1e-16);
  EXPECT_NEAR(r.g2_at_resonance, *closed_form_observables(p).g2_zero, 1e-14);
  EXPECT_NEAR(r.inversion_at_upper, closed_form_observables(weak(-18)).inversion, 1e-14);
  EXPECT_NEAR(r.inversion_at_lower, closed_form_observables(weak(-22)).inversion, 1e-14);
  EXPECT_NEAR(r.g2_large_omega0, 1.04 / 100.04, 1e-15);
}

TEST(ClosedForm, LimitChainTowardOmegaRatio) {
  double previous = 1e300;
  for (double kappa : {0.2, 0.1, 0.05}) {
    ModelParams p = weak(-20);
    p.kappa = kappa;
    const double dist = std::abs(*closed_form_observables(p).g2_zero - 0.01);
    EXPECT_LT(dist, previous);
    previous = dist;
  }
}

TEST(ClosedForm, ScaleInvariance) {
  const ModelParams p{10.0, 1.0, 0.1, -17.3, 0.2};
  const auto o = closed_form_observables(p);
  const auto pop = populations(amplitudes(p));
  for (double f : {0.01, 3.0, 250.0}) {
    const auto os = closed_form_observables(p.scaled(f));
    const auto ps = populations(amplitudes(p.scaled(f)));
    EXPECT_NEAR(os.inversion, o.inversion, 1e-12);
    EXPECT_NEAR(*os.g2_zero, *o.g2_zero, 1e-12 * *o.g2_zero);
    EXPECT_NEAR(ps.p1, pop.p1, 1e-12);
    EXPECT_NEAR(ps.p2, pop.p2, 1e-12);
    EXPECT_NEAR(ps.xi, pop.xi, 1e-12 * pop.xi);
  }
}

TEST(Regime, Warnings) {
  EXPECT_TRUE(solve_weak_excitation(weak(-20)).warnings.empty());
  ModelParams strong = weak(-20);
  strong.g = 2.0;
  EXPECT_FALSE(solve_weak_excitation(strong).warnings.empty());
  EXPECT_FALSE(g2_tau_approx(strong, std::vector<double>{0.0}).warnings.empty());
}

TEST(Transient, ZeroCouplingStaysZero) {
  ModelParams p = weak(-20);
  p.g = 0.0;
  std::vector<double> grid{0, 1, 5, 20};
  for (const auto& a : transient_amplitudes(p, grid)) {
    EXPECT_EQ(std::abs(a.beta1) + std::abs(a.mu1) + std::abs(a.beta2) + std::abs(a.mu2), 0.0);
  }
}

TEST(Transient, LongTimeLimitIsFixedPoint) {
  std::vector<double> grid{0, 100, 250};
  for (double U : {-20.0, -18.0, -7.0}) {
    const ModelParams p = weak(U);
    const auto a = transient_amplitudes(p, grid).back();
    const auto fp = transient_fixed_point(p);
    EXPECT_LT(std::abs(a.beta1 - fp.beta1), 1e-9);
    EXPECT_LT(std::abs(a.beta2 - fp.beta2), 1e-9);
    EXPECT_LT(std::abs(a.mu1 - fp.mu1), 1e-9);
    EXPECT_LT(std::abs(a.mu2 - fp.mu2), 1e-9);
  }
}

TEST(Transient, SmallCouplingReproducesQuasiSteadyAmplitudes) {
  std::vector<double> grid{0, 100, 250};
  ModelParams p = weak(-20);
  p.g = 1e-3;
  const auto a = transient_amplitudes(p, grid).back();
  const auto ss = amplitudes(p);
  EXPECT_LT(std::abs(a.beta1 - ss.beta1), 1e-8);
  EXPECT_LT(std::abs(a.beta2 - ss.beta2), 1e-8);
  EXPECT_LT(std::abs(a.mu1 - ss.mu1), 1e-8);
  EXPECT_LT(std::abs(a.mu2 - ss.mu2), 1e-8);
}

TEST(Transient, PostJumpEvolutionMatchesClosedForm) {
  ModelParams p = weak(-20);
  p.g = 1e-3;
  const auto pj = post_jump_states(p);
  TransientInitial init;
  init.alpha1 = pj.alpha1;
  init.alpha2 = pj.alpha2;
  init.amplitudes.beta1 = pj.beta1;
  init.amplitudes.beta2 = pj.beta2;
  std::vector<double> grid;
  for (int k = 0; k <= 40; ++k) grid.push_back(0.25 * k);
  const auto traj = transient_amplitudes(p, grid, init);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto closed = post_jump_betas(p, grid[k]);
    const double scale = std::abs(pj.alpha1) * std::abs(amplitudes(p).beta1);
    EXPECT_LT(std::abs(traj[k].beta1 - closed.beta1), 1e-5 * scale) << grid[k];
    EXPECT_LT(std::abs(traj[k].beta2 - closed.beta2), 1e-5 * scale) << grid[k];
  }
}

TEST(PostJump, StatesFromSteadyAmplitudes) {
  const ModelParams p = weak(-17);
  const auto a = amplitudes(p);
  const auto pop = populations(a);
  const auto pj = post_jump_states(p);
  const double n = std::sqrt(pop.p1 * std::norm(a.beta1) + pop.p2 * std::norm(a.beta2));
  EXPECT_NEAR(pj.norm, n, 1e-15);
  EXPECT_NEAR(std::abs(pj.alpha1 - a.beta2 / n), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(pj.beta1 - std::sqrt(2.0) * a.mu2 / n), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(pj.alpha2 - a.beta1 / n), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(pj.beta2 - std::sqrt(2.0) * a.mu1 / n), 0.0, 1e-14);
  const auto b0 = post_jump_betas(p, 0.0);
  EXPECT_NEAR(std::abs(b0.beta1 - pj.beta1), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(b0.beta2 - pj.beta2), 0.0, 1e-15);
}

TEST(G2TauApprox, StartsAtClosedFormG2) {
  for (double U : {-20.0, -18.0, -16.0, -10.0}) {
    const ModelParams p{50.0, 5.0, 0.5, U * 5, 1.0};
    const auto tr = g2_tau_approx(p, std::vector<double>{0.0, 0.1});
    EXPECT_LT(test::rel_diff(tr.values[0].real(), *closed_form_observables(p).g2_zero), 1e-10);
    EXPECT_EQ(tr.values[0].imag(), 0.0);
  }
}

TEST(G2TauApprox, RelaxesToUnity) {
  const ModelParams p{50.0, 5.0, 0.5, -100.0, 1.0};
  const auto tr = g2_tau_approx(p, std::vector<double>{0.0, 50.0});
  EXPECT_NEAR(tr.values[1].real(), 1.0, 1e-3);
}

TEST(G2TauApprox, RejectsBadGrid) {
  EXPECT_THROW(g2_tau_approx(weak(-20), std::vector<double>{0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(g2_tau_approx(weak(-20), std::vector<double>{-1.0}), std::invalid_argument);
}

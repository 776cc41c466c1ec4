#include "rabisim/solvers.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace rabisim;

namespace {

ModelParams weak(double U) { return {10.0, 1.0, 0.1, U, 0.2}; }

// Closed-form weak-excitation values written out independently of the library.
double oracle_photons(const ModelParams& p) {
  const double s = p.omega0 + p.U / 2;
  return p.g * p.g / (s * s + p.omega * p.omega + p.kappa * p.kappa);
}
double oracle_g2(const ModelParams& p) {
  const double s = p.omega0 + p.U / 2, k2 = p.kappa * p.kappa;
  const double a = p.omega + p.U / 2, b = p.omega - p.U / 2;
  return 0.5 * (p.omega * p.omega + s * s + k2) * (1 / (a * a + k2) + 1 / (b * b + k2));
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace

TEST(SteadyState, DegenerateAtZeroCoupling) {
  ModelParams p = weak(-20);
  p.g = 0.0;
  EXPECT_THROW(steady_state(liouvillian(p, make_space(6))), DegenerateSteadyState);
}

TEST(SteadyState, WeakRegimeAtResonance) {
  const ModelParams p = weak(-20);
  const auto ss = steady_state(liouvillian(p, make_space()));
  EXPECT_TRUE(ss.converged);
  EXPECT_LT(ss.residual, kSteadyResidualTol);
  EXPECT_GT(ss.uniqueness_ratio, kNullSpaceRatio);
  EXPECT_EQ(ss.n_max_used, kDefaultNMax);
  const auto obs = observables(ss.rho);
  EXPECT_NEAR(oracle_photons(p), 0.1 * 0.1 / (1 + 0.04), 1e-15);
  EXPECT_LT(test::rel_diff(obs.photon_number, oracle_photons(p)), 0.05);
  EXPECT_NEAR(obs.inversion, 0.0, 0.02);
  ASSERT_TRUE(obs.g2_zero.has_value());
  EXPECT_NEAR(oracle_g2(p), 0.52 * (1 / 81.04 + 1 / 121.04), 1e-12);
  EXPECT_LT(test::rel_diff(*obs.g2_zero, oracle_g2(p)), 0.10);
}

TEST(SteadyState, PhysicalStateAndZeroField) {
  for (double U : {-24.0, -20.0, -18.0, -5.0, 4.0}) {
    const auto ss = steady_state(liouvillian(weak(U), make_space()));
    EXPECT_GE(ss.rho.min_eigenvalue(), -1e-10) << U;
    EXPECT_LT(hermiticity_error(ss.rho.dense()), 1e-12);
    EXPECT_NEAR(ss.rho.dense().trace().real(), 1.0, 1e-12);
    EXPECT_LT(std::abs(field_amplitude(ss.rho)), 1e-10) << U;
    const auto obs = observables(ss.rho);
    EXPECT_GE(obs.photon_number, 0.0);
    EXPECT_LE(std::abs(obs.inversion), 1 + 1e-9);
  }
}

TEST(SteadyState, SpectralGapAboveZero) {
  // Second-smallest |eigenvalue| of L bounded away from zero.
  for (double U : {-22.0, -20.0, -18.0}) {
    const ModelParams p = weak(U);
    const auto L = liouvillian(p, make_space(5));
    Eigen::VectorXd mags = Eigen::ComplexEigenSolver<DenseMatrix>(L.dense(), false).eigenvalues().cwiseAbs();
    std::sort(mags.begin(), mags.end());
    EXPECT_LT(mags(0), 1e-10);
    EXPECT_GT(mags(1), 1e-6 * p.kappa);
  }
}

TEST(SteadyState, DirectNullVectorAgreement) {
  // Oracle: null vector of the dense L by full eigendecomposition.
  const ModelParams p{4.0, 1.0, 0.3, -6.0, 0.25};
  const auto space = make_space(4);
  const auto L = liouvillian(p, space);
  Eigen::ComplexEigenSolver<DenseMatrix> es(L.dense());
  Eigen::Index k;
  es.eigenvalues().cwiseAbs().minCoeff(&k);
  DenseMatrix rho = unvectorize(es.eigenvectors().col(k), space.dim());
  rho /= rho.trace();
  const auto ss = steady_state(L);
  EXPECT_LT((ss.rho.dense() - rho).norm(), 1e-9);
}

TEST(Observables, SimpleStates) {
  const auto space = make_space(3);
  const auto one = DensityMatrix::pure(basis_state(space, 1, Qubit::e));
  const auto o1 = observables(one);
  EXPECT_DOUBLE_EQ(o1.photon_number, 1.0);
  ASSERT_TRUE(o1.g2_zero.has_value());
  EXPECT_DOUBLE_EQ(*o1.g2_zero, 0.0);

  DenseMatrix mix = DenseMatrix::Zero(space.dim(), space.dim());
  mix(space.index(0, Qubit::g), space.index(0, Qubit::g)) = 0.5;
  mix(space.index(2, Qubit::g), space.index(2, Qubit::g)) = 0.5;
  const auto o2 = observables(DensityMatrix(space, mix));
  EXPECT_DOUBLE_EQ(o2.photon_number, 1.0);
  EXPECT_DOUBLE_EQ(*o2.g2_zero, 1.0);
  EXPECT_DOUBLE_EQ(o2.inversion, -1.0);

  EXPECT_FALSE(observables(DensityMatrix::pure(basis_state(space, 0, Qubit::g))).g2_zero.has_value());
}

TEST(Propagate, FixedPoint) {
  const auto L = liouvillian(weak(-20), make_space(8));
  const auto ss = steady_state(L);
  const auto grid = linspace(0, 20, 11);
  for (Integrator method : {Integrator::runge_kutta, Integrator::exponential}) {
    const auto out = propagate(L, ss.rho, grid, {method});
    ASSERT_EQ(out.states.size(), grid.size());
    for (const auto& s : out.states) EXPECT_LT(trace_distance(s.dense(), ss.rho.dense()), 1e-9);
  }
}

TEST(Propagate, PhotonDecay) {
  ModelParams p = weak(-20);
  p.g = 0.0;
  const auto space = make_space(4);
  const auto L = liouvillian(p, space);
  const auto grid = linspace(0, 10, 21);
  for (Integrator method : {Integrator::runge_kutta, Integrator::exponential}) {
    const auto out = propagate(L, DensityMatrix::pure(basis_state(space, 1, Qubit::g)), grid, {method});
    for (std::size_t k = 0; k < grid.size(); ++k) {
      EXPECT_NEAR(observables(out.states[k]).photon_number, std::exp(-2 * p.kappa * grid[k]), 1e-8);
    }
  }
}

TEST(Propagate, ApproachesSteadyState) {
  const ModelParams p = weak(-20);
  const auto space = make_space(8);
  const auto L = liouvillian(p, space);
  const auto ss = steady_state(L);
  const std::vector<double> grid{0, 50, 100, 200, 400};
  const auto rho0 = DensityMatrix::pure(basis_state(space, 0, Qubit::e));
  const auto rk = propagate(L, rho0, grid);
  const auto ex = propagate(L, rho0, grid, {Integrator::exponential});
  EXPECT_FALSE(rk.drift_exceeded);
  double last = 1e300;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double dist = trace_distance(rk.states[k].dense(), ss.rho.dense());
    EXPECT_LT(dist, last + 1e-12);
    last = dist;
    EXPECT_LT(trace_distance(rk.states[k].dense(), ex.states[k].dense()), 1e-7);
  }
  EXPECT_NEAR(observables(rk.states.back()).photon_number, observables(ss.rho).photon_number, 1e-6);
}

TEST(Propagate, RejectsBadGrid) {
  const auto space = make_space(3);
  const auto L = liouvillian(weak(-20), space);
  const auto rho = DensityMatrix::pure(basis_state(space, 0, Qubit::g));
  const std::vector<double> shifted{1.0, 2.0};
  const std::vector<double> decreasing{0.0, 2.0, 1.0};
  EXPECT_THROW(propagate(L, rho, shifted), std::invalid_argument);
  EXPECT_THROW(propagate(L, rho, decreasing), std::invalid_argument);
}

TEST(Propagate, StepFailureReported) {
  const auto space = make_space(3);
  const auto L = liouvillian(weak(-20), space);
  const auto rho = DensityMatrix::pure(basis_state(space, 0, Qubit::e));
  PropagateOptions opt;
  opt.ode.max_steps = 5;
  const std::vector<double> grid{0.0, 100.0};
  EXPECT_THROW(propagate(L, rho, grid, opt), StepSizeError);
}

TEST(ConvergeCutoff, WeakRegimeConvergesImmediately) {
  const auto r = converge_cutoff(weak(-20), {}, 1e-8);
  EXPECT_EQ(r.n_max_used, 15);
  ASSERT_TRUE(r.cutoff_change.has_value());
  EXPECT_LT(*r.cutoff_change, 1e-8);
}

TEST(ConvergeCutoff, StrongCouplingStable) {
  ModelParams p = weak(-20);
  p.g = 2.0;
  const double tol = 1e-6;
  const auto r = converge_cutoff(p, {}, tol);
  EXPECT_GE(r.n_max_used, 15);
  const auto check = steady_state(liouvillian(p, make_space(r.n_max_used + 8)));
  const auto a = observables(r.rho);
  const auto b = observables(check.rho);
  EXPECT_LT(std::abs(a.photon_number - b.photon_number), 10 * tol);
  EXPECT_LT(std::abs(*a.g2_zero - *b.g2_zero), 10 * tol);
}

TEST(ConvergeCutoff, Preconditions) {
  EXPECT_THROW(converge_cutoff(weak(-20), {}, 0.0), std::invalid_argument);
  CutoffOptions tiny{2, 1, 3};
  ModelParams strong = weak(-20);
  strong.g = 2.0;
  EXPECT_THROW(converge_cutoff(strong, {}, 1e-12, tiny), CutoffNotConverged);
}

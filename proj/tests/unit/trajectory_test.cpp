#include "rabisim/trajectory.hpp"

#include "rabisim/solvers.hpp"
#include "rabisim/weak_excitation.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace rabisim;

namespace {

// Asymptotic Kolmogorov distribution tail P(sqrt(n) D > x).
double kolmogorov_tail(double x) {
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) p += 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * x * x);
  return std::clamp(p, 0.0, 1.0);
}

StateVector superposition(const SpaceSpec& space, std::initializer_list<std::pair<int, Qubit>> terms) {
  DenseVector v = DenseVector::Zero(space.dim());
  for (auto [n, s] : terms) v(space.index(n, s)) = 1.0;
  return StateVector(space, v.normalized());
}

}  // namespace

TEST(ManifoldClassify, Examples) {
  const auto space = make_space(4);
  EXPECT_EQ(manifold_classify(basis_state(space, 0, Qubit::e)), ManifoldLabel::one);
  EXPECT_EQ(manifold_classify(basis_state(space, 1, Qubit::g)), ManifoldLabel::one);
  EXPECT_EQ(manifold_classify(basis_state(space, 0, Qubit::g)), ManifoldLabel::two);
  EXPECT_EQ(manifold_classify(basis_state(space, 1, Qubit::e)), ManifoldLabel::two);
  EXPECT_EQ(manifold_classify(superposition(space, {{0, Qubit::e}, {0, Qubit::g}})), ManifoldLabel::mixed);
  DenseVector v = DenseVector::Zero(space.dim());
  v(space.index(0, Qubit::e)) = std::sqrt(0.9995);
  v(space.index(0, Qubit::g)) = std::sqrt(0.0005);
  EXPECT_EQ(manifold_classify(StateVector(space, v)), ManifoldLabel::one);
}

TEST(ManifoldClosure, HamiltonianAndJumpOperator) {
  const auto space = make_space(6);
  const DenseMatrix H = hamiltonian({10.0, 1.0, 0.7, -13.0, 0.2}, space).dense();
  const DenseMatrix Heff = effective_hamiltonian({10.0, 1.0, 0.7, -13.0, 0.2}, space).dense();
  const DenseMatrix a = annihilation(space).dense();
  for (int i = 0; i < space.dim(); ++i) {
    for (int j = 0; j < space.dim(); ++j) {
      if (manifold_of_index(i) != manifold_of_index(j)) {
        EXPECT_EQ(H(j, i), cplx(0.0));
        EXPECT_EQ(Heff(j, i), cplx(0.0));
      } else {
        EXPECT_EQ(a(j, i), cplx(0.0));
      }
    }
  }
}

TEST(TrajectoryConfig, Validation) {
  TrajectoryConfig c;
  EXPECT_NO_THROW(c.validate());
  c.t_burn = c.t_total;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.dt_max = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.n_trajectories = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.sample_times = {1.0, 1.0};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.sample_times = {2.0 * c.t_total};
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(RunTrajectory, RejectsUnnormalisedInitialState) {
  const auto space = make_space(3);
  const StateVector bad(space, 2.0 * basis_state(space, 0, Qubit::e).amplitudes());
  EXPECT_THROW(run_trajectory({10.0, 1.0, 0.1, -20.0, 0.2}, space, {}, bad), std::invalid_argument);
  EXPECT_THROW(run_trajectory({10.0, 1.0, 0.1, -20.0, 0.2}, space, {}, basis_state(make_space(4), 0, Qubit::e)),
               SpaceMismatch);
}

TEST(RunTrajectory, DarkStateNeverJumps) {
  const auto space = make_space(4);
  TrajectoryConfig c;
  c.t_total = 500.0;
  c.dt_max = 1.0;
  const auto psi0 = basis_state(space, 0, Qubit::g);
  const auto rec = run_trajectory({10.0, 1.0, 0.0, -20.0, 0.2}, space, c, psi0);
  EXPECT_TRUE(rec.jump_times.empty());
  ASSERT_EQ(rec.manifold_labels.size(), 1u);
  EXPECT_EQ(rec.manifold_labels[0], ManifoldLabel::two);
  // Unchanged up to the global phase exp(+i omega0 t / 2).
  EXPECT_NEAR(std::abs(rec.final_state.amplitudes().dot(psi0.amplitudes())), 1.0, 1e-12);
}

TEST(RunTrajectory, SingleDecayIsExponential) {
  const ModelParams p{10.0, 1.0, 0.0, -20.0, 0.2};
  const auto space = make_space(3);
  TrajectoryConfig c;
  c.t_total = 60.0 / p.kappa;
  c.dt_max = 2.0;
  c.n_trajectories = 10000;
  c.seed = 12345;
  const auto recs = run_ensemble(p, space, c, basis_state(space, 1, Qubit::g));
  std::vector<double> times;
  for (const auto& r : recs) {
    ASSERT_EQ(r.jump_times.size(), 1u);
    ASSERT_EQ(r.manifold_labels.size(), 2u);
    EXPECT_EQ(r.manifold_labels[0], ManifoldLabel::one);
    EXPECT_EQ(r.manifold_labels[1], ManifoldLabel::two);
    times.push_back(r.jump_times[0]);
  }
  std::sort(times.begin(), times.end());
  const double rate = 2.0 * p.kappa;
  double d = 0.0;
  const auto n = static_cast<double>(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double cdf = 1.0 - std::exp(-rate * times[i]);
    d = std::max({d, cdf - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - cdf});
  }
  const double pvalue = kolmogorov_tail(std::sqrt(n) * d);
  EXPECT_GT(pvalue, 0.01) << "D = " << d;
}

TEST(RunTrajectory, JumpTimeIndependentOfStepSize) {
  const ModelParams p{10.0, 1.0, 0.0, -20.0, 0.2};
  const auto space = make_space(3);
  TrajectoryConfig c;
  c.t_total = 400.0;
  c.seed = 7;
  std::vector<double> t;
  for (double dt : {1.0, 0.37, 0.01}) {
    c.dt_max = dt;
    const auto rec = run_trajectory(p, space, c, basis_state(space, 1, Qubit::g));
    ASSERT_EQ(rec.jump_times.size(), 1u);
    t.push_back(rec.jump_times[0]);
  }
  EXPECT_NEAR(t[1], t[0], 1e-9 * t[0]);
  EXPECT_NEAR(t[2], t[0], 1e-9 * t[0]);
}

TEST(RunTrajectory, DeterministicPerSeedAndIndependentOfJobs) {
  const ModelParams p{10.0, 1.0, 0.3, -18.0, 0.2};
  const auto space = make_space(5);
  TrajectoryConfig c;
  c.t_total = 2000.0;
  c.dt_max = 0.5;
  c.n_trajectories = 6;
  c.seed = 99;
  const auto psi0 = basis_state(space, 0, Qubit::g);
  const auto a = run_ensemble(p, space, c, psi0, 1);
  const auto b = run_ensemble(p, space, c, psi0, 3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].index, static_cast<int>(i));
    EXPECT_EQ(a[i].jump_times, b[i].jump_times);  // bit-for-bit
    EXPECT_FALSE(a[i].jump_times.empty());
  }
  EXPECT_NE(a[0].jump_times, a[1].jump_times);
  c.seed = 100;
  EXPECT_NE(run_ensemble(p, space, c, psi0)[0].jump_times, a[0].jump_times);
}

TEST(RunTrajectory, LabelsAlternate) {
  const ModelParams p{10.0, 1.0, 0.5, -20.0, 0.2};
  const auto space = make_space(6);
  TrajectoryConfig c;
  c.t_total = 5000.0;
  c.dt_max = 0.5;
  const auto rec = run_trajectory(p, space, c, basis_state(space, 0, Qubit::g));
  ASSERT_GT(rec.jump_times.size(), 20u);
  ASSERT_EQ(rec.manifold_labels.size(), rec.jump_times.size() + 1);
  for (std::size_t i = 0; i + 1 < rec.manifold_labels.size(); ++i)
    EXPECT_NE(rec.manifold_labels[i], rec.manifold_labels[i + 1]);
  EXPECT_TRUE(std::is_sorted(rec.jump_times.begin(), rec.jump_times.end()));
}

TEST(RunTrajectory, EnsembleAverageMatchesMasterEquation) {
  const ModelParams p{10.0, 1.0, 0.4, -18.0, 0.3};
  const auto space = make_space(6);
  const std::vector<double> checkpoints{0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
  TrajectoryConfig c;
  c.t_total = checkpoints.back();
  c.dt_max = 0.25;
  c.n_trajectories = 1000;
  c.seed = 2024;
  c.sample_times = checkpoints;
  const auto psi0 = superposition(space, {{0, Qubit::e}, {1, Qubit::e}});
  const auto recs = run_ensemble(p, space, c, psi0);

  std::vector<double> grid{0.0};
  grid.insert(grid.end(), checkpoints.begin(), checkpoints.end());
  PropagateOptions opt;
  opt.method = Integrator::exponential;
  const auto exact = propagate(liouvillian(p, space), DensityMatrix::pure(psi0), grid, opt);

  const QuantumOperator n_op = number_op(space), sz = pauli(space, Pauli::z);
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    const auto& rho = exact.states[k + 1];
    const double ref[3] = {expectation(n_op, rho).real(), expectation(sz, rho).real(), manifold_one_population(rho)};
    double sum[3] = {}, sq[3] = {};
    for (const auto& r : recs) {
      const auto& psi = r.samples[k];
      double p1 = 0.0;
      for (int i = 0; i < space.dim(); ++i)
        if (manifold_of_index(i) == 1) p1 += std::norm(psi[i]);
      const double x[3] = {expectation(n_op, psi).real(), expectation(sz, psi).real(), p1};
      for (int q = 0; q < 3; ++q) {
        sum[q] += x[q];
        sq[q] += x[q] * x[q];
      }
    }
    const double N = static_cast<double>(recs.size());
    for (int q = 0; q < 3; ++q) {
      const double mean = sum[q] / N;
      const double se = std::sqrt(std::max(sq[q] / N - mean * mean, 0.0) / (N - 1));
      EXPECT_LE(std::abs(mean - ref[q]), 5.0 * se + 1e-12) << "t = " << checkpoints[k] << " observable " << q;
    }
  }
}

TEST(EstimateObservables, SyntheticRecord) {
  const auto space = make_space(3);
  TrajectoryRecord rec{0, 0, 10.0, 110.0, {}, {}, {}, {}, {}, basis_state(space, 0, Qubit::e)};
  // Jumps every 2 time units from t = 1; manifold 1 before odd-numbered jumps.
  for (double t = 1.0; t < 110.0; t += 2.0) rec.jump_times.push_back(t);
  for (std::size_t i = 0; i <= rec.jump_times.size(); ++i) {
    rec.manifold_labels.push_back(i % 2 == 0 ? ManifoldLabel::one : ManifoldLabel::two);
    const double start = i == 0 ? 0.0 : rec.jump_times[i - 1];
    const double end = i < rec.jump_times.size() ? rec.jump_times[i] : 110.0;
    const double dur = std::max(0.0, end - std::max(start, 10.0));
    rec.sz_integrals.push_back(i % 2 == 0 ? dur : -dur);
    rec.photon_integrals.push_back(0.25 * dur);
  }
  const ModelParams p{10.0, 1.0, 0.1, -20.0, 0.25};
  const auto est = estimate_observables({rec}, p);
  EXPECT_EQ(est.jumps, 50);
  EXPECT_DOUBLE_EQ(est.elapsed, 100.0);
  EXPECT_NEAR(est.flux.value, 0.5, 1e-12);
  EXPECT_NEAR(est.photon_number.value, 1.0, 1e-12);
  EXPECT_NEAR(est.photon_number_direct.value, 0.25, 1e-12);
  EXPECT_NEAR(est.inversion.value, 0.0, 1e-12);
  EXPECT_NEAR(est.manifold_one_fraction.value, 0.5, 1e-12);
  EXPECT_NEAR(est.manifold_two_fraction.value, 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(est.alternation_rate, 1.0);
  EXPECT_EQ(est.g2_zero.value, 0.0);  // no two jumps closer than 0.05
  ASSERT_EQ(est.g2_bins.size(), 3u);
  EXPECT_FALSE(est.warnings.empty());  // fewer than 100 jumps
}

TEST(EstimateObservables, DegeneracyPointOccupancy) {
  // U = -2 omega0 + 2 omega: manifold 2 holds ~99% of the time.
  const ModelParams p{10.0, 1.0, 0.1, -18.0, 0.2};
  const auto space = make_space(5);
  TrajectoryConfig c;
  c.t_burn = default_burn_in(p);
  c.t_total = c.t_burn + 1.5e6;
  c.dt_max = 1.0;
  c.seed = 5;
  const auto rec = run_trajectory(p, space, c, basis_state(space, 0, Qubit::g));
  const auto est = estimate_observables({rec}, p);
  const auto ss = steady_state(liouvillian(p, space));
  const double p1 = manifold_one_population(ss.rho);
  const double n = observables(ss.rho).photon_number;
  EXPECT_GT(est.jumps, 1000);
  EXPECT_LE(std::abs(est.manifold_two_fraction.value - (1.0 - p1)), 3.0 * est.manifold_two_fraction.std_error);
  EXPECT_LE(std::abs(est.photon_number.value - n), 3.0 * est.photon_number.std_error);
  EXPECT_NEAR(est.manifold_two_fraction.value, populations(amplitudes(p)).p2, 0.01);
  EXPECT_GT(est.alternation_rate, 0.99);
}

TEST(WriteJumpTimes, Format) {
  const auto space = make_space(3);
  TrajectoryRecord a{0, 0, 0.0, 1.0, {0.1, 0.25}, {}, {}, {}, {}, basis_state(space, 0, Qubit::e)};
  TrajectoryRecord b{0, 3, 0.0, 1.0, {1.0 / 3.0}, {}, {}, {}, {}, basis_state(space, 0, Qubit::e)};
  std::ostringstream out;
  write_jump_times(out, {a, b});
  EXPECT_EQ(out.str(), "trajectory_id,jump_time\n0,0.10000000000000001\n0,0.25\n3,0.33333333333333331\n");
}

TEST(DefaultBurnIn, Scale) {
  const ModelParams p{10.0, 1.0, 0.1, -20.0, 0.2};
  const double beta_sq = 0.01 / 1.04;
  EXPECT_NEAR(default_burn_in(p), 20.0 / (0.2 * beta_sq), 1e-6);
  EXPECT_EQ(default_burn_in({10.0, 1.0, 0.0, -20.0, 0.2}), 0.0);
}

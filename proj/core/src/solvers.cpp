#include "rabisim/solvers.hpp"

#include "sector_propagator.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace rabisim {

namespace {

using SparseLU = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;

// L with its first row (the equation for rho(0,0)) replaced by scale * Tr.
SparseMatrix bordered(const Liouvillian& L, double scale) {
  const int d = L.dim();
  const SparseMatrix& S = L.sparse();
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(static_cast<std::size_t>(S.nonZeros() + d));
  for (int col = 0; col < S.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(S, col); it; ++it) {
      if (it.row() != 0) trips.emplace_back(static_cast<int>(it.row()), col, it.value());
    }
  }
  for (int i = 0; i < d; ++i) trips.emplace_back(0, i + d * i, scale);
  SparseMatrix B(L.superdim(), L.superdim());
  B.setFromTriplets(trips.begin(), trips.end());
  B.makeCompressed();
  return B;
}

// Smallest singular value of the factorised matrix by inverse iteration on B^H B.
double smallest_singular_value(SparseLU& lu, Eigen::Index n) {
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  DenseVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(normal(rng), normal(rng));
  v.normalize();
  double estimate = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 12; ++iter) {
    const DenseVector w = lu.solve(v);
    const DenseVector z = lu.adjoint().solve(w);
    const double growth = z.norm();
    if (!std::isfinite(growth) || growth == 0.0) return 0.0;
    estimate = 1.0 / std::sqrt(growth);
    v = z / growth;
  }
  return estimate;
}

}  // namespace

SteadyStateResult steady_state(const Liouvillian& L) {
  const Eigen::Index n = L.superdim();
  const double l_norm = L.sparse().norm();
  const double scale = l_norm / std::sqrt(static_cast<double>(n));
  const SparseMatrix B = bordered(L, scale);

  SparseLU lu;
  lu.analyzePattern(B);
  lu.factorize(B);
  if (lu.info() != Eigen::Success) {
    throw DegenerateSteadyState("steady_state: bordered Liouvillian is singular (" + lu.lastErrorMessage() +
                                "); the stationary state is not unique");
  }

  const double sigma_min = smallest_singular_value(lu, n);
  const double ratio = sigma_min / (std::numeric_limits<double>::epsilon() * B.norm());
  if (!(ratio > kNullSpaceRatio)) {
    std::ostringstream msg;
    msg << "steady_state: null space of L is not one-dimensional (sigma_min ratio " << ratio << " <= "
        << kNullSpaceRatio << ")";
    throw DegenerateSteadyState(msg.str());
  }

  DenseVector rhs = DenseVector::Zero(n);
  rhs(0) = scale;
  DenseVector x = lu.solve(rhs);
  // One step of iterative refinement.
  x += lu.solve(DenseVector(rhs - B * x));

  const int d = L.dim();
  DenseMatrix rho = unvectorize(x, d);
  rho = 0.5 * (rho + rho.adjoint());
  rho /= rho.trace().real();

  DensityMatrix state = make_density_unchecked(L.space(), rho);
  const double residual = L.apply(state.dense()).norm();
  SteadyStateResult result{std::move(state), residual, L.space().n_max(), false, ratio, std::nullopt};
  const double min_eig = result.rho.min_eigenvalue();
  result.converged = result.residual < kSteadyResidualTol && min_eig >= -DensityMatrix::kPositivityTol;
  return result;
}

Observables observables(const DensityMatrix& rho) {
  const SpaceSpec& space = rho.space();
  const DenseMatrix& m = rho.dense();
  Observables obs;
  double second_moment = 0.0;
  for (int i = 0; i < space.dim(); ++i) {
    const int n = SpaceSpec::photons_of(i);
    const double p = m(i, i).real();
    obs.photon_number += n * p;
    obs.inversion += (SpaceSpec::qubit_of(i) == Qubit::e ? 1.0 : -1.0) * p;
    second_moment += static_cast<double>(n) * (n - 1) * p;  // <a†a†aa>
  }
  if (obs.photon_number >= kMinPhotonNumber) obs.g2_zero = second_moment / (obs.photon_number * obs.photon_number);
  return obs;
}

cplx field_amplitude(const DensityMatrix& rho) {
  return expectation(annihilation(rho.space()), rho);
}

double manifold_one_population(const DensityMatrix& rho) {
  double p = 0.0;
  for (int i = 0; i < rho.space().dim(); ++i) {
    if (manifold_of_index(i) == 1) p += rho(i, i).real();
  }
  return p;
}

PropagationResult propagate(const Liouvillian& L, const DensityMatrix& rho0, std::span<const double> t_grid,
                            const PropagateOptions& options) {
  if (!(rho0.space() == L.space())) throw SpaceMismatch("propagate: state and Liouvillian spaces differ");
  if (t_grid.empty() || t_grid.front() != 0.0) throw std::invalid_argument("propagate: t_grid must start at 0");
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    if (!(t_grid[k] > t_grid[k - 1])) throw std::invalid_argument("propagate: t_grid must be increasing");
  }

  const int d = L.dim();
  std::vector<DenseMatrix> raw;
  PropagationResult result;

  if (options.method == Integrator::runge_kutta) {
    const SparseMatrix& S = L.sparse();
    auto rhs = [&S](double, const DenseVector& y) -> DenseVector { return S * y; };
    const auto ys = integrate_dopri5(rhs, vectorize(rho0.dense()), t_grid, options.ode, &result.stats);
    raw.reserve(ys.size());
    for (const auto& y : ys) raw.push_back(unvectorize(y, d));
  } else {
    raw.assign(t_grid.size(), DenseMatrix::Zero(d, d));
    for (ParitySector sector : {ParitySector::same, ParitySector::cross}) {
      detail::SectorPropagator prop(L, sector);
      const DenseVector x0 = prop.restrict_operator(rho0.dense());
      if (x0.norm() == 0.0) continue;
      const auto xs = prop.evolve(x0, t_grid);
      for (std::size_t k = 0; k < xs.size(); ++k) raw[k] += prop.expand(xs[k]);
    }
  }

  result.states.reserve(raw.size());
  for (auto& m : raw) {
    const double herm = hermiticity_error(m);
    const double tr = std::abs(m.trace() - cplx(1.0));
    result.max_hermiticity_drift = std::max(result.max_hermiticity_drift, herm);
    result.max_trace_drift = std::max(result.max_trace_drift, tr);
    DenseMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h);
    const double min_eig = es.eigenvalues()(0);
    result.max_positivity_drift = std::max(result.max_positivity_drift, -min_eig);
    if (min_eig < -DensityMatrix::kPositivityTol) {
      const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
      h = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
      h *= m.trace().real() / clipped.sum();
    }
    // The checked constructor verifies trace and positivity.
    result.states.emplace_back(L.space(), std::move(h));
  }
  result.drift_exceeded = result.max_hermiticity_drift > 1e-9;
  return result;
}

SteadyStateResult converge_cutoff(const ModelParams& params, const ObservableRequest& request, double tol,
                                  const CutoffOptions& options) {
  if (!(tol > 0.0)) throw std::invalid_argument("converge_cutoff: tol must be > 0");
  if (options.step <= 0) throw std::invalid_argument("converge_cutoff: step must be > 0");

  const auto change = [&request](const Observables& a, const Observables& b) {
    double c = 0.0;
    if (request.photon_number) c = std::max(c, std::abs(a.photon_number - b.photon_number));
    if (request.inversion) c = std::max(c, std::abs(a.inversion - b.inversion));
    if (request.g2_zero) {
      if (a.g2_zero.has_value() != b.g2_zero.has_value()) return std::numeric_limits<double>::infinity();
      if (a.g2_zero) c = std::max(c, std::abs(*a.g2_zero - *b.g2_zero));
    }
    return c;
  };

  int n_max = options.start_n_max;
  if (n_max > options.cap) throw CutoffNotConverged("converge_cutoff: start cutoff exceeds the cap");
  SteadyStateResult previous = steady_state(liouvillian(params, make_space(n_max)));
  Observables previous_obs = observables(previous.rho);
  double last_change = std::numeric_limits<double>::infinity();

  while (n_max + options.step <= options.cap) {
    const int next = n_max + options.step;
    SteadyStateResult current = steady_state(liouvillian(params, make_space(next)));
    const Observables current_obs = observables(current.rho);
    last_change = change(previous_obs, current_obs);
    if (last_change < tol && previous.converged && current.converged) {
      previous.cutoff_change = last_change;
      return previous;
    }
    n_max = next;
    previous = std::move(current);
    previous_obs = current_obs;
  }
  std::ostringstream msg;
  msg << "converge_cutoff: observables still change by " << last_change << " (tol " << tol
      << ") at the cutoff cap n_max = " << options.cap;
  throw CutoffNotConverged(msg.str());
}

}  // namespace rabisim

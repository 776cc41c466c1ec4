// solvers.hpp: steady state, time propagation and Fock-cutoff control for the
// master equation; single-time observables.

#pragma once

#include "rabisim/hilbert.hpp"
#include "rabisim/model.hpp"
#include "rabisim/ode.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rabisim {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The Liouvillian has more than one stationary state (e.g. g = 0, where sz is conserved).
class DegenerateSteadyState : public SolverError {
 public:
  using SolverError::SolverError;
};

class CutoffNotConverged : public SolverError {
 public:
  using SolverError::SolverError;
};

struct SteadyStateResult {
  DensityMatrix rho;
  double residual = 0.0;  // ||L[rho]||_F
  int n_max_used = 0;
  bool converged = false;
  // sigma_min of the trace-bordered Liouvillian over (machine epsilon * ||L||_F).
  // Values below kNullSpaceRatio mean the stationary state is not unique.
  double uniqueness_ratio = 0.0;
  // Largest change of the requested observables in the last cutoff comparison
  // (only set by converge_cutoff).
  std::optional<double> cutoff_change;
};

inline constexpr double kSteadyResidualTol = 1e-10;
inline constexpr double kNullSpaceRatio = 1e6;

// Solves the bordered system (one row of L replaced by the trace functional).
// Throws DegenerateSteadyState when the null space is not one-dimensional.
SteadyStateResult steady_state(const Liouvillian& L);

struct Observables {
  double photon_number = 0.0;
  double inversion = 0.0;
  std::optional<double> g2_zero;  // undefined when <a†a> < 1e-14
};

inline constexpr double kMinPhotonNumber = 1e-14;

Observables observables(const DensityMatrix& rho);

// <a> in the given state.
cplx field_amplitude(const DensityMatrix& rho);

// Population of manifold 1 (Tr of rho projected on the class-1 basis states).
double manifold_one_population(const DensityMatrix& rho);

enum class Integrator {
  runge_kutta,  // adaptive Dormand–Prince on vec(rho)
  exponential,  // exact exp(L dt) between output points, per parity sector
};

struct PropagateOptions {
  Integrator method = Integrator::runge_kutta;
  OdeOptions ode{};  // rtol 1e-9, atol 1e-12
};

struct PropagationResult {
  std::vector<DensityMatrix> states;
  // Largest relative anti-Hermitian part and trace deviation seen before
  // re-symmetrisation at the output points.
  double max_hermiticity_drift = 0.0;
  double max_trace_drift = 0.0;
  // Most negative eigenvalue magnitude seen. Outputs below -1e-10 are projected
  // onto the positive cone (negative eigenvalues zeroed, trace restored).
  double max_positivity_drift = 0.0;
  bool drift_exceeded = false;  // hermiticity drift above 1e-9
  OdeStats stats{};
};

// t_grid must start at 0 and increase. Step-size failures propagate as StepSizeError.
PropagationResult propagate(const Liouvillian& L, const DensityMatrix& rho0, std::span<const double> t_grid,
                            const PropagateOptions& options = {});

struct ObservableRequest {
  bool photon_number = true;
  bool inversion = true;
  bool g2_zero = true;
};

struct CutoffOptions {
  int start_n_max = kDefaultNMax;
  int step = 4;
  int cap = 63;
};

// Re-solves with n_max raised by options.step until every requested observable
// changes by less than tol between successive cutoffs; returns the solution at
// the smaller cutoff of the first converged pair. Throws CutoffNotConverged above
// the cap and std::invalid_argument for tol <= 0.
SteadyStateResult converge_cutoff(const ModelParams& params, const ObservableRequest& request, double tol,
                                  const CutoffOptions& options = {});

}  // namespace rabisim

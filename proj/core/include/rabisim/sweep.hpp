// sweep.hpp: one-parameter sweeps over the model with independent engines.

#pragma once

#include "rabisim/io.hpp"
#include "rabisim/model.hpp"
#include "rabisim/solvers.hpp"
#include "rabisim/trajectory.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rabisim {

enum class Axis { U, g, omega0, omega, kappa };
enum class Quantity { photon_number, inversion, g2_zero, p1, p2 };
enum class Engine { master, analytic, trajectory };

std::string to_string(Axis a);
std::string to_string(Quantity q);
std::string to_string(Engine e);
// Throw std::invalid_argument listing the accepted names.
Axis parse_axis(const std::string& name);
Quantity parse_quantity(const std::string& name);
Engine parse_engine(const std::string& name);

// params with the axis parameter replaced by value.
ModelParams with_axis(const ModelParams& params, Axis axis, double value);

struct SweepSpec {
  ModelParams base;
  Axis axis = Axis::U;
  std::vector<double> grid;
  std::vector<Quantity> outputs{Quantity::photon_number, Quantity::inversion, Quantity::g2_zero};
  std::vector<Engine> engines{Engine::master, Engine::analytic};
  int n_max = kDefaultNMax;
  // > 0: the master engine raises n_max until observables change by less than this.
  double cutoff_tol = 0.0;
  // t_burn < 0 selects default_burn_in per point; t_total then counts from the
  // end of the burn-in.
  TrajectoryConfig trajectory{0, -1.0, 1e5, 0.5, 1, {}};
  int trajectory_n_max = 6;

  // Throws std::invalid_argument for an empty or non-monotone grid, an empty
  // output or engine set, or an invalid base model.
  void validate() const;
};

struct MasterPoint {
  Observables observables;
  double p1 = 0.0;
  double p2 = 0.0;
  int n_max_used = 0;
  double residual = 0.0;
  bool converged = false;
  std::optional<double> cutoff_change;
};

struct AnalyticPoint {
  Observables observables;
  double p1 = 0.0;
  double p2 = 0.0;
  std::vector<std::string> warnings;
};

struct TrajectoryPoint {
  TrajectoryEstimates estimates;
  double t_burn = 0.0;
  int n_max_used = 0;
};

// Exactly one of value and error is set when the engine was requested.
template <class T>
struct EngineCell {
  std::optional<T> value;
  std::optional<std::string> error;
  bool requested() const noexcept { return value.has_value() || error.has_value(); }
};

struct SweepRow {
  std::size_t index = 0;
  double axis_value = 0.0;
  ModelParams params;
  EngineCell<MasterPoint> master;
  EngineCell<AnalyticPoint> analytic;
  EngineCell<TrajectoryPoint> trajectory;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepRow> rows;  // grid order
};

// Points run on a pool of `jobs` threads (<= 0: hardware concurrency). Solver
// failures are recorded in the row and the sweep continues.
SweepResult run_sweep(const SweepSpec& spec, int jobs = 1);

// Columns: axis value, then engine_quantity (with _se for trajectory), then
// per-engine metadata (n_max_used, residual, errors, warnings).
CsvTable sweep_table(const SweepResult& result);

// Manifest metadata: grid, axis, cutoff range, worst residual, failure counts.
std::vector<std::pair<std::string, std::string>> sweep_summary(const SweepResult& result);

// Rows where any requested engine failed.
std::size_t failed_points(const SweepResult& result);

}  // namespace rabisim

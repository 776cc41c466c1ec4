// trajectory.hpp: quantum-jump unravelling of the cavity-decay master equation.
//
// Between jumps |psi> evolves under exp(-i H_eff t) without renormalisation; a
// uniform variate r is drawn after every jump and the next jump happens when
// ||psi||^2 first drops below r. The jump applies a and renormalises.
//
// Random streams: trajectory k of seed s uses mt19937_64 seeded with
// splitmix64(splitmix64(s) ^ k); a variate x maps to ((x >> 11) + 0.5) * 2^-53,
// which lies strictly inside (0, 1).

#pragma once

#include "rabisim/hilbert.hpp"
#include "rabisim/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rabisim {

struct TrajectoryConfig {
  std::uint64_t seed = 0;
  double t_burn = 0.0;
  double t_total = 1000.0;
  double dt_max = 0.1;  // output/integration step; the deterministic flow is exact
  int n_trajectories = 1;
  // Normalised states are stored at these times (increasing, within [0, t_total]).
  std::vector<double> sample_times;

  // Throws std::invalid_argument unless t_total > t_burn >= 0, dt_max > 0,
  // n_trajectories >= 1 and sample_times increasing inside [0, t_total].
  void validate() const;
};

// Burn-in of 20 mean inter-jump intervals of the faster manifold,
// 20 / (kappa * max|beta_k|^2) from the weak-excitation amplitudes; 0 when g = 0.
double default_burn_in(const ModelParams& params);

enum class ManifoldLabel { one = 1, two = 2, mixed = 0 };

inline constexpr double kManifoldPurity = 0.999;

// Label 1 or 2 when at least 99.9% of the norm lies in that parity class.
ManifoldLabel manifold_classify(const StateVector& psi);

struct TrajectoryRecord {
  std::uint64_t seed = 0;
  int index = 0;
  double t_burn = 0.0;
  double t_total = 0.0;
  std::vector<double> jump_times;
  // Interval k spans [jump k-1, jump k) with jump -1 = 0 and jump N = t_total;
  // its label is the class of the state at the interval start.
  std::vector<ManifoldLabel> manifold_labels;
  // Post-burn-in time integrals of <sz> and <a†a> (normalised state) per interval.
  std::vector<double> sz_integrals;
  std::vector<double> photon_integrals;
  std::vector<StateVector> samples;  // at config.sample_times
  StateVector final_state;
};

// Precomputed propagators for one (params, space, dt_max); immutable and shareable
// between threads.
class TrajectoryEngine {
 public:
  TrajectoryEngine(const ModelParams& params, const SpaceSpec& space, double dt_max);
  ~TrajectoryEngine();
  TrajectoryEngine(TrajectoryEngine&&) noexcept;
  TrajectoryEngine& operator=(TrajectoryEngine&&) noexcept;

  const ModelParams& params() const noexcept;
  const SpaceSpec& space() const noexcept;
  double dt_max() const noexcept;

  // One trajectory using stream `index` of config.seed; config.dt_max must match.
  TrajectoryRecord run(const TrajectoryConfig& config, const StateVector& initial, int index) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Throws std::invalid_argument for a non-normalised initial state (1e-10) or a
// space mismatch.
TrajectoryRecord run_trajectory(const ModelParams& params, const SpaceSpec& space, const TrajectoryConfig& config,
                                const StateVector& initial, int index = 0);

// config.n_trajectories records ordered by index; jobs <= 0 selects the hardware
// concurrency. Output is independent of jobs.
std::vector<TrajectoryRecord> run_ensemble(const ModelParams& params, const SpaceSpec& space,
                                           const TrajectoryConfig& config, const StateVector& initial, int jobs = 1);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct CoincidenceEstimate {
  double bin = 0.0;  // pair separation window
  long pairs = 0;
  Estimate g2;
};

inline constexpr double kDefaultCoincidenceBin = 0.05;  // in units of 1/omega
inline constexpr long kMinJumps = 100;

struct TrajectoryEstimates {
  long jumps = 0;
  double elapsed = 0.0;  // post-burn-in time summed over records
  Estimate flux;
  Estimate photon_number;         // flux / (2 kappa)
  Estimate photon_number_direct;  // time average of <a†a>
  Estimate inversion;
  Estimate manifold_one_fraction;
  Estimate manifold_two_fraction;
  Estimate g2_zero;  // coincidence estimator at kDefaultCoincidenceBin / omega
  std::vector<CoincidenceEstimate> g2_bins;  // bins {0.025, 0.05, 0.1} / omega
  // Consecutive interval pairs with both labels pure whose labels differ.
  double alternation_rate = 0.0;
  long alternation_pairs = 0;
  int batches = 0;
  std::vector<std::string> warnings;
};

// Ratio estimators over post-burn-in data; standard errors from batch means
// (contiguous groups of intervals, at least 32 batches in total when possible).
TrajectoryEstimates estimate_observables(const std::vector<TrajectoryRecord>& records, const ModelParams& params);

// CSV with header "trajectory_id,jump_time", one row per jump, 17 significant digits.
void write_jump_times(std::ostream& out, const std::vector<TrajectoryRecord>& records);

}  // namespace rabisim

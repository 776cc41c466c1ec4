#include "rabisim/trajectory.hpp"

#include "rabisim/weak_excitation.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

namespace rabisim {

namespace {

// Bisection depth: crossing times are resolved to dt_max * 2^-34 (< 1e-10 dt_max).
constexpr int kBisectionLevels = 34;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Stream {
 public:
  Stream(std::uint64_t seed, int index) : gen_(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(index))) {}
  // Strictly inside (0, 1).
  double uniform() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace

void TrajectoryConfig::validate() const {
  if (!(t_burn >= 0.0) || !(t_total > t_burn) || !std::isfinite(t_total))
    throw std::invalid_argument("TrajectoryConfig: require t_total > t_burn >= 0");
  if (!(dt_max > 0.0) || !std::isfinite(dt_max)) throw std::invalid_argument("TrajectoryConfig: dt_max must be > 0");
  if (n_trajectories < 1) throw std::invalid_argument("TrajectoryConfig: n_trajectories must be >= 1");
  for (std::size_t k = 0; k < sample_times.size(); ++k) {
    const double s = sample_times[k];
    if (!(s >= 0.0 && s <= t_total)) throw std::invalid_argument("TrajectoryConfig: sample time outside [0, t_total]");
    if (k > 0 && !(s > sample_times[k - 1])) throw std::invalid_argument("TrajectoryConfig: sample times must increase");
  }
}

double default_burn_in(const ModelParams& params) {
  params.validate();
  if (params.g == 0.0) return 0.0;
  const auto amps = amplitudes(params);
  const double beta_sq = std::max(std::norm(amps.beta1), std::norm(amps.beta2));
  return 20.0 / (params.kappa * beta_sq);
}

ManifoldLabel manifold_classify(const StateVector& psi) {
  double one = 0.0, total = 0.0;
  for (int i = 0; i < psi.space().dim(); ++i) {
    const double p = std::norm(psi[i]);
    total += p;
    if (manifold_of_index(i) == 1) one += p;
  }
  if (one >= kManifoldPurity * total) return ManifoldLabel::one;
  if (total - one >= kManifoldPurity * total) return ManifoldLabel::two;
  return ManifoldLabel::mixed;
}

struct TrajectoryEngine::Impl {
  ModelParams params;
  SpaceSpec space;
  double dt_max;
  DenseMatrix h_eff;
  DenseMatrix a;
  std::vector<DenseMatrix> steps;  // exp(-i H_eff dt_max 2^-k), k = 0..kBisectionLevels
  Eigen::VectorXd sz_diag;
  Eigen::VectorXd n_diag;

  DenseMatrix propagator(double dt) const { return DenseMatrix(DenseMatrix(h_eff * cplx(0.0, -dt)).exp()); }

  // Normalised <sz> and <a†a>.
  std::pair<double, double> moments(const DenseVector& psi) const {
    const Eigen::VectorXd p = psi.cwiseAbs2();
    const double norm = p.sum();
    return {p.dot(sz_diag) / norm, p.dot(n_diag) / norm};
  }
};

TrajectoryEngine::TrajectoryEngine(const ModelParams& params, const SpaceSpec& space, double dt_max)
    : impl_(std::make_unique<Impl>(Impl{params, space, dt_max, {}, {}, {}, {}, {}})) {
  params.validate();
  if (!(dt_max > 0.0) || !std::isfinite(dt_max)) throw std::invalid_argument("TrajectoryEngine: dt_max must be > 0");
  Impl& m = *impl_;
  m.h_eff = effective_hamiltonian(params, space).dense();
  m.a = annihilation(space).dense();
  m.steps.reserve(kBisectionLevels + 1);
  for (int k = 0; k <= kBisectionLevels; ++k) m.steps.push_back(m.propagator(std::ldexp(dt_max, -k)));
  m.sz_diag.resize(space.dim());
  m.n_diag.resize(space.dim());
  for (int i = 0; i < space.dim(); ++i) {
    m.sz_diag(i) = SpaceSpec::qubit_of(i) == Qubit::e ? 1.0 : -1.0;
    m.n_diag(i) = SpaceSpec::photons_of(i);
  }
}

TrajectoryEngine::~TrajectoryEngine() = default;
TrajectoryEngine::TrajectoryEngine(TrajectoryEngine&&) noexcept = default;
TrajectoryEngine& TrajectoryEngine::operator=(TrajectoryEngine&&) noexcept = default;

const ModelParams& TrajectoryEngine::params() const noexcept { return impl_->params; }
const SpaceSpec& TrajectoryEngine::space() const noexcept { return impl_->space; }
double TrajectoryEngine::dt_max() const noexcept { return impl_->dt_max; }

TrajectoryRecord TrajectoryEngine::run(const TrajectoryConfig& config, const StateVector& initial, int index) const {
  config.validate();
  const Impl& m = *impl_;
  if (config.dt_max != m.dt_max) throw std::invalid_argument("TrajectoryEngine::run: dt_max differs from the engine");
  if (!(initial.space() == m.space)) throw SpaceMismatch("TrajectoryEngine::run: initial state space differs");
  if (std::abs(initial.norm() - 1.0) > 1e-10) throw std::invalid_argument("TrajectoryEngine::run: initial state not normalised");

  TrajectoryRecord rec{config.seed, index, config.t_burn, config.t_total, {}, {}, {}, {}, {}, initial};
  Stream rng(config.seed, index);
  DenseVector psi = initial.amplitudes();
  double r = rng.uniform();
  double t = 0.0;
  std::size_t next_sample = 0;

  const auto open_interval = [&rec](const DenseVector& state, const SpaceSpec& space) {
    rec.manifold_labels.push_back(manifold_classify(StateVector(space, state)));
    rec.sz_integrals.push_back(0.0);
    rec.photon_integrals.push_back(0.0);
  };
  const auto take_samples = [&] {
    while (next_sample < config.sample_times.size() && config.sample_times[next_sample] <= t) {
      rec.samples.emplace_back(m.space, psi / psi.norm());
      ++next_sample;
    }
  };
  // Trapezoid rule over [t0, t0 + dt]; the burn-in end is always a step boundary.
  const auto accumulate = [&](double t0, double dt, const DenseVector& from, const DenseVector& to) {
    if (t0 < config.t_burn) return;
    const auto [sz0, n0] = m.moments(from);
    const auto [sz1, n1] = m.moments(to);
    rec.sz_integrals.back() += 0.5 * dt * (sz0 + sz1);
    rec.photon_integrals.back() += 0.5 * dt * (n0 + n1);
  };

  open_interval(psi, m.space);
  take_samples();
  while (t < config.t_total) {
    double event = config.t_total;
    if (t < config.t_burn) event = std::min(event, config.t_burn);
    if (next_sample < config.sample_times.size()) event = std::min(event, config.sample_times[next_sample]);
    const bool landing = event - t <= m.dt_max;
    const double h = landing ? event - t : m.dt_max;
    const DenseMatrix partial = landing && h != m.dt_max ? m.propagator(h) : DenseMatrix();
    const DenseMatrix& step = partial.size() ? partial : m.steps[0];
    DenseVector next = step * psi;

    if (next.squaredNorm() >= r) {
      accumulate(t, h, psi, next);
      t = landing ? event : t + h;
      psi = std::move(next);
      take_samples();
      continue;
    }

    // Largest point lo < h on the dt_max 2^-K lattice with ||psi(lo)||^2 >= r;
    // the norm is non-increasing, so the crossing lies in (lo, lo + resolution].
    double lo = 0.0;
    DenseVector at_lo = psi;
    for (int k = 1; k <= kBisectionLevels; ++k) {
      const double stride = std::ldexp(m.dt_max, -k);
      if (!(lo + stride < h)) continue;
      DenseVector trial = m.steps[static_cast<std::size_t>(k)] * at_lo;
      if (trial.squaredNorm() >= r) {
        lo += stride;
        at_lo = std::move(trial);
      }
    }
    const double resolution = std::ldexp(m.dt_max, -kBisectionLevels);
    DenseVector at_jump = lo + resolution < h ? DenseVector(m.steps.back() * at_lo) : next;
    const double dt_jump = std::min(lo + resolution, h);
    accumulate(t, dt_jump, psi, at_jump);
    t = dt_jump == h && landing ? event : t + dt_jump;
    rec.jump_times.push_back(t);

    psi = m.a * at_jump;
    const double norm = psi.norm();
    if (!(norm > 0.0)) throw std::runtime_error("TrajectoryEngine::run: jump from a state without photons");
    psi /= norm;
    r = rng.uniform();
    open_interval(psi, m.space);
    take_samples();
  }
  rec.final_state = StateVector(m.space, psi / psi.norm());
  return rec;
}

TrajectoryRecord run_trajectory(const ModelParams& params, const SpaceSpec& space, const TrajectoryConfig& config,
                                const StateVector& initial, int index) {
  config.validate();
  return TrajectoryEngine(params, space, config.dt_max).run(config, initial, index);
}

std::vector<TrajectoryRecord> run_ensemble(const ModelParams& params, const SpaceSpec& space,
                                           const TrajectoryConfig& config, const StateVector& initial, int jobs) {
  config.validate();
  const TrajectoryEngine engine(params, space, config.dt_max);
  const int n = config.n_trajectories;
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min(jobs, n);

  std::vector<std::optional<TrajectoryRecord>> slots(static_cast<std::size_t>(n));
  std::atomic<int> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (int i = cursor++; i < n; i = cursor++) {
      try {
        slots[static_cast<std::size_t>(i)].emplace(engine.run(config, initial, i));
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        cursor = n;
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<TrajectoryRecord> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

namespace {

struct Batch {
  double time = 0.0, jumps = 0.0, sz = 0.0, photons = 0.0, one = 0.0, two = 0.0;
};

// Ratio sum(x) / sum(t) with the batch-means standard error.
Estimate ratio(const std::vector<Batch>& batches, double Batch::*x) {
  double num = 0.0, den = 0.0;
  for (const auto& b : batches) {
    num += b.*x;
    den += b.time;
  }
  Estimate e;
  e.value = num / den;
  const auto B = static_cast<double>(batches.size());
  if (batches.size() < 2) {
    e.std_error = std::numeric_limits<double>::quiet_NaN();
    return e;
  }
  double ss = 0.0;
  for (const auto& b : batches) ss += std::pow(b.*x - e.value * b.time, 2);
  e.std_error = std::sqrt(ss / (B * (B - 1.0))) / (den / B);
  return e;
}

}  // namespace

TrajectoryEstimates estimate_observables(const std::vector<TrajectoryRecord>& records, const ModelParams& params) {
  params.validate();
  if (records.empty()) throw std::invalid_argument("estimate_observables: no records");
  TrajectoryEstimates out;
  constexpr std::size_t kTargetBatches = 32;
  const std::size_t per_record = std::max<std::size_t>(1, (kTargetBatches + records.size() - 1) / records.size());

  std::vector<Batch> batches;
  std::vector<std::vector<double>> post_jumps(records.size());
  long same = 0, alternating = 0;
  for (std::size_t ri = 0; ri < records.size(); ++ri) {
    const auto& rec = records[ri];
    const std::size_t J = rec.jump_times.size();
    std::vector<Batch> intervals;
    for (std::size_t i = 0; i <= J; ++i) {
      const double start = i == 0 ? 0.0 : rec.jump_times[i - 1];
      const double end = i < J ? rec.jump_times[i] : rec.t_total;
      const double dur = std::max(0.0, end - std::max(start, rec.t_burn));
      if (dur <= 0.0) continue;
      Batch b;
      b.time = dur;
      b.jumps = (i < J && rec.jump_times[i] > rec.t_burn) ? 1.0 : 0.0;
      b.sz = rec.sz_integrals[i];
      b.photons = rec.photon_integrals[i];
      if (rec.manifold_labels[i] == ManifoldLabel::one) b.one = dur;
      if (rec.manifold_labels[i] == ManifoldLabel::two) b.two = dur;
      intervals.push_back(b);
      if (b.jumps > 0.0) post_jumps[ri].push_back(rec.jump_times[i]);
    }
    for (std::size_t i = 0; i + 1 < rec.manifold_labels.size(); ++i) {
      const auto a = rec.manifold_labels[i], b = rec.manifold_labels[i + 1];
      if (a == ManifoldLabel::mixed || b == ManifoldLabel::mixed) continue;
      (a == b ? same : alternating) += 1;
    }
    const std::size_t groups = std::min(per_record, intervals.size());
    for (std::size_t gi = 0; gi < groups; ++gi) {
      Batch sum;
      const std::size_t lo = gi * intervals.size() / groups, hi = (gi + 1) * intervals.size() / groups;
      for (std::size_t k = lo; k < hi; ++k) {
        sum.time += intervals[k].time;
        sum.jumps += intervals[k].jumps;
        sum.sz += intervals[k].sz;
        sum.photons += intervals[k].photons;
        sum.one += intervals[k].one;
        sum.two += intervals[k].two;
      }
      batches.push_back(sum);
    }
  }
  if (batches.empty()) throw std::invalid_argument("estimate_observables: no post-burn-in time");

  for (const auto& b : batches) {
    out.elapsed += b.time;
    out.jumps += static_cast<long>(b.jumps);
  }
  out.batches = static_cast<int>(batches.size());
  out.flux = ratio(batches, &Batch::jumps);
  out.photon_number = {out.flux.value / (2.0 * params.kappa), out.flux.std_error / (2.0 * params.kappa)};
  out.photon_number_direct = ratio(batches, &Batch::photons);
  out.inversion = ratio(batches, &Batch::sz);
  out.manifold_one_fraction = ratio(batches, &Batch::one);
  out.manifold_two_fraction = ratio(batches, &Batch::two);
  out.alternation_pairs = same + alternating;
  out.alternation_rate = out.alternation_pairs ? static_cast<double>(alternating) / static_cast<double>(out.alternation_pairs) : 0.0;

  // Ordered pairs closer than the bin; a Poisson stream of the same flux gives
  // N * flux * bin of them.
  for (double width : {0.025, kDefaultCoincidenceBin, 0.1}) {
    CoincidenceEstimate c;
    c.bin = width / params.omega;
    for (const auto& times : post_jumps) {
      std::size_t j = 0;
      for (std::size_t i = 0; i < times.size(); ++i) {
        j = std::max(j, i + 1);
        while (j < times.size() && times[j] - times[i] < c.bin) ++j;
        c.pairs += static_cast<long>(j - i - 1);
      }
    }
    const double expected = static_cast<double>(out.jumps) * out.flux.value * c.bin;
    if (expected > 0.0) {
      c.g2.value = static_cast<double>(c.pairs) / expected;
      c.g2.std_error = std::sqrt(std::max<double>(static_cast<double>(c.pairs), 1.0)) / expected;
    } else {
      c.g2.value = c.g2.std_error = std::numeric_limits<double>::quiet_NaN();
    }
    if (width == kDefaultCoincidenceBin) out.g2_zero = c.g2;
    out.g2_bins.push_back(c);
  }

  if (out.jumps < kMinJumps)
    out.warnings.push_back("insufficient statistics: " + std::to_string(out.jumps) + " post-burn-in jumps (< 100)");
  if (out.batches < 2) out.warnings.push_back("fewer than two batches; standard errors undefined");
  return out;
}

void write_jump_times(std::ostream& out, const std::vector<TrajectoryRecord>& records) {
  out << "trajectory_id,jump_time\n";
  char buf[64];
  for (const auto& rec : records) {
    for (double t : rec.jump_times) {
      std::snprintf(buf, sizeof buf, "%d,%.17g\n", rec.index, t);
      out << buf;
    }
  }
}

}  // namespace rabisim

#include "rabisim/sweep.hpp"

#include "rabisim/weak_excitation.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <stdexcept>
#include <thread>

namespace rabisim {

namespace {

constexpr std::array<std::pair<Axis, const char*>, 5> kAxes{
    {{Axis::U, "U"}, {Axis::g, "g"}, {Axis::omega0, "omega0"}, {Axis::omega, "omega"}, {Axis::kappa, "kappa"}}};
constexpr std::array<std::pair<Quantity, const char*>, 5> kQuantities{{{Quantity::photon_number, "photon_number"},
                                                                       {Quantity::inversion, "inversion"},
                                                                       {Quantity::g2_zero, "g2_zero"},
                                                                       {Quantity::p1, "p1"},
                                                                       {Quantity::p2, "p2"}}};
constexpr std::array<std::pair<Engine, const char*>, 3> kEngines{
    {{Engine::master, "master"}, {Engine::analytic, "analytic"}, {Engine::trajectory, "trajectory"}}};

template <class E, std::size_t N>
std::string name_of(const std::array<std::pair<E, const char*>, N>& table, E value) {
  for (const auto& [v, n] : table)
    if (v == value) return n;
  throw std::logic_error("unnamed enumerator");
}

template <class E, std::size_t N>
E parse_name(const std::array<std::pair<E, const char*>, N>& table, const std::string& name, const char* what) {
  std::string known;
  for (const auto& [v, n] : table) {
    if (name == n) return v;
    known += known.empty() ? n : std::string(", ") + n;
  }
  throw std::invalid_argument(std::string("unknown ") + what + " '" + name + "' (expected one of: " + known + ")");
}

template <class T>
bool contains(const std::vector<T>& v, T x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

MasterPoint solve_master(const ModelParams& p, const SweepSpec& spec) {
  SteadyStateResult ss = spec.cutoff_tol > 0.0
                             ? converge_cutoff(p, {}, spec.cutoff_tol, {spec.n_max, 4, 63})
                             : steady_state(liouvillian(p, make_space(spec.n_max)));
  MasterPoint m;
  m.observables = observables(ss.rho);
  m.p1 = manifold_one_population(ss.rho);
  m.p2 = 1.0 - m.p1;
  m.n_max_used = ss.n_max_used;
  m.residual = ss.residual;
  m.converged = ss.converged;
  m.cutoff_change = ss.cutoff_change;
  return m;
}

AnalyticPoint solve_analytic(const ModelParams& p) {
  const auto sol = solve_weak_excitation(p);
  return {closed_form_observables(p), sol.populations.p1, sol.populations.p2, sol.warnings};
}

TrajectoryPoint solve_trajectory(const ModelParams& p, const SweepSpec& spec, std::size_t index) {
  TrajectoryConfig c = spec.trajectory;
  if (c.t_burn < 0.0) {
    c.t_burn = default_burn_in(p);
    c.t_total += c.t_burn;
  }
  // Distinct streams per grid point: trajectory k of point i uses index i * n + k.
  const auto space = make_space(spec.trajectory_n_max);
  const TrajectoryEngine engine(p, space, c.dt_max);
  std::vector<TrajectoryRecord> records;
  for (int k = 0; k < c.n_trajectories; ++k)
    records.push_back(engine.run(c, basis_state(space, 0, Qubit::g), static_cast<int>(index) * c.n_trajectories + k));
  return {estimate_observables(records, p), c.t_burn, spec.trajectory_n_max};
}

template <class T, class F>
EngineCell<T> guarded(F&& f) {
  EngineCell<T> cell;
  try {
    cell.value = f();
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
  return cell;
}

}  // namespace

std::string to_string(Axis a) { return name_of(kAxes, a); }
std::string to_string(Quantity q) { return name_of(kQuantities, q); }
std::string to_string(Engine e) { return name_of(kEngines, e); }
Axis parse_axis(const std::string& name) { return parse_name(kAxes, name, "axis"); }
Quantity parse_quantity(const std::string& name) { return parse_name(kQuantities, name, "quantity"); }
Engine parse_engine(const std::string& name) { return parse_name(kEngines, name, "engine"); }

ModelParams with_axis(const ModelParams& params, Axis axis, double value) {
  ModelParams p = params;
  switch (axis) {
    case Axis::U: p.U = value; break;
    case Axis::g: p.g = value; break;
    case Axis::omega0: p.omega0 = value; break;
    case Axis::omega: p.omega = value; break;
    case Axis::kappa: p.kappa = value; break;
  }
  return p;
}

void SweepSpec::validate() const {
  if (grid.empty()) throw std::invalid_argument("SweepSpec: empty grid");
  const bool up = grid.size() < 2 || grid[1] > grid[0];
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (up ? !(grid[k] > grid[k - 1]) : !(grid[k] < grid[k - 1]))
      throw std::invalid_argument("SweepSpec: grid must be strictly monotone");
  }
  if (outputs.empty()) throw std::invalid_argument("SweepSpec: no outputs requested");
  if (engines.empty()) throw std::invalid_argument("SweepSpec: no engines requested");
  if (n_max < 2 || trajectory_n_max < 2) throw std::invalid_argument("SweepSpec: n_max must be >= 2");
  base.validate();
  if (contains(engines, Engine::trajectory)) {
    TrajectoryConfig c = trajectory;
    c.t_burn = std::max(c.t_burn, 0.0);
    c.validate();
  }
}

SweepResult run_sweep(const SweepSpec& spec, int jobs) {
  spec.validate();
  SweepResult result{spec, std::vector<SweepRow>(spec.grid.size())};
  const auto solve_point = [&](std::size_t i) {
    SweepRow& row = result.rows[i];
    row.index = i;
    row.axis_value = spec.grid[i];
    row.params = with_axis(spec.base, spec.axis, spec.grid[i]);
    try {
      row.params.validate();
    } catch (const std::exception& e) {
      for (Engine en : spec.engines) {
        if (en == Engine::master) row.master.error = e.what();
        if (en == Engine::analytic) row.analytic.error = e.what();
        if (en == Engine::trajectory) row.trajectory.error = e.what();
      }
      return;
    }
    if (contains(spec.engines, Engine::master)) row.master = guarded<MasterPoint>([&] { return solve_master(row.params, spec); });
    if (contains(spec.engines, Engine::analytic)) row.analytic = guarded<AnalyticPoint>([&] { return solve_analytic(row.params); });
    if (contains(spec.engines, Engine::trajectory))
      row.trajectory = guarded<TrajectoryPoint>([&] { return solve_trajectory(row.params, spec, i); });
  };

  const std::size_t n = spec.grid.size();
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) solve_point(i);
    return result;
  }
  std::atomic<std::size_t> cursor{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = cursor++; i < n; i = cursor++) solve_point(i);
    });
  for (auto& t : pool) t.join();
  return result;
}

namespace {

std::optional<double> master_value(const MasterPoint& m, Quantity q) {
  switch (q) {
    case Quantity::photon_number: return m.observables.photon_number;
    case Quantity::inversion: return m.observables.inversion;
    case Quantity::g2_zero: return m.observables.g2_zero;
    case Quantity::p1: return m.p1;
    case Quantity::p2: return m.p2;
  }
  return std::nullopt;
}

std::optional<double> analytic_value(const AnalyticPoint& a, Quantity q) {
  switch (q) {
    case Quantity::photon_number: return a.observables.photon_number;
    case Quantity::inversion: return a.observables.inversion;
    case Quantity::g2_zero: return a.observables.g2_zero;
    case Quantity::p1: return a.p1;
    case Quantity::p2: return a.p2;
  }
  return std::nullopt;
}

Estimate trajectory_value(const TrajectoryEstimates& t, Quantity q) {
  switch (q) {
    case Quantity::photon_number: return t.photon_number;
    case Quantity::inversion: return t.inversion;
    case Quantity::g2_zero: return t.g2_zero;
    case Quantity::p1: return t.manifold_one_fraction;
    case Quantity::p2: return t.manifold_two_fraction;
  }
  return {};
}

CsvCell cell(const std::optional<double>& x) { return x ? CsvCell(*x) : CsvCell(); }

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : "; ") + s;
  return out;
}

}  // namespace

CsvTable sweep_table(const SweepResult& result) {
  const SweepSpec& spec = result.spec;
  CsvTable t;
  t.header.push_back(to_string(spec.axis));
  const bool master = contains(spec.engines, Engine::master);
  const bool analytic = contains(spec.engines, Engine::analytic);
  const bool traj = contains(spec.engines, Engine::trajectory);
  if (master)
    for (Quantity q : spec.outputs) t.header.push_back("master_" + to_string(q));
  if (analytic)
    for (Quantity q : spec.outputs) t.header.push_back("analytic_" + to_string(q));
  if (traj) {
    for (Quantity q : spec.outputs) {
      t.header.push_back("trajectory_" + to_string(q));
      t.header.push_back("trajectory_" + to_string(q) + "_se");
    }
  }
  if (master) {
    for (const char* c : {"master_n_max_used", "master_residual", "master_converged", "master_cutoff_change", "master_error"})
      t.header.push_back(c);
  }
  if (analytic)
    for (const char* c : {"analytic_warnings", "analytic_error"}) t.header.push_back(c);
  if (traj) {
    for (const char* c : {"trajectory_n_max_used", "trajectory_jumps", "trajectory_elapsed", "trajectory_alternation_rate",
                          "trajectory_warnings", "trajectory_error"})
      t.header.push_back(c);
  }

  const ModelParams& b = spec.base;
  t.metadata = {{"axis", to_string(spec.axis)},
                {"omega0", format_number(b.omega0)},
                {"omega", format_number(b.omega)},
                {"g", format_number(b.g)},
                {"U", format_number(b.U)},
                {"kappa", format_number(b.kappa)},
                {"note", "the axis column replaces the base value of its parameter"}};
  if (master) {
    t.metadata.emplace_back("n_max", std::to_string(spec.n_max));
    t.metadata.emplace_back("cutoff_tol", format_number(spec.cutoff_tol));
  }
  if (traj) {
    const auto& c = spec.trajectory;
    t.metadata.emplace_back("trajectory_seed", std::to_string(c.seed));
    t.metadata.emplace_back("trajectory_t_total", format_number(c.t_total));
    t.metadata.emplace_back("trajectory_t_burn", c.t_burn < 0.0 ? "default" : format_number(c.t_burn));
    t.metadata.emplace_back("trajectory_dt_max", format_number(c.dt_max));
    t.metadata.emplace_back("trajectory_n_trajectories", std::to_string(c.n_trajectories));
  }

  for (const auto& row : result.rows) {
    std::vector<CsvCell> r{row.axis_value};
    if (master)
      for (Quantity q : spec.outputs) r.push_back(row.master.value ? cell(master_value(*row.master.value, q)) : CsvCell());
    if (analytic)
      for (Quantity q : spec.outputs)
        r.push_back(row.analytic.value ? cell(analytic_value(*row.analytic.value, q)) : CsvCell());
    if (traj) {
      for (Quantity q : spec.outputs) {
        if (row.trajectory.value) {
          const Estimate e = trajectory_value(row.trajectory.value->estimates, q);
          r.insert(r.end(), {e.value, e.std_error});
        } else {
          r.insert(r.end(), {CsvCell(), CsvCell()});
        }
      }
    }
    if (master) {
      if (const auto& m = row.master.value) {
        r.insert(r.end(), {std::int64_t{m->n_max_used}, m->residual, std::int64_t{m->converged ? 1 : 0}, cell(m->cutoff_change),
                           CsvCell()});
      } else {
        r.insert(r.end(), {CsvCell(), CsvCell(), CsvCell(), CsvCell(), row.master.error.value_or("")});
      }
    }
    if (analytic) {
      if (const auto& a = row.analytic.value) {
        r.insert(r.end(), {join(a->warnings), CsvCell()});
      } else {
        r.insert(r.end(), {CsvCell(), row.analytic.error.value_or("")});
      }
    }
    if (traj) {
      if (const auto& tp = row.trajectory.value) {
        const auto& e = tp->estimates;
        r.insert(r.end(), {std::int64_t{tp->n_max_used}, std::int64_t{e.jumps}, e.elapsed, e.alternation_rate, join(e.warnings),
                           CsvCell()});
      } else {
        r.insert(r.end(), {CsvCell(), CsvCell(), CsvCell(), CsvCell(), CsvCell(), row.trajectory.error.value_or("")});
      }
    }
    t.add_row(std::move(r));
  }
  return t;
}

std::vector<std::pair<std::string, std::string>> sweep_summary(const SweepResult& r) {
  int lo = 0, hi = 0;
  double worst = 0.0;
  std::size_t failures = 0, unconverged = 0;
  for (const auto& row : r.rows) {
    if (row.master.error || row.analytic.error || row.trajectory.error) ++failures;
    if (const auto& m = row.master.value) {
      lo = lo ? std::min(lo, m->n_max_used) : m->n_max_used;
      hi = std::max(hi, m->n_max_used);
      worst = std::max(worst, m->residual);
      if (!m->converged) ++unconverged;
    }
  }
  return {{"grid", format_number(r.spec.grid.front()) + ":" + format_number(r.spec.grid.back()) + ":" + std::to_string(r.spec.grid.size())},
          {"axis", to_string(r.spec.axis)},
          {"n_max_used", std::to_string(lo) + (hi != lo ? "-" + std::to_string(hi) : "")},
          {"max_residual", format_number(worst)},
          {"unconverged_points", std::to_string(unconverged)},
          {"failed_points", std::to_string(failures)}};
}

std::size_t failed_points(const SweepResult& r) {
  return static_cast<std::size_t>(std::count_if(r.rows.begin(), r.rows.end(), [](const SweepRow& row) {
    return row.master.error || row.analytic.error || row.trajectory.error;
  }));
}

}  // namespace rabisim

#include "rabisim/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace rabisim {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "model.omega",           "model.omega0",          "model.g",          "model.U",
      "model.kappa",           "numerics.n_max",        "numerics.cutoff_tol", "numerics.jobs",
      "numerics.seed",         "sweep.axis",            "sweep.grid",       "sweep.outputs",
      "sweep.engines",         "trajectory.t_total",    "trajectory.t_burn", "trajectory.dt_max",
      "trajectory.n_trajectories", "trajectory.n_max",  "spectrum.nu",      "spectrum.decay_target",
      "spectrum.max_points",   "g2tau.tau",             "output.out_dir"};
  return keys;
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double x = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty())
    throw ConfigError("config: " + key + " = '" + text + "' is not a number");
  return x;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream s(text);
  while (std::getline(s, item, sep)) out.push_back(trim(item));
  return out;
}

}  // namespace

Config Config::parse(std::string_view text) {
  boost::property_tree::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  Config c;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config: key '" + section + "' outside a section");
    for (const auto& [key, leaf] : body) c.set(section + "." + key, leaf.data());
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot read " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return parse(s.str());
}

void Config::set(const std::string& key, const std::string& value) {
  if (!known_keys().count(key)) throw ConfigError("config: unknown key '" + key + "'");
  values_[key] = trim(value);
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : to_double(key, it->second);
}

long long Config::get_int(const std::string& key, long long fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  long long x = 0;
  const std::string& t = it->second;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty())
    throw ConfigError("config: " + key + " = '" + t + "' is not an integer");
  return x;
}

std::vector<double> Config::get_grid(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return parse_grid(it->second);
  } catch (const ConfigError& e) {
    throw ConfigError("config: " + key + ": " + e.what());
  }
}

std::vector<std::string> Config::get_list(const std::string& key, const std::vector<std::string>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  auto items = split(it->second, ',');
  items.erase(std::remove(items.begin(), items.end(), std::string()), items.end());
  return items;
}

std::vector<double> parse_grid(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("empty grid");
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3) throw ConfigError("range grid must be start:stop:count");
    const double a = to_double("grid start", parts[0]), b = to_double("grid stop", parts[1]);
    const double count = to_double("grid count", parts[2]);
    if (!(count >= 1.0) || count != std::floor(count)) throw ConfigError("grid count must be a positive integer");
    const auto n = static_cast<std::size_t>(count);
    if (n == 1) return {a};
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k) g[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
    g.back() = b;
    return g;
  }
  std::vector<double> g;
  for (const auto& item : split(t, ',')) g.push_back(to_double("grid value", item));
  return g;
}

double frequency_scale(const Config& config) {
  const double w = config.get_double("model.omega", 1.0);
  if (!(w > 0.0)) throw ConfigError("config: model.omega must be > 0");
  return w;
}

ModelParams model_from_config(const Config& config) {
  const double w = frequency_scale(config);
  const ModelParams d{};
  ModelParams p{config.get_double("model.omega0", d.omega0) * w, w, config.get_double("model.g", d.g) * w,
                config.get_double("model.U", d.U) * w, config.get_double("model.kappa", d.kappa) * w};
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return p;
}

SweepSpec sweep_from_config(const Config& config) {
  SweepSpec s;
  s.base = model_from_config(config);
  const double w = frequency_scale(config);
  try {
    s.axis = parse_axis(config.get_string("sweep.axis", "U"));
    s.grid = config.get_grid("sweep.grid", {});
    if (s.axis != Axis::omega)
      for (double& x : s.grid) x *= w;
    s.outputs.clear();
    for (const auto& q : config.get_list("sweep.outputs", {"photon_number", "inversion", "g2_zero"}))
      s.outputs.push_back(parse_quantity(q));
    s.engines.clear();
    for (const auto& e : config.get_list("sweep.engines", {"master", "analytic"})) s.engines.push_back(parse_engine(e));
    s.n_max = static_cast<int>(config.get_int("numerics.n_max", kDefaultNMax));
    s.cutoff_tol = config.get_double("numerics.cutoff_tol", 0.0);
    s.trajectory.seed = static_cast<std::uint64_t>(config.get_int("numerics.seed", 0));
    s.trajectory.t_total = config.get_double("trajectory.t_total", s.trajectory.t_total * w) / w;
    const std::string burn = config.get_string("trajectory.t_burn", "auto");
    s.trajectory.t_burn = burn == "auto" ? -1.0 : to_double("trajectory.t_burn", burn) / w;
    s.trajectory.dt_max = config.get_double("trajectory.dt_max", s.trajectory.dt_max * w) / w;
    s.trajectory.n_trajectories = static_cast<int>(config.get_int("trajectory.n_trajectories", 1));
    s.trajectory_n_max = static_cast<int>(config.get_int("trajectory.n_max", s.trajectory_n_max));
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return s;
}

TrajectoryConfig trajectory_from_config(const Config& config, const ModelParams& params) {
  const double w = frequency_scale(config);
  TrajectoryConfig c;
  c.seed = static_cast<std::uint64_t>(config.get_int("numerics.seed", 0));
  const std::string burn = config.get_string("trajectory.t_burn", "auto");
  c.t_burn = burn == "auto" ? default_burn_in(params) : to_double("trajectory.t_burn", burn) / w;
  c.t_total = c.t_burn + config.get_double("trajectory.t_total", 1e5) / w;
  c.dt_max = config.get_double("trajectory.dt_max", 0.5) / w;
  c.n_trajectories = static_cast<int>(config.get_int("trajectory.n_trajectories", 1));
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

SpectrumOptions spectrum_options_from_config(const Config& config) {
  SpectrumOptions o;
  o.decay_target = config.get_double("spectrum.decay_target", o.decay_target);
  const long long max_points = config.get_int("spectrum.max_points", static_cast<long long>(o.max_points));
  if (max_points < 16) throw ConfigError("config: spectrum.max_points must be >= 16");
  o.max_points = static_cast<std::size_t>(max_points);
  return o;
}

}  // namespace rabisim

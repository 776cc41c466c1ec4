// config.hpp: flat INI configuration for sweeps, spectra and trajectories.
//
// Sections and keys (all optional):
//   [model]      omega (absolute frequency scale, default 1); omega0, g, U, kappa
//                as ratios to omega
//   [numerics]   n_max, cutoff_tol, jobs, seed
//   [sweep]      axis, grid, outputs, engines
//   [trajectory] t_total (duration after the burn-in), t_burn ("auto" or a time),
//                dt_max, n_trajectories, n_max
//   [spectrum]   nu, decay_target, max_points
//   [g2tau]      tau
//   [output]     out_dir
// Times are in units of 1/omega and frequencies in units of omega; sweep grids
// follow the axis (ratios to omega, except an omega axis which is absolute).
// Grids are "start:stop:count" (inclusive, evenly spaced) or comma lists; lists
// are comma separated. Lines starting with ';' or '#' are comments.

#pragma once

#include "rabisim/model.hpp"
#include "rabisim/spectral.hpp"
#include "rabisim/sweep.hpp"
#include "rabisim/trajectory.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rabisim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  // Throw ConfigError on syntax errors and unknown keys.
  static Config parse(std::string_view text);
  static Config load(const std::filesystem::path& path);

  // key is "section.name"; throws ConfigError for unknown keys.
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::vector<double> get_grid(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback) const;

  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Throws ConfigError for malformed input.
std::vector<double> parse_grid(const std::string& text);

// Absolute model parameters (ratios times the omega scale).
ModelParams model_from_config(const Config& config);
double frequency_scale(const Config& config);

SweepSpec sweep_from_config(const Config& config);
// t_burn resolved with default_burn_in when "auto".
TrajectoryConfig trajectory_from_config(const Config& config, const ModelParams& params);
SpectrumOptions spectrum_options_from_config(const Config& config);

}  // namespace rabisim

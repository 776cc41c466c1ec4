// figures.hpp: named reproduction presets and the tables they write.

#pragma once

#include "rabisim/correlation.hpp"
#include "rabisim/io.hpp"
#include "rabisim/spectral.hpp"
#include "rabisim/sweep.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace rabisim {

class UnknownPreset : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FigureOptions {
  std::filesystem::path out_dir = "out";
  int n_max = kDefaultNMax;
  int jobs = 1;
  std::uint64_t seed = 0;
};

struct FigureOutput {
  std::vector<std::filesystem::path> files;
  std::filesystem::path manifest;
  // Points whose solve failed, summed over all tables of the preset.
  std::size_t failures = 0;
};

const std::vector<std::string>& figure_presets();

// Writes <out_dir>/<name>/*.csv and <out_dir>/<name>/manifest.json. Throws
// UnknownPreset (message lists the available names).
FigureOutput run_figure(const std::string& name, const FigureOptions& options);

// Peaks above `detection_threshold` of the maximum; each row carries its height
// relative to the maximum.
inline constexpr double kPeakTableThreshold = 1e-5;

CsvTable spectrum_table(const Spectrum& spectrum, const ModelParams& params, int n_max);
CsvTable peak_table(const Spectrum& spectrum, double detection_threshold = kPeakTableThreshold);
CsvTable line_table(const std::vector<LineAssignment>& lines, double max_height);
CsvTable dressed_table(const DressedStateSet& dressed);
// Columns tau, kappa_tau, g2_qrt, g2_analytic (analytic may be empty).
CsvTable g2tau_table(const ModelParams& params, const CorrelationTrace& qrt, const CorrelationTrace* analytic,
                     int n_max);

// Model parameters as manifest key/value pairs.
std::vector<std::pair<std::string, double>> parameter_list(const ModelParams& params);

}  // namespace rabisim

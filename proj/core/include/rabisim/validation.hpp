// validation.hpp: self-test harness running the physics acceptance checks and
// reporting each as data; failures never throw.

#pragma once

#include "rabisim/hilbert.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rabisim {

struct ValidationConfig {
  int n_max = kDefaultNMax;
  std::uint64_t seed = 1;
  // Coarser U and tau grids; statistics targets are unchanged.
  bool reduced = true;
  // Replaces the weak coupling g/omega = 0.1 used by every criterion except the
  // saturation check, which fixes its own g.
  std::optional<double> g_override;
  int jobs = 1;
  // Criterion ids to run (1..11); empty runs all.
  std::vector<int> only;
};

struct CriterionReport {
  int id = 0;
  std::string name;
  bool passed = false;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> notes;
  std::optional<std::string> error;  // an exception stopped the check
};

struct ValidationReport {
  ValidationConfig config;
  std::vector<CriterionReport> criteria;
  bool all_passed() const;
};

inline constexpr int kCriterionCount = 11;

std::string criterion_name(int id);

// Throws std::invalid_argument for an invalid config (n_max < 2, id out of range).
ValidationReport run_validation(const ValidationConfig& config);

// "criterion N [name]: PASS|FAIL ..." on one line.
std::string summary_line(const CriterionReport& report);

std::string to_json(const ValidationReport& report);

}  // namespace rabisim

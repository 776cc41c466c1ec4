#include "rabisim/sweep.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace rabisim {
namespace {

SweepSpec small_spec() {
  SweepSpec s;
  s.base = {10.0, 1.0, 0.1, -20.0, 0.2};
  s.grid = {-22.0, -20.0, -18.0, -10.0};
  s.n_max = 8;
  return s;
}

std::string csv(const SweepResult& r) {
  std::ostringstream out;
  write_csv(out, sweep_table(r));
  return out.str();
}

TEST(Sweep, EmptyGridRejected) {
  auto s = small_spec();
  s.grid.clear();
  EXPECT_THROW(run_sweep(s), std::invalid_argument);
}

TEST(Sweep, OrderAndBytesIndependentOfJobs) {
  const auto spec = small_spec();
  const auto a = run_sweep(spec, 1);
  const auto b = run_sweep(spec, 3);
  ASSERT_EQ(a.rows.size(), spec.grid.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    EXPECT_EQ(a.rows[k].index, k);
    EXPECT_EQ(a.rows[k].axis_value, spec.grid[k]);
  }
  EXPECT_EQ(csv(a), csv(b));
}

TEST(Sweep, EnginesIndependentAndPeakAtResonance) {
  const auto r = run_sweep(small_spec());
  std::size_t best = 0;
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    ASSERT_TRUE(r.rows[k].master.value);
    ASSERT_TRUE(r.rows[k].analytic.value);
    EXPECT_FALSE(r.rows[k].trajectory.requested());
    if (r.rows[k].master.value->observables.photon_number > r.rows[best].master.value->observables.photon_number)
      best = k;
  }
  EXPECT_EQ(r.rows[best].axis_value, -20.0);
}

TEST(Sweep, FailuresRecordedInRow) {
  auto s = small_spec();
  s.axis = Axis::g;
  s.grid = {0.0, 0.1};
  s.engines = {Engine::master};
  const auto r = run_sweep(s);
  EXPECT_TRUE(r.rows[0].master.error);
  EXPECT_TRUE(r.rows[1].master.value);
}

TEST(Sweep, AxisNamesRoundTrip) {
  for (Axis a : {Axis::U, Axis::g, Axis::omega0, Axis::omega, Axis::kappa}) EXPECT_EQ(parse_axis(to_string(a)), a);
  EXPECT_THROW(parse_axis("nope"), std::invalid_argument);
}

}  // namespace
}  // namespace rabisim

// ode.hpp: adaptive Dormand–Prince 5(4) integrator for complex vector ODEs.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rabisim {

class StepSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double initial_step = 0.0;  // 0 selects a step from the RHS scale
  double min_step = 1e-14;    // relative to the span of the time grid
  long max_steps = 50'000'000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
};

// Integrates y' = f(t, y) and returns y at every point of t_grid (t_grid[0] is the
// initial time). Grid points are hit exactly. Throws StepSizeError when the step
// underflows or the step budget is exhausted.
template <class Rhs>
std::vector<Eigen::VectorXcd> integrate_dopri5(Rhs&& f, const Eigen::VectorXcd& y0, std::span<const double> t_grid,
                                               const OdeOptions& opt = {}, OdeStats* stats = nullptr) {
  using Vec = Eigen::VectorXcd;
  if (t_grid.empty()) throw std::invalid_argument("integrate_dopri5: empty time grid");
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    if (!(t_grid[k] > t_grid[k - 1])) throw std::invalid_argument("integrate_dopri5: time grid must be increasing");
  }

  // Dormand–Prince coefficients.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  std::vector<Vec> out;
  out.reserve(t_grid.size());
  out.push_back(y0);

  const double span = t_grid.back() - t_grid.front();
  const double h_floor = opt.min_step * std::max(span, 1.0);

  Vec y = y0;
  double t = t_grid.front();
  Vec k1 = f(t, y);
  double h = opt.initial_step;
  if (h <= 0.0) {
    const double scale = opt.atol + opt.rtol * y.cwiseAbs().maxCoeff();
    const double d0 = y.cwiseAbs().maxCoeff() / scale;
    const double d1 = k1.cwiseAbs().maxCoeff() / scale;
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    if (span > 0.0) h = std::min(h, span);
  }

  long steps = 0;
  Vec k2, k3, k4, k5, k6, k7, y_new, err;
  for (std::size_t target = 1; target < t_grid.size(); ++target) {
    const double t_end = t_grid[target];
    while (t < t_end) {
      if (++steps > opt.max_steps) throw StepSizeError("integrate_dopri5: step budget exhausted");
      bool last = false;
      const double h_planned = h;
      if (t + h >= t_end || t_end - (t + h) < 1e-12 * std::abs(t_end)) {
        h = t_end - t;
        last = true;
      }
      k2 = f(t + c2 * h, y + h * (a21 * k1));
      k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
      k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      k7 = f(t + h, y_new);
      err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double err_norm = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double sc = opt.atol + opt.rtol * std::max(std::abs(y(i)), std::abs(y_new(i)));
        const double r = std::abs(err(i)) / sc;
        err_norm += r * r;
      }
      err_norm = std::sqrt(err_norm / static_cast<double>(std::max<Eigen::Index>(y.size(), 1)));

      if (std::isfinite(err_norm) && err_norm <= 1.0) {
        t = last ? t_end : t + h;
        y.swap(y_new);
        k1.swap(k7);
        if (stats) ++stats->accepted;
        const double fac = err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
        // A step shortened to land on a grid point does not shrink the next one.
        h = last ? std::max(h_planned, h * fac) : h * fac;
      } else {
        if (stats) ++stats->rejected;
        const double fac = std::isfinite(err_norm) ? std::clamp(0.9 * std::pow(err_norm, -0.2), 0.1, 0.9) : 0.1;
        h *= fac;
      }
      if (h < h_floor) {
        throw StepSizeError("integrate_dopri5: step size underflow at t = " + std::to_string(t));
      }
    }
    out.push_back(y);
  }
  return out;
}

}  // namespace rabisim

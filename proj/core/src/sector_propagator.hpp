// Internal: exact propagation of vectorised operators restricted to one parity
// sector of the Liouvillian, using dense matrix exponentials of the sector block.

#pragma once

#include "rabisim/model.hpp"

#include <functional>
#include <map>
#include <span>
#include <vector>

namespace rabisim::detail {

class SectorPropagator {
 public:
  SectorPropagator(const Liouvillian& L, ParitySector sector);

  int dim() const noexcept { return dim_; }
  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(indices_.size()); }
  const DenseMatrix& block() const noexcept { return block_; }

  DenseVector restrict_operator(const DenseMatrix& x) const;
  DenseMatrix expand(const DenseVector& v) const;
  // Row vector r with r · restrict_operator(X) = Tr(O X) for X inside the sector.
  DenseVector trace_functional(const DenseMatrix& observable) const;

  // exp(B dt), cached by dt.
  const DenseMatrix& step_matrix(double dt);

  // States at every point of an increasing grid starting at t = 0.
  std::vector<DenseVector> evolve(const DenseVector& x0, std::span<const double> t_grid);

  // values[k] = functional · exp(B h k) x0 for k = 0, 1, ..., evaluated in blocks
  // of baby steps. After each block, stop(values) is consulted; returns once it
  // yields true or max_points values exist.
  std::vector<cplx> uniform_series(const DenseVector& functional, const DenseVector& x0, double h,
                                   std::size_t max_points,
                                   const std::function<bool(const std::vector<cplx>&)>& stop);

 private:
  int dim_;
  std::vector<int> indices_;
  DenseMatrix block_;
  std::map<long long, DenseMatrix> cache_;
};

}  // namespace rabisim::detail

#include "sector_propagator.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <bit>
#include <cstdint>
#include <stdexcept>

namespace rabisim::detail {

namespace {

// Time steps equal to ~1e-12 relative share one cached exponential.
long long step_key(double dt) {
  auto bits = std::bit_cast<std::int64_t>(dt);
  bits = (bits + (std::int64_t{1} << 11)) & ~((std::int64_t{1} << 12) - 1);
  return bits;
}

}  // namespace

SectorPropagator::SectorPropagator(const Liouvillian& L, ParitySector sector)
    : dim_(L.dim()), indices_(L.sector_indices(sector)), block_(L.sector_block(indices_)) {}

DenseVector SectorPropagator::restrict_operator(const DenseMatrix& x) const {
  DenseVector v(size());
  for (Eigen::Index k = 0; k < size(); ++k) {
    const int idx = indices_[static_cast<std::size_t>(k)];
    v(k) = x(idx % dim_, idx / dim_);
  }
  return v;
}

DenseMatrix SectorPropagator::expand(const DenseVector& v) const {
  DenseMatrix x = DenseMatrix::Zero(dim_, dim_);
  for (Eigen::Index k = 0; k < size(); ++k) {
    const int idx = indices_[static_cast<std::size_t>(k)];
    x(idx % dim_, idx / dim_) = v(k);
  }
  return x;
}

DenseVector SectorPropagator::trace_functional(const DenseMatrix& observable) const {
  // Tr(O X) = sum_ij O(j, i) X(i, j).
  DenseVector r(size());
  for (Eigen::Index k = 0; k < size(); ++k) {
    const int idx = indices_[static_cast<std::size_t>(k)];
    r(k) = observable(idx / dim_, idx % dim_);
  }
  return r;
}

const DenseMatrix& SectorPropagator::step_matrix(double dt) {
  const long long key = step_key(dt);
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    DenseMatrix scaled = block_ * dt;
    it = cache_.emplace(key, DenseMatrix(scaled.exp())).first;
  }
  return it->second;
}

std::vector<DenseVector> SectorPropagator::evolve(const DenseVector& x0, std::span<const double> t_grid) {
  if (t_grid.empty() || t_grid.front() != 0.0) throw std::invalid_argument("SectorPropagator::evolve: grid must start at 0");
  std::vector<DenseVector> out;
  out.reserve(t_grid.size());
  out.push_back(x0);
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    const double dt = t_grid[k] - t_grid[k - 1];
    if (!(dt > 0.0)) throw std::invalid_argument("SectorPropagator::evolve: grid must increase");
    out.push_back(step_matrix(dt) * out.back());
  }
  return out;
}

std::vector<cplx> SectorPropagator::uniform_series(const DenseVector& functional, const DenseVector& x0, double h,
                                                   std::size_t max_points,
                                                   const std::function<bool(const std::vector<cplx>&)>& stop) {
  if (!(h > 0.0)) throw std::invalid_argument("SectorPropagator::uniform_series: step must be positive");
  constexpr int kBabySteps = 256;

  const DenseMatrix& P = step_matrix(h);
  // Baby steps: rows functional^T P^k, k < kBabySteps.
  DenseMatrix baby(kBabySteps, size());
  DenseVector row = functional;
  const DenseMatrix Pt = P.transpose();
  for (int k = 0; k < kBabySteps; ++k) {
    baby.row(k) = row.transpose();
    row = Pt * row;
  }
  // Giant step P^kBabySteps by repeated squaring (kBabySteps is a power of two).
  DenseMatrix giant = P;
  for (int m = 1; m < kBabySteps; m *= 2) giant = giant * giant;

  std::vector<cplx> values;
  values.reserve(std::min<std::size_t>(max_points, 1 << 16));
  DenseVector v = x0;
  while (values.size() < max_points) {
    const DenseVector chunk = baby * v;
    for (Eigen::Index k = 0; k < chunk.size() && values.size() < max_points; ++k) values.push_back(chunk(k));
    if (stop(values)) break;
    v = giant * v;
  }
  return values;
}

}  // namespace rabisim::detail

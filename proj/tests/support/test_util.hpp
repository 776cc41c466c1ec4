#pragma once

#include "rabisim/hilbert.hpp"

#include <random>

namespace rabisim::test {

// Random density matrix rho = M M† / Tr(M M†) with Gaussian entries.
inline DenseMatrix random_density(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  DenseMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = cplx(normal(rng), normal(rng));
  DenseMatrix rho = m * m.adjoint();
  return rho / rho.trace().real();
}

inline DenseMatrix random_hermitian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  DenseMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = cplx(normal(rng), normal(rng));
  return 0.5 * (m + m.adjoint());
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace rabisim::test

// model.hpp: generalized Rabi Hamiltonian with nonlinear dispersive coupling,
// the no-jump effective Hamiltonian and the cavity-decay Liouvillian.
//
//   H     = (omega0/2) sz + omega a†a + g sx (a + a†) + (U/2) sz a†a
//   H_eff = H - i kappa a†a
//   L[rho] = -i[H, rho] + kappa (2 a rho a† - a†a rho - rho a†a)
//
// The library is unit-agnostic; only ratios of the five rates matter.

#pragma once

#include "rabisim/hilbert.hpp"

#include <array>
#include <vector>

namespace rabisim {

struct ModelParams {
  double omega0 = 10.0;  // qubit splitting
  double omega = 1.0;    // oscillator frequency
  double g = 0.1;        // dipole coupling
  double U = -20.0;      // nonlinear dispersive coupling, may be negative
  double kappa = 0.2;    // cavity field decay rate

  // Throws std::invalid_argument unless kappa > 0, omega > 0, omega0 > 0, g >= 0, all finite.
  void validate() const;

  ModelParams scaled(double factor) const { return {omega0 * factor, omega * factor, g * factor, U * factor, kappa * factor}; }
};

QuantumOperator hamiltonian(const ModelParams& params, const SpaceSpec& space);
QuantumOperator effective_hamiltonian(const ModelParams& params, const SpaceSpec& space);

// Vectorisation is column stacking: vec(rho)[i + dim*j] = rho(i, j), so that
// vec(A rho B) = (B^T ⊗ A) vec(rho).
DenseVector vectorize(const DenseMatrix& rho);
DenseMatrix unvectorize(const DenseVector& v, int dim);

// Index of the parity sector a vectorised element belongs to: rho(i, j) with
// equal manifolds of i and j lies in the "same" sector, otherwise "cross".
// The Liouvillian maps each sector into itself.
enum class ParitySector { same, cross };

class Liouvillian {
 public:
  Liouvillian(SpaceSpec space, SparseMatrix superop, double kappa);

  const SpaceSpec& space() const noexcept { return space_; }
  int dim() const noexcept { return space_.dim(); }
  int superdim() const noexcept { return space_.dim() * space_.dim(); }
  double kappa() const noexcept { return kappa_; }

  const SparseMatrix& sparse() const noexcept { return superop_; }
  DenseMatrix dense() const { return DenseMatrix(superop_); }

  DenseMatrix apply(const DenseMatrix& rho) const;

  // Vectorised indices of one parity sector and the dense restriction of L to it.
  std::vector<int> sector_indices(ParitySector sector) const;
  DenseMatrix sector_block(const std::vector<int>& indices) const;

 private:
  SpaceSpec space_;
  SparseMatrix superop_;
  double kappa_;
};

Liouvillian liouvillian(const ModelParams& params, const SpaceSpec& space);

// Right-hand side of the master equation evaluated with dense matrix products.
// Independent of the superoperator assembly; used to cross-check it.
DenseMatrix master_equation_rhs(const ModelParams& params, const SpaceSpec& space, const DenseMatrix& rho);

}  // namespace rabisim

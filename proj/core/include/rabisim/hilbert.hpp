// hilbert.hpp: truncated Fock ⊗ qubit space, elementary operators, states.
//
// Basis ordering: composite index i = 2n + s, with s = 0 for |g> and s = 1 for |e>.
// The qubit is therefore contiguous per Fock level.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace rabisim {

using cplx = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx>;

inline constexpr int kDefaultNMax = 15;

enum class Qubit : int { g = 0, e = 1 };

class SpaceMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SpaceSpec {
 public:
  int n_max() const noexcept { return n_max_; }
  int dim() const noexcept { return 2 * (n_max_ + 1); }

  // Composite index of |n, s>.
  int index(int n, Qubit s) const {
    if (n < 0 || n > n_max_) throw std::out_of_range("SpaceSpec::index: photon number out of range");
    return 2 * n + static_cast<int>(s);
  }
  static int photons_of(int index) noexcept { return index / 2; }
  static Qubit qubit_of(int index) noexcept { return static_cast<Qubit>(index % 2); }

  friend bool operator==(const SpaceSpec&, const SpaceSpec&) = default;

 private:
  friend SpaceSpec make_space(int n_max);
  explicit SpaceSpec(int n_max) : n_max_(n_max) {}
  int n_max_;
};

// Rejects n_max < 2: two-photon states must be representable.
SpaceSpec make_space(int n_max = kDefaultNMax);

// Manifold (parity class) of a basis state: 1 for {|n,e>: n even} ∪ {|n,g>: n odd},
// 2 for the complement. The Hamiltonian preserves the class; a flips it.
inline int manifold_of(int n, Qubit s) noexcept {
  return ((n + static_cast<int>(s)) % 2 == 1) ? 1 : 2;
}
inline int manifold_of_index(int index) noexcept {
  return manifold_of(SpaceSpec::photons_of(index), SpaceSpec::qubit_of(index));
}

class StateVector {
 public:
  StateVector(SpaceSpec space, DenseVector amplitudes);

  const SpaceSpec& space() const noexcept { return space_; }
  const DenseVector& amplitudes() const noexcept { return amps_; }
  cplx operator[](int i) const { return amps_(i); }

  double norm() const { return amps_.norm(); }
  StateVector normalized() const;

 private:
  SpaceSpec space_;
  DenseVector amps_;
};

StateVector basis_state(const SpaceSpec& space, int n, Qubit s);

class QuantumOperator {
 public:
  QuantumOperator(SpaceSpec space, DenseMatrix entries);

  const SpaceSpec& space() const noexcept { return space_; }
  int dim() const noexcept { return space_.dim(); }

  cplx operator()(int row, int col) const { return m_(row, col); }
  const DenseMatrix& dense() const noexcept { return m_; }
  SparseMatrix sparse(double drop_tol = 0.0) const;

  QuantumOperator adjoint() const { return {space_, m_.adjoint()}; }

  QuantumOperator& operator+=(const QuantumOperator& rhs);
  QuantumOperator& operator-=(const QuantumOperator& rhs);
  QuantumOperator& operator*=(cplx scale) {
    m_ *= scale;
    return *this;
  }

  friend QuantumOperator operator+(QuantumOperator lhs, const QuantumOperator& rhs) { return lhs += rhs; }
  friend QuantumOperator operator-(QuantumOperator lhs, const QuantumOperator& rhs) { return lhs -= rhs; }
  friend QuantumOperator operator*(QuantumOperator op, cplx scale) { return op *= scale; }
  friend QuantumOperator operator*(cplx scale, QuantumOperator op) { return op *= scale; }
  friend QuantumOperator operator*(const QuantumOperator& lhs, const QuantumOperator& rhs);

 private:
  SpaceSpec space_;
  DenseMatrix m_;
};

// Density matrix with checked invariants: Hermitian (1e-12 relative Frobenius),
// unit trace (1e-10), minimum eigenvalue >= -1e-10.
class DensityMatrix {
 public:
  static constexpr double kHermiticityTol = 1e-12;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kPositivityTol = 1e-10;

  // Validates; throws std::invalid_argument on violation.
  DensityMatrix(SpaceSpec space, DenseMatrix entries);

  static DensityMatrix pure(const StateVector& psi);

  const SpaceSpec& space() const noexcept { return space_; }
  const DenseMatrix& dense() const noexcept { return m_; }
  cplx operator()(int row, int col) const { return m_(row, col); }

  double min_eigenvalue() const;

 private:
  struct Unchecked {};
  DensityMatrix(SpaceSpec space, DenseMatrix entries, Unchecked) : space_(space), m_(std::move(entries)) {}
  friend DensityMatrix make_density_unchecked(SpaceSpec, DenseMatrix);

  SpaceSpec space_;
  DenseMatrix m_;
};

// Hermitian part, trace renormalised; no positivity check. For solver internals
// that establish the invariants themselves.
DensityMatrix make_density_unchecked(SpaceSpec space, DenseMatrix entries);

enum class Pauli { z, plus, minus, x };

QuantumOperator identity(const SpaceSpec& space);
QuantumOperator annihilation(const SpaceSpec& space);
QuantumOperator creation(const SpaceSpec& space);
QuantumOperator pauli(const SpaceSpec& space, Pauli which);
QuantumOperator number_op(const SpaceSpec& space);

cplx expectation(const QuantumOperator& op, const DensityMatrix& rho);
cplx expectation(const QuantumOperator& op, const StateVector& psi);
StateVector apply(const QuantumOperator& op, const StateVector& psi);

// Relative Frobenius deviation from Hermiticity, ||M - M†|| / ||M||.
double hermiticity_error(const DenseMatrix& m);

// 0.5 * ||A - B||_1 for Hermitian A, B.
double trace_distance(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace rabisim

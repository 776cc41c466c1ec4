#include "rabisim/hilbert.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace rabisim {

namespace {

void require_same_space(const SpaceSpec& a, const SpaceSpec& b, const char* what) {
  if (!(a == b)) {
    throw SpaceMismatch(std::string(what) + ": operands live on different spaces (n_max " +
                        std::to_string(a.n_max()) + " vs " + std::to_string(b.n_max()) + ")");
  }
}

// Kronecker product of a Fock-space matrix with a qubit matrix in the i = 2n + s ordering.
DenseMatrix fock_kron_qubit(const Eigen::MatrixXd& fock, const Eigen::Matrix2d& qubit) {
  const Eigen::Index nf = fock.rows();
  DenseMatrix out = DenseMatrix::Zero(2 * nf, 2 * nf);
  for (Eigen::Index m = 0; m < nf; ++m) {
    for (Eigen::Index n = 0; n < nf; ++n) {
      if (fock(m, n) == 0.0) continue;
      out.block<2, 2>(2 * m, 2 * n) = (fock(m, n) * qubit).cast<cplx>();
    }
  }
  return out;
}

}  // namespace

SpaceSpec make_space(int n_max) {
  if (n_max < 2) {
    throw std::invalid_argument("make_space: n_max must be >= 2 so that two-photon states exist (got " +
                                std::to_string(n_max) + ")");
  }
  return SpaceSpec(n_max);
}

StateVector::StateVector(SpaceSpec space, DenseVector amplitudes) : space_(space), amps_(std::move(amplitudes)) {
  if (amps_.size() != space_.dim()) {
    throw SpaceMismatch("StateVector: amplitude vector length does not match space dimension");
  }
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::domain_error("StateVector::normalized: zero vector");
  return {space_, amps_ / n};
}

StateVector basis_state(const SpaceSpec& space, int n, Qubit s) {
  DenseVector v = DenseVector::Zero(space.dim());
  v(space.index(n, s)) = 1.0;
  return {space, std::move(v)};
}

QuantumOperator::QuantumOperator(SpaceSpec space, DenseMatrix entries) : space_(space), m_(std::move(entries)) {
  if (m_.rows() != space_.dim() || m_.cols() != space_.dim()) {
    throw SpaceMismatch("QuantumOperator: matrix shape does not match space dimension");
  }
}

SparseMatrix QuantumOperator::sparse(double drop_tol) const {
  return m_.sparseView(1.0, drop_tol);
}

QuantumOperator& QuantumOperator::operator+=(const QuantumOperator& rhs) {
  require_same_space(space_, rhs.space_, "operator+");
  m_ += rhs.m_;
  return *this;
}

QuantumOperator& QuantumOperator::operator-=(const QuantumOperator& rhs) {
  require_same_space(space_, rhs.space_, "operator-");
  m_ -= rhs.m_;
  return *this;
}

QuantumOperator operator*(const QuantumOperator& lhs, const QuantumOperator& rhs) {
  require_same_space(lhs.space_, rhs.space_, "operator*");
  return {lhs.space_, lhs.m_ * rhs.m_};
}

DensityMatrix::DensityMatrix(SpaceSpec space, DenseMatrix entries) : space_(space), m_(std::move(entries)) {
  if (m_.rows() != space_.dim() || m_.cols() != space_.dim()) {
    throw SpaceMismatch("DensityMatrix: matrix shape does not match space dimension");
  }
  if (hermiticity_error(m_) > kHermiticityTol) {
    throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
  }
  if (std::abs(m_.trace() - cplx(1.0)) > kTraceTol) {
    throw std::invalid_argument("DensityMatrix: trace differs from 1");
  }
  if (min_eigenvalue() < -kPositivityTol) {
    throw std::invalid_argument("DensityMatrix: matrix has a negative eigenvalue");
  }
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  const StateVector u = psi.normalized();
  return make_density_unchecked(u.space(), u.amplitudes() * u.amplitudes().adjoint());
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

DensityMatrix make_density_unchecked(SpaceSpec space, DenseMatrix entries) {
  if (entries.rows() != space.dim() || entries.cols() != space.dim()) {
    throw SpaceMismatch("make_density_unchecked: matrix shape does not match space dimension");
  }
  DenseMatrix h = 0.5 * (entries + entries.adjoint());
  const double tr = h.trace().real();
  if (!(std::abs(tr) > 0.0)) throw std::domain_error("make_density_unchecked: zero trace");
  h /= tr;
  return DensityMatrix(space, std::move(h), DensityMatrix::Unchecked{});
}

QuantumOperator identity(const SpaceSpec& space) {
  return {space, DenseMatrix::Identity(space.dim(), space.dim())};
}

QuantumOperator annihilation(const SpaceSpec& space) {
  const int nf = space.n_max() + 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nf, nf);
  for (int n = 1; n < nf; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return {space, fock_kron_qubit(a, Eigen::Matrix2d::Identity())};
}

QuantumOperator creation(const SpaceSpec& space) { return annihilation(space).adjoint(); }

QuantumOperator pauli(const SpaceSpec& space, Pauli which) {
  Eigen::Matrix2d q = Eigen::Matrix2d::Zero();
  // Qubit basis order (g, e); |e> is the +1 eigenstate of sigma_z.
  switch (which) {
    case Pauli::z:
      q(0, 0) = -1.0;
      q(1, 1) = 1.0;
      break;
    case Pauli::plus:
      q(1, 0) = 1.0;
      break;
    case Pauli::minus:
      q(0, 1) = 1.0;
      break;
    case Pauli::x:
      q(0, 1) = 1.0;
      q(1, 0) = 1.0;
      break;
  }
  const int nf = space.n_max() + 1;
  return {space, fock_kron_qubit(Eigen::MatrixXd::Identity(nf, nf), q)};
}

QuantumOperator number_op(const SpaceSpec& space) {
  DenseMatrix m = DenseMatrix::Zero(space.dim(), space.dim());
  for (int i = 0; i < space.dim(); ++i) m(i, i) = static_cast<double>(SpaceSpec::photons_of(i));
  return {space, std::move(m)};
}

cplx expectation(const QuantumOperator& op, const DensityMatrix& rho) {
  require_same_space(op.space(), rho.space(), "expectation");
  // Tr(op * rho) without forming the product.
  return (op.dense().transpose().cwiseProduct(rho.dense())).sum();
}

cplx expectation(const QuantumOperator& op, const StateVector& psi) {
  require_same_space(op.space(), psi.space(), "expectation");
  return psi.amplitudes().dot(op.dense() * psi.amplitudes());
}

StateVector apply(const QuantumOperator& op, const StateVector& psi) {
  require_same_space(op.space(), psi.space(), "apply");
  return {psi.space(), op.dense() * psi.amplitudes()};
}

double hermiticity_error(const DenseMatrix& m) {
  const double scale = m.norm();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).norm() / scale;
}

double trace_distance(const DenseMatrix& a, const DenseMatrix& b) {
  const DenseMatrix d = 0.5 * ((a - b) + (a - b).adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(d, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace rabisim

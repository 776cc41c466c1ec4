#include "rabisim/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rabisim {

void ModelParams::validate() const {
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!(finite(omega0) && finite(omega) && finite(g) && finite(U) && finite(kappa))) {
    throw std::invalid_argument("ModelParams: all rates must be finite");
  }
  if (!(kappa > 0.0)) throw std::invalid_argument("ModelParams: kappa must be > 0");
  if (!(omega > 0.0)) throw std::invalid_argument("ModelParams: omega must be > 0");
  if (!(omega0 > 0.0)) throw std::invalid_argument("ModelParams: omega0 must be > 0");
  if (!(g >= 0.0)) throw std::invalid_argument("ModelParams: g must be >= 0");
}

QuantumOperator hamiltonian(const ModelParams& p, const SpaceSpec& space) {
  const QuantumOperator a = annihilation(space);
  const QuantumOperator ad = a.adjoint();
  const QuantumOperator n = number_op(space);
  const QuantumOperator sz = pauli(space, Pauli::z);
  const QuantumOperator sx = pauli(space, Pauli::x);

  QuantumOperator h = (0.5 * p.omega0) * sz;
  h += p.omega * n;
  h += p.g * (sx * (a + ad));
  h += (0.5 * p.U) * (sz * n);
  return h;
}

QuantumOperator effective_hamiltonian(const ModelParams& p, const SpaceSpec& space) {
  return hamiltonian(p, space) - cplx(0.0, p.kappa) * number_op(space);
}

DenseVector vectorize(const DenseMatrix& rho) {
  return Eigen::Map<const DenseVector>(rho.data(), rho.size());
}

DenseMatrix unvectorize(const DenseVector& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim) {
    throw std::invalid_argument("unvectorize: length is not dim^2");
  }
  return Eigen::Map<const DenseMatrix>(v.data(), dim, dim);
}

Liouvillian::Liouvillian(SpaceSpec space, SparseMatrix superop, double kappa)
    : space_(space), superop_(std::move(superop)), kappa_(kappa) {
  if (superop_.rows() != superdim() || superop_.cols() != superdim()) {
    throw SpaceMismatch("Liouvillian: superoperator shape does not match dim^2");
  }
}

DenseMatrix Liouvillian::apply(const DenseMatrix& rho) const {
  if (rho.rows() != dim() || rho.cols() != dim()) throw SpaceMismatch("Liouvillian::apply: shape mismatch");
  const DenseVector out = superop_ * vectorize(rho);
  return unvectorize(out, dim());
}

std::vector<int> Liouvillian::sector_indices(ParitySector sector) const {
  std::vector<int> idx;
  const int d = dim();
  idx.reserve(static_cast<std::size_t>(d * d / 2));
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      const bool same = manifold_of_index(i) == manifold_of_index(j);
      if (same == (sector == ParitySector::same)) idx.push_back(i + d * j);
    }
  }
  return idx;
}

DenseMatrix Liouvillian::sector_block(const std::vector<int>& indices) const {
  std::vector<int> position(static_cast<std::size_t>(superdim()), -1);
  for (std::size_t k = 0; k < indices.size(); ++k) position[static_cast<std::size_t>(indices[k])] = static_cast<int>(k);

  const auto m = static_cast<Eigen::Index>(indices.size());
  DenseMatrix block = DenseMatrix::Zero(m, m);
  for (int col = 0; col < superop_.outerSize(); ++col) {
    const int c = position[static_cast<std::size_t>(col)];
    for (SparseMatrix::InnerIterator it(superop_, col); it; ++it) {
      const int r = position[static_cast<std::size_t>(it.row())];
      if (c < 0 && r < 0) continue;
      if (c < 0 || r < 0) {
        if (std::abs(it.value()) != 0.0) throw std::logic_error("Liouvillian::sector_block: sector is not invariant");
        continue;
      }
      block(r, c) = it.value();
    }
  }
  return block;
}

Liouvillian liouvillian(const ModelParams& params, const SpaceSpec& space) {
  params.validate();
  const int d = space.dim();
  const SparseMatrix h = hamiltonian(params, space).sparse();
  const SparseMatrix a = annihilation(space).sparse();
  const SparseMatrix n = number_op(space).sparse();
  SparseMatrix id(d, d);
  id.setIdentity();

  const auto kron = [](const SparseMatrix& A, const SparseMatrix& B) {
    SparseMatrix out(A.rows() * B.rows(), A.cols() * B.cols());
    std::vector<Eigen::Triplet<cplx>> trips;
    trips.reserve(static_cast<std::size_t>(A.nonZeros() * B.nonZeros()));
    for (int ca = 0; ca < A.outerSize(); ++ca) {
      for (SparseMatrix::InnerIterator ia(A, ca); ia; ++ia) {
        for (int cb = 0; cb < B.outerSize(); ++cb) {
          for (SparseMatrix::InnerIterator ib(B, cb); ib; ++ib) {
            trips.emplace_back(static_cast<int>(ia.row() * B.rows() + ib.row()),
                               static_cast<int>(ia.col() * B.cols() + ib.col()), ia.value() * ib.value());
          }
        }
      }
    }
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
  };

  const cplx minus_i(0.0, -1.0);
  const SparseMatrix ht = SparseMatrix(h.transpose());
  const SparseMatrix nt = SparseMatrix(n.transpose());
  const SparseMatrix a_conj = SparseMatrix(a.conjugate());

  SparseMatrix L = minus_i * (kron(id, h) - kron(ht, id));
  L += params.kappa * (2.0 * kron(a_conj, a) - kron(id, n) - kron(nt, id));
  L.prune(cplx(0.0), 0.0);
  L.makeCompressed();
  return {space, std::move(L), params.kappa};
}

DenseMatrix master_equation_rhs(const ModelParams& params, const SpaceSpec& space, const DenseMatrix& rho) {
  const DenseMatrix h = hamiltonian(params, space).dense();
  const DenseMatrix a = annihilation(space).dense();
  const DenseMatrix n = number_op(space).dense();
  const cplx i(0.0, 1.0);
  return -i * (h * rho - rho * h) + params.kappa * (2.0 * a * rho * a.adjoint() - n * rho - rho * n);
}

}  // namespace rabisim

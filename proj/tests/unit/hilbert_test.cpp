#include "rabisim/hilbert.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace rabisim;

TEST(SpaceSpec, DimensionFollowsCutoff) {
  EXPECT_EQ(make_space(2).dim(), 6);
  EXPECT_EQ(make_space(15).dim(), 32);
  EXPECT_EQ(make_space().n_max(), 15);
  EXPECT_THROW(make_space(1), std::invalid_argument);
  EXPECT_THROW(make_space(-3), std::invalid_argument);
}

TEST(SpaceSpec, IndexOrdering) {
  const auto space = make_space(4);
  EXPECT_EQ(space.index(0, Qubit::g), 0);
  EXPECT_EQ(space.index(0, Qubit::e), 1);
  EXPECT_EQ(space.index(3, Qubit::e), 7);
  EXPECT_EQ(SpaceSpec::photons_of(7), 3);
  EXPECT_EQ(SpaceSpec::qubit_of(7), Qubit::e);
  EXPECT_THROW((void)space.index(5, Qubit::g), std::out_of_range);
}

TEST(Operators, AnnihilationLadder) {
  const auto space = make_space(4);
  const auto a = annihilation(space);
  EXPECT_EQ(apply(a, basis_state(space, 0, Qubit::g)).norm(), 0.0);
  const auto one = apply(a, basis_state(space, 1, Qubit::g));
  EXPECT_NEAR(std::abs(one[space.index(0, Qubit::g)] - 1.0), 0.0, 1e-15);
  const auto two = apply(a, basis_state(space, 2, Qubit::e));
  EXPECT_NEAR(std::abs(two[space.index(1, Qubit::e)] - std::sqrt(2.0)), 0.0, 1e-15);
  EXPECT_NEAR(two.norm(), std::sqrt(2.0), 1e-15);
  EXPECT_EQ((creation(space).dense() - a.dense().adjoint()).norm(), 0.0);
}

TEST(Operators, CommutatorHoldsBelowCutoff) {
  const auto space = make_space(6);
  const DenseMatrix a = annihilation(space).dense();
  const DenseMatrix comm = a * a.adjoint() - a.adjoint() * a;
  const int block = 2 * space.n_max();  // all states with n < n_max
  EXPECT_LT((comm.topLeftCorner(block, block) - DenseMatrix::Identity(block, block)).norm(), 1e-14);
  // Truncation artifact at n = n_max.
  EXPECT_NEAR(comm(space.dim() - 1, space.dim() - 1).real(), -space.n_max(), 1e-12);
}

TEST(Operators, PauliAlgebra) {
  const auto space = make_space(3);
  const DenseMatrix I = identity(space).dense();
  const DenseMatrix z = pauli(space, Pauli::z).dense();
  const DenseMatrix p = pauli(space, Pauli::plus).dense();
  const DenseMatrix m = pauli(space, Pauli::minus).dense();
  const DenseMatrix x = pauli(space, Pauli::x).dense();
  EXPECT_LT((z * z - I).norm(), 1e-15);
  EXPECT_LT((p * p).norm(), 1e-15);
  EXPECT_LT((m - p.adjoint()).norm(), 1e-15);
  EXPECT_LT((x - p - m).norm(), 1e-15);
  EXPECT_LT((p * m + m * p - I).norm(), 1e-15);

  const auto e0 = apply(pauli(space, Pauli::z), basis_state(space, 0, Qubit::e));
  EXPECT_NEAR(e0[space.index(0, Qubit::e)].real(), 1.0, 1e-15);
  const auto raised = apply(pauli(space, Pauli::plus), basis_state(space, 3, Qubit::g));
  EXPECT_NEAR(raised[space.index(3, Qubit::e)].real(), 1.0, 1e-15);
  EXPECT_EQ(apply(pauli(space, Pauli::plus), basis_state(space, 3, Qubit::e)).norm(), 0.0);
}

TEST(Operators, DifferentFactorsCommute) {
  const auto space = make_space(5);
  const DenseMatrix a = annihilation(space).dense();
  const DenseMatrix z = pauli(space, Pauli::z).dense();
  EXPECT_EQ((a * z - z * a).norm(), 0.0);
}

TEST(Operators, SpaceMismatchRejected) {
  const auto small = make_space(2);
  const auto big = make_space(3);
  EXPECT_THROW(annihilation(small) + annihilation(big), SpaceMismatch);
  EXPECT_THROW(expectation(number_op(small), DensityMatrix::pure(basis_state(big, 0, Qubit::g))), SpaceMismatch);
  EXPECT_THROW(apply(number_op(small), basis_state(big, 0, Qubit::g)), SpaceMismatch);
}

TEST(Expectation, BasicValues) {
  const auto space = make_space(3);
  const auto vac = DensityMatrix::pure(basis_state(space, 0, Qubit::g));
  EXPECT_EQ(expectation(number_op(space), vac), cplx(0.0));
  const auto e1 = DensityMatrix::pure(basis_state(space, 1, Qubit::e));
  EXPECT_NEAR(expectation(pauli(space, Pauli::z), e1).real(), 1.0, 1e-15);

  DenseMatrix mix = DenseMatrix::Zero(space.dim(), space.dim());
  mix(space.index(0, Qubit::g), space.index(0, Qubit::g)) = 0.5;
  mix(space.index(1, Qubit::g), space.index(1, Qubit::g)) = 0.5;
  EXPECT_NEAR(expectation(number_op(space), DensityMatrix(space, mix)).real(), 0.5, 1e-15);
}

TEST(Expectation, MatchesTraceOfProduct) {
  std::mt19937_64 rng(7);
  const auto space = make_space(4);
  const DenseMatrix rho = test::random_density(space.dim(), rng);
  const DenseMatrix op = test::random_hermitian(space.dim(), rng);
  const cplx direct = (op * rho).trace();
  EXPECT_NEAR(std::abs(expectation(QuantumOperator(space, op), DensityMatrix(space, rho)) - direct), 0.0, 1e-13);
}

TEST(DensityMatrix, InvariantsChecked) {
  const auto space = make_space(2);
  DenseMatrix m = DenseMatrix::Zero(space.dim(), space.dim());
  m(0, 0) = 1.0;
  EXPECT_NO_THROW(DensityMatrix(space, m));
  DenseMatrix not_hermitian = m;
  not_hermitian(0, 1) = 0.1;
  EXPECT_THROW(DensityMatrix(space, not_hermitian), std::invalid_argument);
  EXPECT_THROW(DensityMatrix(space, DenseMatrix(2.0 * m)), std::invalid_argument);
  DenseMatrix negative = DenseMatrix::Zero(space.dim(), space.dim());
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  EXPECT_THROW(DensityMatrix(space, negative), std::invalid_argument);
  EXPECT_THROW(DensityMatrix(space, DenseMatrix::Identity(3, 3)), std::invalid_argument);
}

TEST(Manifolds, ClassMembership) {
  EXPECT_EQ(manifold_of(0, Qubit::e), 1);
  EXPECT_EQ(manifold_of(1, Qubit::g), 1);
  EXPECT_EQ(manifold_of(2, Qubit::e), 1);
  EXPECT_EQ(manifold_of(0, Qubit::g), 2);
  EXPECT_EQ(manifold_of(1, Qubit::e), 2);
  EXPECT_EQ(manifold_of(2, Qubit::g), 2);
}

TEST(Manifolds, AnnihilationSwapsClass) {
  const auto space = make_space(8);
  const DenseMatrix a = annihilation(space).dense();
  for (int i = 0; i < space.dim(); ++i)
    for (int j = 0; j < space.dim(); ++j)
      if (a(i, j) != cplx(0.0)) EXPECT_NE(manifold_of_index(i), manifold_of_index(j));
}

TEST(TraceDistance, KnownValues) {
  const auto space = make_space(2);
  const DenseMatrix a = DensityMatrix::pure(basis_state(space, 0, Qubit::g)).dense();
  const DenseMatrix b = DensityMatrix::pure(basis_state(space, 1, Qubit::e)).dense();
  EXPECT_NEAR(trace_distance(a, b), 1.0, 1e-14);
  EXPECT_NEAR(trace_distance(a, a), 0.0, 1e-15);
}

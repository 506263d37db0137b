#include <gtest/gtest.h>

#include <random>

#include "dense_oracle.hpp"
#include "efqse/errors.hpp"
#include "efqse/fermion.hpp"
#include "efqse/pauli.hpp"

using namespace efqse;

namespace {

constexpr Spin A = Spin::Alpha;
constexpr Spin B = Spin::Beta;

oracle::Vec random_vector(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  oracle::Vec v(dim);
  for (auto& x : v) x = {g(rng), g(rng)};
  return v;
}

Eigen::MatrixXcd fock_matrix(const FermionOperator& op, int n) {
  const std::size_t dim = std::size_t{1} << (2 * n);
  Eigen::MatrixXcd m(dim, dim);
  for (std::size_t c = 0; c < dim; ++c) {
    std::vector<Complex> e(dim, 0.0);
    e[c] = 1.0;
    const auto col = apply_fermion(op, n, e);
    for (std::size_t r = 0; r < dim; ++r) m(r, c) = col[r];
  }
  return m;
}

Eigen::MatrixXcd oracle_matrix(const MolecularIntegrals& ints) {
  const int n = ints.n_orbitals();
  const std::size_t dim = std::size_t{1} << (2 * n);
  Eigen::MatrixXcd m(dim, dim);
  for (std::size_t c = 0; c < dim; ++c) {
    oracle::Vec e(dim, 0.0);
    e[c] = 1.0;
    const auto col = oracle::apply_hamiltonian(ints, e);
    for (std::size_t r = 0; r < dim; ++r) m(r, c) = col[r];
  }
  return m;
}

}  // namespace

TEST(NormalOrder, AnticommutatorProducesIdentity) {
  FermionOperator f;
  f.add(1.0, {des(0, A), cre(0, A)});
  ASSERT_EQ(f.size(), 2u);
  EXPECT_NEAR(std::abs(f.terms().at({}) - Complex(1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(f.terms().at({cre(0, A), des(0, A)}) - Complex(-1.0)), 0.0, 1e-15);
}

TEST(NormalOrder, ReorderingSignsAndPauliExclusion) {
  FermionOperator f;
  f.add(1.0, {cre(1, A), cre(0, A)});
  ASSERT_EQ(f.size(), 1u);
  EXPECT_NEAR(f.terms().at({cre(0, A), cre(1, A)}).real(), -1.0, 1e-15);

  FermionOperator g;
  g.add(2.0, {cre(2, B), cre(2, B)});
  EXPECT_TRUE(g.empty());

  // Alpha modes precede beta modes regardless of orbital index.
  FermionOperator h;
  h.add(1.0, {cre(0, B), cre(3, A)});
  EXPECT_NEAR(h.terms().at({cre(3, A), cre(0, B)}).real(), -1.0, 1e-15);
}

TEST(NormalOrder, ProductMatchesDenseProduct) {
  FermionOperator x, y;
  x.add({0.3, 0.1}, {cre(0, A), des(1, A)});
  x.add(0.7, {cre(1, B), des(0, A)});
  y.add(-0.4, {des(1, B), cre(0, B)});
  y.add({0.0, 0.5}, {cre(1, A)});
  const Eigen::MatrixXcd lhs = fock_matrix(x * y, 2);
  const Eigen::MatrixXcd rhs = fock_matrix(x, 2) * fock_matrix(y, 2);
  EXPECT_LT((lhs - rhs).norm(), 1e-12);
}

TEST(Hamiltonian, FermionActionMatchesOracle) {
  const auto ints = oracle::random_integrals(3, 2, 5);
  const FermionOperator h = build_hamiltonian(ints);
  EXPECT_TRUE(h.is_hermitian());
  const auto psi = random_vector(64, 17);
  const auto got = apply_fermion(h, 3, psi);
  const auto want = oracle::apply_hamiltonian(ints, psi);
  for (std::size_t i = 0; i < psi.size(); ++i) EXPECT_NEAR(std::abs(got[i] - want[i]), 0.0, 1e-11);
}

TEST(Hamiltonian, BipartiteQubitMatrixMatchesOracle) {
  for (int n : {2, 3}) {
    const auto ints = oracle::random_integrals(n, 2, 40 + static_cast<std::uint64_t>(n));
    const BipartiteOperator bp = bipartition(build_hamiltonian(ints), n);
    const Eigen::MatrixXcd got = bp.to_dense();
    const Eigen::MatrixXcd want = oracle_matrix(ints);
    EXPECT_LT((got - want).norm(), 1e-10) << "n = " << n;
  }
}

TEST(SpinSquared, MatchesOracleAndCommutesWithHamiltonian) {
  const int n = 3;
  const FermionOperator s2 = total_spin_operator(n);
  const auto psi = random_vector(64, 3);
  const auto got = apply_fermion(s2, n, psi);
  const auto want = oracle::apply_spin_squared(n, psi);
  for (std::size_t i = 0; i < psi.size(); ++i) EXPECT_NEAR(std::abs(got[i] - want[i]), 0.0, 1e-12);

  const auto ints = oracle::random_integrals(n, 2, 8);
  const FermionOperator h = build_hamiltonian(ints);
  EXPECT_TRUE((h * s2 - s2 * h).empty());
  EXPECT_TRUE((h * number_operator(n) - number_operator(n) * h).empty());
  EXPECT_TRUE((h * sz_operator(n) - sz_operator(n) * h).empty());
}

TEST(SpinSplit, SignFromMovingAlphaLeft) {
  // Normal-ordered keys already have alpha first; a string built as
  // beta creator then alpha annihilator needs one swap.
  const SpinSplit s = split_by_spin({cre(0, B), des(1, A)});
  EXPECT_EQ(s.sign, -1);
  ASSERT_EQ(s.alpha.size(), 1u);
  ASSERT_EQ(s.beta.size(), 1u);
}

TEST(Pauli, ProductMatchesDenseMatrices) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> pick(0, 63);
  for (int trial = 0; trial < 200; ++trial) {
    const PauliString a = PauliString::from_index(pick(rng), 3);
    const PauliString b = PauliString::from_index(pick(rng), 3);
    const auto [k, c] = multiply(a, b);
    const Eigen::MatrixXcd lhs = oracle::pauli_matrix(a.letters(3)) * oracle::pauli_matrix(b.letters(3));
    const Eigen::MatrixXcd rhs = i_power(k) * oracle::pauli_matrix(c.letters(3));
    ASSERT_LT((lhs - rhs).norm(), 1e-12) << a.letters(3) << " * " << b.letters(3);
  }
}

TEST(Pauli, LetterAndIndexRoundTrip) {
  for (std::size_t idx = 0; idx < 256; ++idx) {
    const PauliString p = PauliString::from_index(idx, 4);
    EXPECT_EQ(p.index(4), idx);
    EXPECT_EQ(PauliString::from_letters(p.letters(4)), p);
  }
  EXPECT_EQ(PauliString::from_letters("XYZI").letters(4), "XYZI");
  PauliSum s(2);
  s.add(PauliString::from_letters("YX"), 1.0);
  EXPECT_LT((s.to_dense() - oracle::pauli_matrix("YX")).norm(), 1e-15);
}

TEST(JordanWigner, SingleSpinImageMatchesLadderMatrices) {
  FermionOperator f;
  f.add(0.8, {cre(0, A), des(2, A)});
  f.add(0.8, {cre(2, A), des(0, A)});
  f.add(-0.3, {cre(1, A), cre(2, A), des(2, A), des(1, A)});
  const PauliSum ps = jordan_wigner(f, 3);
  EXPECT_TRUE(ps.is_hermitian());
  // Alpha-only operators act on the low three modes of the six-mode space.
  const Eigen::MatrixXcd full = fock_matrix(f, 3);
  const Eigen::MatrixXcd got = ps.to_dense();
  EXPECT_LT((got - full.topLeftCorner(8, 8)).norm(), 1e-12);

  FermionOperator mixed;
  mixed.add(1.0, {cre(0, A), des(0, B)});
  EXPECT_THROW(jordan_wigner(mixed, 3), ContractViolation);
}

TEST(Bipartition, OddBetaFactorsCarryAlphaParity) {
  // a+_0(alpha) a_0(beta) is odd in each register; its dense image must
  // still match the full Fock-space matrix.
  FermionOperator f;
  f.add(1.0, {cre(0, A), des(0, B)});
  f.add(1.0, {cre(0, B), des(0, A)});
  f.add({0.0, 0.4}, {cre(1, B), des(0, B)});
  f.add({0.0, -0.4}, {cre(0, B), des(1, B)});
  const BipartiteOperator bp = bipartition(f, 2);
  EXPECT_LT((bp.to_dense() - fock_matrix(f, 2)).norm(), 1e-12);
}

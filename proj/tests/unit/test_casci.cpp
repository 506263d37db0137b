#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "dense_oracle.hpp"
#include "efqse/casci.hpp"
#include "efqse/errors.hpp"

using namespace efqse;

namespace {

MolecularIntegrals fixture(const std::string& name) {
  return read_fcidump(std::string(EFQSE_FIXTURE_DIR) + "/" + name);
}

}  // namespace

TEST(Casci, MatrixMatchesFockSpaceOracle) {
  const auto ints = oracle::random_integrals(4, 4, 12);
  const auto basis = DeterminantBasis::build(4, 2, 2);
  ASSERT_EQ(basis.size(), 36u);
  const Eigen::MatrixXd got = casci_matrix(ints, basis);
  const Eigen::MatrixXd want = oracle::sector_hamiltonian(ints, 2, 2);
  EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-12);

  // Unequal spin populations exercise the mixed-spin sign bookkeeping.
  const auto b21 = DeterminantBasis::build(4, 2, 1);
  EXPECT_LT((casci_matrix(ints, b21) - oracle::sector_hamiltonian(ints, 2, 1)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Casci, OpenShellPairClosedForms) {
  // Orbitals A1 and B1: the B1 block holds one singlet and one triplet
  // with energies h00 + h11 + J +/- K.
  const auto ints = fixture("two_orbital_a1b1.fcidump");
  const auto sp = casci_spectrum(ints, 1, 1);
  const double J = ints.eri(0, 0, 1, 1), K = ints.eri(0, 1, 1, 0);
  const double base = ints.core_energy + ints.h(0, 0) + ints.h(1, 1) + J;
  const auto* triplet = sp.find(1, Irrep::B1, 1);
  const auto* singlet = sp.find(0, Irrep::B1, 1);
  ASSERT_NE(triplet, nullptr);
  ASSERT_NE(singlet, nullptr);
  EXPECT_NEAR(triplet->energy, base - K, 1e-12);
  EXPECT_NEAR(singlet->energy, base + K, 1e-12);

  Eigen::Matrix2d a1;
  a1 << 2 * ints.h(0, 0) + ints.eri(0, 0, 0, 0), K, K, 2 * ints.h(1, 1) + ints.eri(1, 1, 1, 1);
  const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(a1).eigenvalues();
  EXPECT_NEAR(sp.ground().energy, ints.core_energy + ev(0), 1e-12);
  EXPECT_EQ(sp.ground().label(), "1^1A1");
  ASSERT_NE(sp.find("2^1A1"), nullptr);
  EXPECT_NEAR(sp.find("2^1A1")->energy, ints.core_energy + ev(1), 1e-12);
  EXPECT_EQ(sp.states.size(), 4u);
}

TEST(Casci, SpectrumEqualsFullDiagonalizationWithSharpSpin) {
  const auto ints = fixture("four_orbital_mixed.fcidump");
  const auto r = casci_solve(ints, 2, 2);
  ASSERT_EQ(r.states.size(), 36u);
  const Eigen::VectorXd want = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                                   oracle::sector_hamiltonian(ints, 2, 2))
                                   .eigenvalues();
  std::vector<double> got;
  for (const auto& s : r.states) got.push_back(s.energy);
  std::sort(got.begin(), got.end());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want(static_cast<Eigen::Index>(i)), 1e-10);

  for (const auto& s : r.spectrum.states) {
    EXPECT_NEAR(s.s2, s.spin * (s.spin + 1.0), 1e-8) << s.label();
  }
  // <S^2> from the coefficients agrees with the oracle operator.
  const auto& st = r.states[3];
  const auto psi = to_fock_vector(r.basis, st.coefficients);
  const double s2 = oracle::dot(psi, oracle::apply_spin_squared(4, psi)).real();
  EXPECT_NEAR(s2, st.s2, 1e-10);
  EXPECT_EQ(r.spectrum.ground().excitation_ev, 0.0);
}

TEST(Casci, DavidsonAgreesWithDenseBlocks) {
  const auto ints = fixture("four_orbital_mixed.fcidump");
  CasciOptions dense;
  const auto d = casci_spectrum(ints, 2, 2, 0, dense);
  CasciOptions dav;
  dav.dense_limit = 1;
  dav.n_states = 3;
  const auto v = casci_spectrum(ints, 2, 2, 0, dav);
  // Orbital irreps B1, A1, A1, B1 leave two symmetry blocks, three roots each.
  ASSERT_EQ(v.states.size(), 6u);
  for (const auto& s : v.states) {
    const auto* ref = d.find(s.label());
    ASSERT_NE(ref, nullptr) << s.label();
    EXPECT_NEAR(s.energy, ref->energy, 1e-8) << s.label();
  }
}

TEST(Casci, DeterminantIrrepIsProductOfSinglyOccupied) {
  const std::vector<Irrep> irr = {Irrep::B1, Irrep::A1, Irrep::B2, Irrep::B1};
  EXPECT_EQ(determinant_irrep({0b0011, 0b0011}, irr), Irrep::A1);
  EXPECT_EQ(determinant_irrep({0b0101, 0b0011}, irr), Irrep::B2);
  EXPECT_EQ(determinant_irrep({0b0001, 0b1000}, irr), Irrep::A1);
}

TEST(Casci, SizeCapIsEnforced) {
  const auto ints = oracle::random_integrals(4, 4, 1);
  CasciOptions o;
  o.max_determinants = 10;
  EXPECT_THROW(casci_solve(ints, 2, 2, o), NumericalError);
}

TEST(Spectrum, OrdinalsAndLabels) {
  LabeledSpectrum s;
  auto add = [&](double e, int spin, Irrep r) {
    LabeledState st;
    st.energy = e;
    st.spin = spin;
    st.irrep = r;
    s.states.push_back(st);
  };
  add(-1.0, 1, Irrep::B2);
  add(-2.0, 0, Irrep::A1);
  add(-0.5, 1, Irrep::B2);
  add(-1.0, 0, Irrep::A2);
  finalize_spectrum(s);
  ASSERT_EQ(s.states.size(), 4u);
  EXPECT_EQ(s.states[0].label(), "1^1A1");
  // Tie at -1.0 broken by spin first.
  EXPECT_EQ(s.states[1].label(), "1^1A2");
  EXPECT_EQ(s.states[2].label(), "1^3B2");
  EXPECT_EQ(s.states[3].label(), "2^3B2");
  EXPECT_NEAR(s.states[3].excitation_ev, 1.5 * kHartreeToEv, 1e-12);
  EXPECT_EQ(spin_from_s2(2.0 + 1e-9, 1e-6), 1);
  EXPECT_FALSE(spin_from_s2(1.0, 1e-3).has_value());
}

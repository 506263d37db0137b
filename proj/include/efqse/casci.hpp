#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "efqse/chemio.hpp"
#include "efqse/fermion.hpp"
#include "efqse/spectrum.hpp"

namespace efqse {

/// All (alpha, beta) occupation-string pairs with fixed weights. Strings
/// are in ascending integer order; determinant i*n_beta_strings + j pairs
/// alpha string i with beta string j.
struct DeterminantBasis {
  int n_orbitals = 0;
  int n_alpha = 0;
  int n_beta = 0;
  std::vector<std::uint64_t> alpha_strings;
  std::vector<std::uint64_t> beta_strings;

  static DeterminantBasis build(int n_orbitals, int n_alpha, int n_beta);
  std::size_t size() const { return alpha_strings.size() * beta_strings.size(); }
  std::uint64_t alpha(std::size_t i) const { return alpha_strings[i / beta_strings.size()]; }
  std::uint64_t beta(std::size_t i) const { return beta_strings[i % beta_strings.size()]; }
};

/// Determinant = product of creators in ascending spin-orbital order (all
/// alpha before beta) acting on the vacuum, matching the qubit encoding.
struct Determinant {
  std::uint64_t alpha = 0;
  std::uint64_t beta = 0;
};

/// <d1|H|d2> by the Slater-Condon rules.
double slater_condon_element(const Determinant& d1, const Determinant& d2, const MolecularIntegrals& ints);

/// Irrep of a determinant: product over singly occupied orbitals.
Irrep determinant_irrep(const Determinant& d, const std::vector<Irrep>& orbital_irreps);

struct CasciOptions {
  std::size_t max_determinants = 1000000;
  std::size_t dense_limit = 2000;  // per irrep block
  int n_states = 0;                // per irrep block; 0 = all (dense blocks only)
  int davidson_states = 12;        // per block when n_states = 0 and Davidson is used
  double davidson_tolerance = 1e-9;
};

struct CasciState {
  double energy = 0.0;
  double s2 = 0.0;
  Irrep irrep = Irrep::A1;
  std::vector<double> coefficients;  // over the full DeterminantBasis
};

struct CasciResult {
  DeterminantBasis basis;
  std::vector<CasciState> states;  // ascending energy
  LabeledSpectrum spectrum;        // same order as states
};

CasciResult casci_solve(const MolecularIntegrals& ints, int n_alpha, int n_beta, const CasciOptions& options = {});

/// Labeled CASCI spectrum with at most n_states entries (0 = all computed).
LabeledSpectrum casci_spectrum(const MolecularIntegrals& ints, int n_alpha, int n_beta, int n_states = 0,
                               const CasciOptions& options = {});

/// Dense H over the determinant basis (small problems and tests).
Eigen::MatrixXd casci_matrix(const MolecularIntegrals& ints, const DeterminantBasis& basis);

/// Embeds CI coefficients into the 2N-qubit Fock vector (alpha bits low).
std::vector<Complex> to_fock_vector(const DeterminantBasis& basis, const std::vector<double>& c);

}  // namespace efqse

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "efqse/fermion.hpp"
#include "efqse/forging.hpp"
#include "efqse/irrep.hpp"
#include "efqse/pauli.hpp"
#include "efqse/spectrum.hpp"

namespace efqse {

enum class ExcitationKind : std::uint8_t { Identity, Single, Double };

/// One excitation operator E. Singles are a+_a a_i (same spin). Same-spin
/// doubles are a+_a a+_b a_j a_i with a < b, i < j; opposite-spin doubles
/// are (a+_a a_i)_alpha (a+_b a_j)_beta. The operator is stored as its alpha
/// factor followed by its beta factor, so E = alpha_part * beta_part.
struct ExcitationElement {
  ExcitationKind kind = ExcitationKind::Identity;
  int a = -1, i = -1;
  Spin sigma = Spin::Alpha;
  int b = -1, j = -1;
  Spin tau = Spin::Alpha;
  Irrep irrep = Irrep::A1;
  LadderString alpha_part;
  LadderString beta_part;

  LadderString ladder() const;
  FermionOperator op() const;
  std::string name() const;
};

struct ExcitationBasis {
  int n_orbitals = 0;
  std::uint64_t reference = 0;
  Irrep reference_irrep = Irrep::A1;
  std::vector<ExcitationElement> elements;

  std::size_t size() const { return elements.size(); }
};

/// Identity, all spin-resolved singles, then same-spin alpha, same-spin beta
/// and opposite-spin doubles out of the reference occupation. `irreps` may
/// be empty (everything is then A1).
ExcitationBasis build_excitation_basis(std::uint64_t reference, int n_orbitals, const std::vector<Irrep>& irreps,
                                       Irrep reference_irrep = Irrep::A1);

/// Real symmetric projections of H, the identity and S^2, with per-entry
/// standard errors (all zero for exact data).
struct SubspaceMatrices {
  Eigen::MatrixXd H, M, S;
  Eigen::MatrixXd sigma_H, sigma_M, sigma_S;

  Eigen::Index size() const { return H.rows(); }
  /// Copies the upper triangle of every matrix into the lower one.
  void symmetrize();
};

/// Bipartitioned operators used for the projections.
struct QseOperators {
  BipartiteOperator hamiltonian;
  BipartiteOperator spin_squared;
  FermionOperator hamiltonian_fermion;
  FermionOperator spin_squared_fermion;

  static QseOperators build(const MolecularIntegrals& ints);
};

/// <Psi|E_mu^dag O E_nu|Psi> for the forged state described by `data` and
/// `schmidt`. Every excitation factor is a signed partial permutation on one
/// register, so each entry is a contraction of single-register transition
/// traces. Standard errors are propagated for sampled data on entries
/// between elements of equal irrep.
SubspaceMatrices assemble_matrices(const TransitionData& data, const std::vector<double>& schmidt,
                                   const ExcitationBasis& basis, const QseOperators& ops);

/// The same entries computed by normal-ordering E_mu^dag O E_nu, splitting
/// it over the two registers and evaluating it with forged_expectation.
/// Much slower; used as a cross-check.
SubspaceMatrices assemble_matrices_literal(const TransitionData& data, const std::vector<double>& schmidt,
                                           const ExcitationBasis& basis, const QseOperators& ops);

/// Entries for an arbitrary 2N-qubit Fock-space state (alpha bits low).
SubspaceMatrices assemble_matrices_dense(const std::vector<Complex>& psi, const ExcitationBasis& basis,
                                         const QseOperators& ops);

struct QseThresholds {
  double eps_m = 1e-8;
  double eps_s = 0.1;
};

/// 1e-8 for exact data; max(1e-8, 3 * median sigma_M) over same-irrep
/// entries otherwise.
double overlap_threshold(const SubspaceMatrices& m, const ExcitationBasis& basis, bool sampled);

/// Groups rows by irrep, canonically orthogonalizes M, splits the retained
/// space into S^2 eigenspaces and diagonalizes H inside each. States whose
/// S^2 eigenvalue lies farther than eps_s from every S(S+1) are dropped with
/// a warning.
LabeledSpectrum block_and_classify(const SubspaceMatrices& m, const ExcitationBasis& basis,
                                   const QseThresholds& thresholds);

/// Resamples every upper-triangle entry from a normal distribution with its
/// standard error, reclassifies, and stores the standard deviation of each
/// excitation energy (eV) in sigma_ev. States whose label is missing from
/// any resample are flagged unstable.
void bootstrap_uncertainty(LabeledSpectrum& spectrum, const SubspaceMatrices& m, const ExcitationBasis& basis,
                           const QseThresholds& thresholds, int n_resamples, std::uint64_t seed);

/// sum_i dev_i^2 / (n sigma_i^2).
double chi_squared(const std::vector<double>& deviations, const std::vector<double>& sigmas);

/// Occupation string x whose closed-shell determinant |x>|x> has the largest
/// amplitude in the forged state. At theta = 0 this is the bitstring with
/// the largest |lambda_k|; after optimization the hop gates may have moved
/// the weight elsewhere.
std::uint64_t dominant_bitstring(const ForgedAnsatz& a);

struct QseResult {
  ExcitationBasis basis;
  SubspaceMatrices matrices;
  QseThresholds thresholds;
  LabeledSpectrum spectrum;
};

struct QseSolveOptions {
  std::optional<double> eps_m;  // overrides overlap_threshold when set
  double eps_s = 0.1;
  Irrep reference_irrep = Irrep::A1;
  int bootstrap_resamples = 200;
  std::uint64_t seed = 0;
  std::string method = "qse";
};

/// Basis from the dominant bitstring, matrices, thresholds, classification
/// and (for sampled data) bootstrap errors.
QseResult solve_qse(const TransitionData& data, const ForgedAnsatz& a, const QseOperators& ops,
                    const std::vector<Irrep>& irreps, const QseSolveOptions& options = {});

}  // namespace efqse

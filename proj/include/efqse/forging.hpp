#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "efqse/estimation.hpp"
#include "efqse/irrep.hpp"
#include "efqse/pauli.hpp"
#include "efqse/statevector.hpp"

namespace efqse {

/// |Psi> = sum_k lambda_k U(theta)|x_k> (x) U(theta)|x_k>, with U a
/// sequence of hop gates shared by both spin registers.
struct ForgedAnsatz {
  int n_qubits = 0;
  std::vector<std::uint64_t> bitstrings;
  std::vector<std::pair<int, int>> hop_layout;
  std::vector<int> hop_parameter;  // hop position -> index into thetas
  std::vector<double> thetas;
  std::vector<double> schmidt;

  /// Distinct hop angles plus the two Schmidt parameters.
  int n_parameters() const { return static_cast<int>(thetas.size()) + 2; }
  int n_occupied() const;
  double theta_of(std::size_t hop) const { return thetas[static_cast<std::size_t>(hop_parameter[hop])]; }

  /// Throws ContractViolation / BoundsError when an invariant is broken.
  void validate() const;
};

/// HF string plus the HOMO swapped with the lowest virtual of the same
/// irrep (falling back to deeper occupied orbitals, then to HOMO/LUMO).
/// `irreps` may be empty, in which case HOMO/LUMO is used.
std::vector<std::uint64_t> default_bitstrings(int n_orbitals, int n_occupied,
                                              const std::vector<Irrep>& irreps);

/// Default hop count: max(1, N + N_v - 3).
int default_hop_count(int n_orbitals, int n_occupied);

/// Hop-gate pairs on adjacent qubits, arranged in three brick layers
/// around the HOMO/LUMO boundary. With irreps given, only pairs of equal
/// orbital symmetry are used; the result may then be empty.
std::vector<std::pair<int, int>> default_hop_layout(int n_orbitals, int n_occupied, int n_hops,
                                                    const std::vector<Irrep>& irreps);

/// Two bitstrings, the default layout, one angle per hop, theta = 0 and
/// lambda = (1, 0).
ForgedAnsatz default_ansatz(int n_orbitals, int n_occupied, const std::vector<Irrep>& irreps,
                            int n_hops = -1);

enum class CircuitKind : std::uint8_t { Diagonal, Superposition };

struct ForgedCircuitSpec {
  CircuitKind kind = CircuitKind::Diagonal;
  int k = 0;
  int l = 0;
  int p = 0;
};

/// Diagonal circuits for every k, then superposition circuits for every
/// k < l and p = 0..3.
std::vector<ForgedCircuitSpec> forged_circuit_list(const ForgedAnsatz& a);

/// The bit set in x_k but not x_l, and the bit set in x_l but not x_k.
/// Throws ContractViolation unless the strings differ in exactly two bits.
std::pair<int, int> differing_pair(std::uint64_t xk, std::uint64_t xl);

Circuit build_forged_circuit(const ForgedAnsatz& a, const ForgedCircuitSpec& spec);
/// The hop-gate part U(theta) only.
Circuit build_unitary_circuit(const ForgedAnsatz& a);

/// Reconstruction coefficient c_p applied to <phi^p|A|phi^p>.
enum class ReconstructionScale : std::uint8_t { Normalized, AsPrinted };
Complex reconstruction_coefficient(int p, ReconstructionScale scale = ReconstructionScale::Normalized);

/// Per-term result of off_diagonal_element.
struct OffDiagonalResult {
  std::vector<std::array<double, 4>> phi_expectations;  // per term, p = 0..3
  std::vector<Complex> elements;                         // per term
};

/// A_kl = sum_p c_p <phi^p_kl| U^dag A U |phi^p_kl> for each Pauli string,
/// evaluated with exact statevector expectations.
OffDiagonalResult off_diagonal_element(const ForgedAnsatz& a, int k, int l,
                                       const std::vector<PauliString>& terms,
                                       ReconstructionScale scale = ReconstructionScale::Normalized);

/// Same reconstruction from finite-shot estimates.
OffDiagonalResult off_diagonal_element_sampled(const ForgedAnsatz& a, int k, int l,
                                               const std::vector<PauliString>& terms,
                                               const SamplingOptions& options);

/// Transition tables A_kl(P) = <x_k|U^dag P U|x_l> for every ordered pair
/// (k, l) and every Pauli string P, assembled from the forged circuits.
class TransitionData {
 public:
  int n_qubits() const { return n_; }
  int n_strings() const { return k_; }
  const std::vector<Complex>& table(int k, int l) const {
    return tables_[static_cast<std::size_t>(k * k_ + l)];
  }
  Complex element(int k, int l, const PauliString& p) const { return table(k, l)[p.index(n_)]; }
  const std::vector<ForgedCircuitSpec>& circuits() const { return circuits_; }
  bool sampled() const { return estimates_.has_value(); }
  const PauliEstimates& estimates() const { return *estimates_; }

  /// Variance of Re F for a functional F of the tables, given the
  /// holomorphic derivatives w[k*K + l][P] = dF/dA_kl(P).
  double variance(const std::vector<std::vector<Complex>>& w) const;

  friend TransitionData exact_transition_data(const ForgedAnsatz& a);
  friend TransitionData sampled_transition_data(const ForgedAnsatz& a,
                                                std::shared_ptr<const MeasurementPlan> plan,
                                                const SamplingOptions& options, std::uint64_t stream);

 private:
  void assemble(const std::vector<std::vector<double>>& circuit_values);
  int n_ = 0;
  int k_ = 0;
  std::vector<ForgedCircuitSpec> circuits_;
  std::vector<std::vector<Complex>> tables_;
  std::optional<PauliEstimates> estimates_;
};

TransitionData exact_transition_data(const ForgedAnsatz& a);
TransitionData sampled_transition_data(const ForgedAnsatz& a, std::shared_ptr<const MeasurementPlan> plan,
                                       const SamplingOptions& options, std::uint64_t stream);

struct Estimate {
  double value = 0.0;
  double sigma = 0.0;
};

/// sum_{kl} lambda_k lambda_l sum_mu c_mu A_kl(P_mu) A_kl(Q_mu), with first
/// order error propagation when the tables come from samples.
Estimate forged_expectation(const TransitionData& data, const std::vector<double>& schmidt,
                            const BipartiteOperator& op);
Estimate forged_expectation(const ForgedAnsatz& a, const BipartiteOperator& op);
Estimate forged_expectation(const ForgedAnsatz& a, const BipartiteOperator& op,
                            const SamplingOptions& options, std::uint64_t stream = 0);

/// Largest N accepted by direct_statevector.
inline constexpr int kDirectStatevectorCap = 14;

/// The 2N-qubit state sum_k lambda_k U|x_k> (x) U|x_k>, alpha register on
/// the low qubits.
QubitState direct_statevector(const ForgedAnsatz& a);

struct OptimizerOptions {
  int max_iterations = 5000;
  int restarts = 3;
  double tolerance = 1e-8;
  double initial_step = 0.4;
  std::uint64_t seed = 0;
};

struct OptimizationResult {
  ForgedAnsatz ansatz;
  double energy = 0.0;
  bool converged = false;
  int evaluations = 0;
  std::vector<double> history;  // every objective value, in order
};

/// Nelder-Mead over (theta..., phi) with lambda = (cos phi, sin phi), from
/// the template's angles and then from `restarts` seeded random starts.
OptimizationResult optimize_ground_state(const ForgedAnsatz& templ, const BipartiteOperator& h,
                                         const OptimizerOptions& options = {});

struct ResourceCount {
  int qubits = 0;
  int n_parameters = 0;
  int single_qubit_gates = 0;
  int two_qubit_gates = 0;
  int depth = 0;
};

/// Gate counts of the superposition circuit with per-qubit measurement:
/// V block (4 single, 1 two-qubit, depth 3), hop gate (4 single, 3 two,
/// depth 7), measurement (2 single, depth 2), plus X gates on shared bits.
/// Hop blocks are scheduled as soon as their qubits are free.
ResourceCount resource_count(const ForgedAnsatz& a);

std::string ansatz_to_json(const ForgedAnsatz& a);
ForgedAnsatz ansatz_from_json(const std::string& text);

}  // namespace efqse

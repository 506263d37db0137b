#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "efqse/pauli.hpp"

namespace efqse {

enum class Axis : std::uint8_t { X, Y, Z };

enum class VprepVariant : std::uint8_t { Ten, ZeroOne, Phi0, Phi1, Phi2, Phi3 };

/// phi_p variant for p in 0..3.
VprepVariant phi_variant(int p);

struct PauliXGate {
  int q;
};
struct VprepGate {
  int q1, q2;
  VprepVariant variant;
};
struct HopGate {
  double theta;
  int q1, q2;
};
struct BasisRotationGate {
  int q;
  Axis axis;
};
using Gate = std::variant<PauliXGate, VprepGate, HopGate, BasisRotationGate>;

struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;

  /// Throws BoundsError / ContractViolation on bad qubit indices.
  void validate() const;
};

/// Dense N-qubit state. Basis index bit i is qubit i.
class QubitState {
 public:
  explicit QubitState(int n_qubits = 0);
  static QubitState basis(int n_qubits, std::uint64_t bits);
  static QubitState from_amplitudes(std::vector<Complex> amps);

  int n_qubits() const { return n_; }
  std::size_t dim() const { return amps_.size(); }
  const std::vector<Complex>& amplitudes() const { return amps_; }
  std::vector<Complex>& amplitudes() { return amps_; }
  Complex operator[](std::size_t b) const { return amps_[b]; }

  double norm_squared() const;

 private:
  int n_;
  std::vector<Complex> amps_;
};

/// |00>->|00>, |01>->c|01>+s|10>, |10>->s|01>-c|10>, |11>->-|11>, where
/// |ab> means qubit q1 = a, qubit q2 = b.
void apply_hop_gate(QubitState& s, double theta, int q1, int q2);
/// Two-qubit preparation unitary. On |00> it yields |10> (ten), |01>
/// (zeroone) or (|10> + i^p |01>)/sqrt2 up to a global phase (phi_p).
void apply_vprep(QubitState& s, int q1, int q2, VprepVariant v);
void apply_pauli_x(QubitState& s, int q);
/// Maps the eigenbasis of `axis` onto the computational basis (H for X,
/// S^dagger then H for Y, nothing for Z). Outcome 0 is eigenvalue +1.
void apply_basis_rotation(QubitState& s, int q, Axis axis);
void apply_gate(QubitState& s, const Gate& g);
QubitState run_circuit(const Circuit& c);

/// Exact <psi|P|psi> of a Hermitian Pauli sum. Throws ContractViolation if
/// the sum is not Hermitian.
double expectation(const QubitState& s, const PauliSum& op);
Complex pauli_expectation(const QubitState& s, const PauliString& p);

/// In-place Walsh-Hadamard transform (unnormalized) of a length-2^n vector.
template <class T>
void walsh_hadamard(std::vector<T>& v) {
  const std::size_t n = v.size();
  for (std::size_t h = 1; h < n; h <<= 1)
    for (std::size_t i = 0; i < n; i += h << 1)
      for (std::size_t j = i; j < i + h; ++j) {
        const T a = v[j];
        const T b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
}

/// Tr(P M) for every Pauli string P, indexed by PauliString::index.
std::vector<Complex> all_pauli_traces(const Eigen::MatrixXcd& m);
/// <psi|P|psi> for every Pauli string, same indexing.
std::vector<Complex> all_pauli_expectations(const QubitState& s);
/// Inverse of all_pauli_traces: M = 2^-N sum_P t_P P.
Eigen::MatrixXcd matrix_from_pauli_traces(const std::vector<Complex>& traces, int n_qubits);

/// Counts per outcome index (bit i = measured value of qubit i).
using Histogram = std::vector<std::uint64_t>;

std::uint64_t histogram_total(const Histogram& h);
std::string bitstring(std::uint64_t bits, int n);
std::uint64_t parse_bitstring(const std::string& s);

/// Draws `shots` outcomes from `probs` as one multinomial sample.
Histogram sample_multinomial(const std::vector<double>& probs, std::uint64_t shots,
                             std::mt19937_64& rng);

/// Rotates each qubit into its measurement axis and samples the Born
/// distribution. Deterministic for a fixed seed.
Histogram sample_counts(const QubitState& s, const std::vector<Axis>& bases, std::uint64_t shots,
                        std::uint64_t seed);

}  // namespace efqse

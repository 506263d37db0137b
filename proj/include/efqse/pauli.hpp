#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "efqse/fermion.hpp"

namespace efqse {

/// Hermitian Pauli string on up to 32 qubits, stored as bit masks:
/// P = i^{|x & z|} X^x Z^z, so a qubit with both bits set carries Y.
struct PauliString {
  std::uint32_t x = 0;
  std::uint32_t z = 0;

  friend bool operator==(const PauliString&, const PauliString&) = default;
  friend auto operator<=>(const PauliString&, const PauliString&) = default;

  std::uint32_t support() const { return x | z; }
  bool is_identity() const { return (x | z) == 0; }
  bool is_diagonal() const { return x == 0; }

  /// Letters over {I,X,Y,Z}; character i acts on qubit i.
  std::string letters(int n_qubits) const;
  static PauliString from_letters(const std::string& s);

  /// Dense index in [0, 4^n): (x << n) | z.
  std::size_t index(int n_qubits) const { return (std::size_t{x} << n_qubits) | z; }
  static PauliString from_index(std::size_t idx, int n_qubits);
};

/// Product a*b as phase * PauliString; phase is i^k with k returned in [0,4).
std::pair<int, PauliString> multiply(const PauliString& a, const PauliString& b);

Complex i_power(int k);

/// Linear combination of Pauli strings on a fixed register size.
class PauliSum {
 public:
  explicit PauliSum(int n_qubits = 0) : n_(n_qubits) {}

  int n_qubits() const { return n_; }
  const std::map<PauliString, Complex>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  void add(const PauliString& p, Complex c);
  PauliSum& operator+=(const PauliSum& o);
  PauliSum& operator*=(Complex c);
  friend PauliSum operator*(const PauliSum& a, const PauliSum& b);

  PauliSum adjoint() const;
  bool is_hermitian(double tol = 1e-10) const;
  void prune(double tol = kFermionDropTolerance);

  Eigen::MatrixXcd to_dense() const;

 private:
  int n_;
  std::map<PauliString, Complex> terms_;
};

/// Jordan-Wigner image of a single-spin operator on an N-qubit register.
/// Throws ContractViolation if the operator mixes spin labels.
PauliSum jordan_wigner(const FermionOperator& op, int n_qubits);

/// Jordan-Wigner image of one ladder string whose factors may carry either
/// spin label; spins are ignored and orbital p maps to qubit p.
PauliSum jordan_wigner_string(const LadderString& ops, int n_qubits);

/// Sum_mu c_mu A_mu (x) B_mu with A on the alpha and B on the beta register.
struct BipartiteTerm {
  Complex coeff;
  PauliString alpha;
  PauliString beta;
};

class BipartiteOperator {
 public:
  explicit BipartiteOperator(int n_qubits = 0) : n_(n_qubits) {}
  int n_qubits() const { return n_; }

  void add(const PauliString& a, const PauliString& b, Complex c);
  const std::map<std::pair<PauliString, PauliString>, Complex>& terms() const { return terms_; }
  std::vector<BipartiteTerm> term_list() const;
  std::size_t size() const { return terms_.size(); }

  /// Dense 4^N x 4^N matrix with the alpha register on the low qubits.
  Eigen::MatrixXcd to_dense() const;

 private:
  int n_;
  std::map<std::pair<PauliString, PauliString>, Complex> terms_;
};

/// Splits every term of op into alpha and beta factors with all alpha modes
/// ordered before beta modes, maps each factor with Jordan-Wigner on its
/// own register, and folds the reordering sign plus the alpha parity string
/// carried by odd beta factors into the coefficients.
BipartiteOperator bipartition(const FermionOperator& op, int n_qubits);

}  // namespace efqse

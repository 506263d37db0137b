#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "efqse/chemio.hpp"

namespace efqse {

using Complex = std::complex<double>;

enum class Spin : std::uint8_t { Alpha = 0, Beta = 1 };

struct LadderOp {
  int orbital = 0;
  Spin spin = Spin::Alpha;
  bool create = false;

  friend bool operator==(const LadderOp&, const LadderOp&) = default;
  friend bool operator<(const LadderOp& a, const LadderOp& b);
};

inline LadderOp cre(int p, Spin s) { return {p, s, true}; }
inline LadderOp des(int p, Spin s) { return {p, s, false}; }

/// Product of ladder operators. Used as the key of a FermionOperator term.
using LadderString = std::vector<LadderOp>;

/// Coefficients smaller than this are dropped after merging.
inline constexpr double kFermionDropTolerance = 1e-12;

/// Second-quantized operator stored in normal order: creators first, then
/// annihilators, each group ascending in (spin, orbital) with all alpha
/// modes before all beta modes. Anticommutation signs and contraction terms
/// are generated when a product is brought into this form.
class FermionOperator {
 public:
  FermionOperator() = default;
  static FermionOperator identity(Complex c = 1.0);

  /// Adds c * (product of ops in the given order), normal-ordering it.
  void add(Complex c, const LadderString& ops);

  const std::map<LadderString, Complex>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  FermionOperator adjoint() const;
  bool is_hermitian(double tol = 1e-10) const;

  FermionOperator& operator+=(const FermionOperator& o);
  FermionOperator& operator-=(const FermionOperator& o);
  FermionOperator& operator*=(Complex c);
  friend FermionOperator operator+(FermionOperator a, const FermionOperator& b) { return a += b; }
  friend FermionOperator operator-(FermionOperator a, const FermionOperator& b) { return a -= b; }
  friend FermionOperator operator*(FermionOperator a, Complex c) { return a *= c; }
  friend FermionOperator operator*(Complex c, FermionOperator a) { return a *= c; }
  friend FermionOperator operator*(const FermionOperator& a, const FermionOperator& b);

  /// Largest orbital index appearing plus one.
  int min_orbitals() const;

 private:
  void accumulate(const LadderString& key, Complex c);
  void prune();
  std::map<LadderString, Complex> terms_;
};

/// Brings an arbitrary ladder product into normal order.
/// Returns the resulting linear combination as (coefficient, string) pairs.
std::vector<std::pair<Complex, LadderString>> normal_order(const LadderString& ops);

/// E_core + sum h_pq a+_ps a_qs + 1/2 sum (pr|qs) a+_ps a+_qt a_st a_rs.
FermionOperator build_hamiltonian(const MolecularIntegrals& ints);

/// S^2 = S- S+ + Sz (Sz + 1).
FermionOperator total_spin_operator(int n_orbitals);
FermionOperator number_operator(int n_orbitals);
FermionOperator sz_operator(int n_orbitals);

/// Applies op to a vector over the 2N-mode Fock space. Mode m = orbital +
/// N * spin maps to bit m of the basis index (Jordan-Wigner ordering).
std::vector<Complex> apply_fermion(const FermionOperator& op, int n_orbitals,
                                   const std::vector<Complex>& psi);

/// Splits a normal-ordered string into its alpha and beta factors, returning
/// the sign picked up by moving every alpha factor to the left.
struct SpinSplit {
  int sign = 1;
  LadderString alpha;
  LadderString beta;
};
SpinSplit split_by_spin(const LadderString& ops);

}  // namespace efqse

#include "efqse/pauli.hpp"

#include <bit>

#include "efqse/errors.hpp"

namespace efqse {

Complex i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

std::string PauliString::letters(int n_qubits) const {
  std::string s(static_cast<std::size_t>(n_qubits), 'I');
  for (int q = 0; q < n_qubits; ++q) {
    const bool bx = (x >> q) & 1u;
    const bool bz = (z >> q) & 1u;
    s[static_cast<std::size_t>(q)] = bx ? (bz ? 'Y' : 'X') : (bz ? 'Z' : 'I');
  }
  return s;
}

PauliString PauliString::from_letters(const std::string& s) {
  if (s.size() > 32) throw BoundsError("Pauli strings are limited to 32 qubits");
  PauliString p;
  for (std::size_t q = 0; q < s.size(); ++q) {
    const std::uint32_t bit = 1u << q;
    switch (s[q]) {
      case 'I': break;
      case 'X': p.x |= bit; break;
      case 'Y': p.x |= bit; p.z |= bit; break;
      case 'Z': p.z |= bit; break;
      default: throw ParseError(std::string("invalid Pauli letter '") + s[q] + "'");
    }
  }
  return p;
}

PauliString PauliString::from_index(std::size_t idx, int n_qubits) {
  const std::size_t mask = (std::size_t{1} << n_qubits) - 1;
  return {static_cast<std::uint32_t>(idx >> n_qubits), static_cast<std::uint32_t>(idx & mask)};
}

std::pair<int, PauliString> multiply(const PauliString& a, const PauliString& b) {
  const PauliString r{a.x ^ b.x, a.z ^ b.z};
  const int k = std::popcount(a.x & a.z) + std::popcount(b.x & b.z) +
                2 * std::popcount(a.z & b.x) - std::popcount(r.x & r.z);
  return {((k % 4) + 4) % 4, r};
}

void PauliSum::add(const PauliString& p, Complex c) {
  if (n_ < 32 && (p.support() >> n_) != 0) throw BoundsError("Pauli string exceeds register size");
  terms_[p] += c;
}

PauliSum& PauliSum::operator+=(const PauliSum& o) {
  if (o.n_ != n_) throw ContractViolation("adding Pauli sums on different register sizes");
  for (const auto& [p, c] : o.terms_) terms_[p] += c;
  return *this;
}

PauliSum& PauliSum::operator*=(Complex c) {
  for (auto& [p, v] : terms_) v *= c;
  return *this;
}

PauliSum operator*(const PauliSum& a, const PauliSum& b) {
  if (a.n_ != b.n_) throw ContractViolation("multiplying Pauli sums on different register sizes");
  PauliSum out(a.n_);
  for (const auto& [pa, ca] : a.terms_) {
    for (const auto& [pb, cb] : b.terms_) {
      const auto [k, r] = multiply(pa, pb);
      out.terms_[r] += ca * cb * i_power(k);
    }
  }
  out.prune();
  return out;
}

PauliSum PauliSum::adjoint() const {
  PauliSum out(n_);
  for (const auto& [p, c] : terms_) out.terms_[p] = std::conj(c);
  return out;
}

bool PauliSum::is_hermitian(double tol) const {
  for (const auto& [p, c] : terms_) {
    if (std::abs(c.imag()) > tol) return false;
  }
  return true;
}

void PauliSum::prune(double tol) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) < tol) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
}

namespace {

void add_pauli_to_dense(Eigen::MatrixXcd& m, const PauliString& p, Complex c) {
  const Complex phase = c * i_power(std::popcount(p.x & p.z));
  const auto dim = static_cast<std::uint64_t>(m.rows());
  for (std::uint64_t b = 0; b < dim; ++b) {
    const double sign = (std::popcount(b & p.z) & 1) ? -1.0 : 1.0;
    m(static_cast<Eigen::Index>(b ^ p.x), static_cast<Eigen::Index>(b)) += phase * sign;
  }
}

}  // namespace

Eigen::MatrixXcd PauliSum::to_dense() const {
  const Eigen::Index dim = Eigen::Index{1} << n_;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [p, c] : terms_) add_pauli_to_dense(m, p, c);
  return m;
}

PauliSum jordan_wigner_string(const LadderString& ops, int n_qubits) {
  PauliSum out(n_qubits);
  out.add(PauliString{}, 1.0);
  for (const auto& op : ops) {
    if (op.orbital >= n_qubits) throw BoundsError("orbital index exceeds register size");
    const std::uint32_t bit = 1u << op.orbital;
    const std::uint32_t low = bit - 1u;
    PauliSum ladder(n_qubits);
    ladder.add(PauliString{bit, low}, 0.5);
    ladder.add(PauliString{bit, low | bit}, Complex(0.0, op.create ? -0.5 : 0.5));
    out = out * ladder;
  }
  return out;
}

PauliSum jordan_wigner(const FermionOperator& op, int n_qubits) {
  PauliSum out(n_qubits);
  bool have_spin = false;
  Spin spin = Spin::Alpha;
  for (const auto& [s, c] : op.terms()) {
    for (const auto& f : s) {
      if (!have_spin) {
        spin = f.spin;
        have_spin = true;
      } else if (f.spin != spin) {
        throw ContractViolation("jordan_wigner needs an operator on a single spin sector");
      }
    }
    PauliSum t = jordan_wigner_string(s, n_qubits);
    t *= c;
    out += t;
  }
  out.prune();
  return out;
}

void BipartiteOperator::add(const PauliString& a, const PauliString& b, Complex c) {
  terms_[{a, b}] += c;
}

std::vector<BipartiteTerm> BipartiteOperator::term_list() const {
  std::vector<BipartiteTerm> out;
  out.reserve(terms_.size());
  for (const auto& [k, c] : terms_) out.push_back({c, k.first, k.second});
  return out;
}

Eigen::MatrixXcd BipartiteOperator::to_dense() const {
  const Eigen::Index dim = Eigen::Index{1} << n_;
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim * dim, dim * dim);
  for (const auto& [k, c] : terms_) {
    PauliSum a(n_), b(n_);
    a.add(k.first, 1.0);
    b.add(k.second, 1.0);
    const Eigen::MatrixXcd ma = a.to_dense();
    const Eigen::MatrixXcd mb = b.to_dense();
    for (Eigen::Index ib = 0; ib < dim; ++ib)
      for (Eigen::Index jb = 0; jb < dim; ++jb) {
        if (mb(ib, jb) == Complex(0.0)) continue;
        full.block(ib * dim, jb * dim, dim, dim) += c * mb(ib, jb) * ma;
      }
  }
  return full;
}

BipartiteOperator bipartition(const FermionOperator& op, int n_qubits) {
  BipartiteOperator out(n_qubits);
  const PauliString parity{0u, n_qubits >= 32 ? ~0u : ((1u << n_qubits) - 1u)};
  for (const auto& [s, c] : op.terms()) {
    const SpinSplit split = split_by_spin(s);
    PauliSum a = jordan_wigner_string(split.alpha, n_qubits);
    if (split.beta.size() % 2 == 1) {
      PauliSum z(n_qubits);
      z.add(parity, 1.0);
      a = a * z;
    }
    const PauliSum b = jordan_wigner_string(split.beta, n_qubits);
    for (const auto& [pa, ca] : a.terms())
      for (const auto& [pb, cb] : b.terms()) {
        out.add(pa, pb, c * static_cast<double>(split.sign) * ca * cb);
      }
  }
  // Drop cancelled terms.
  auto terms = out.term_list();
  BipartiteOperator pruned(n_qubits);
  for (const auto& t : terms) {
    if (std::abs(t.coeff) >= kFermionDropTolerance) pruned.add(t.alpha, t.beta, t.coeff);
  }
  return pruned;
}

}  // namespace efqse

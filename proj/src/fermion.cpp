#include "efqse/fermion.hpp"

#include <algorithm>
#include <bit>
#include <tuple>

#include "efqse/errors.hpp"

namespace efqse {

namespace {

// Sort key of a ladder operator in normal order.
std::tuple<int, int, int> order_key(const LadderOp& op) {
  return {op.create ? 0 : 1, static_cast<int>(op.spin), op.orbital};
}

bool same_mode(const LadderOp& a, const LadderOp& b) {
  return a.orbital == b.orbital && a.spin == b.spin;
}

}  // namespace

bool operator<(const LadderOp& a, const LadderOp& b) { return order_key(a) < order_key(b); }

std::vector<std::pair<Complex, LadderString>> normal_order(const LadderString& ops) {
  std::vector<std::pair<Complex, LadderString>> done;
  std::vector<std::pair<Complex, LadderString>> work{{1.0, ops}};
  while (!work.empty()) {
    auto [c, s] = std::move(work.back());
    work.pop_back();
    bool sorted = true;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const auto ki = order_key(s[i]);
      const auto kj = order_key(s[i + 1]);
      if (ki < kj) continue;
      sorted = false;
      if (ki == kj) break;  // a_p a_p = 0
      if (!s[i].create && s[i + 1].create && same_mode(s[i], s[i + 1])) {
        // a_p a+_p = 1 - a+_p a_p
        LadderString contracted;
        contracted.reserve(s.size() - 2);
        contracted.insert(contracted.end(), s.begin(), s.begin() + static_cast<long>(i));
        contracted.insert(contracted.end(), s.begin() + static_cast<long>(i) + 2, s.end());
        work.emplace_back(c, std::move(contracted));
      }
      std::swap(s[i], s[i + 1]);
      work.emplace_back(-c, std::move(s));
      break;
    }
    if (sorted) done.emplace_back(c, std::move(s));
  }
  return done;
}

FermionOperator FermionOperator::identity(Complex c) {
  FermionOperator op;
  op.add(c, {});
  return op;
}

void FermionOperator::accumulate(const LadderString& key, Complex c) { terms_[key] += c; }

void FermionOperator::prune() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) < kFermionDropTolerance) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
}

void FermionOperator::add(Complex c, const LadderString& ops) {
  if (c == Complex(0.0)) return;
  for (const auto& op : ops) {
    if (op.orbital < 0) throw BoundsError("negative orbital index in ladder operator");
  }
  for (auto& [coef, s] : normal_order(ops)) accumulate(s, c * coef);
  prune();
}

FermionOperator FermionOperator::adjoint() const {
  FermionOperator out;
  for (const auto& [s, c] : terms_) {
    LadderString rev(s.rbegin(), s.rend());
    for (auto& op : rev) op.create = !op.create;
    for (auto& [coef, t] : normal_order(rev)) out.accumulate(t, std::conj(c) * coef);
  }
  out.prune();
  return out;
}

bool FermionOperator::is_hermitian(double tol) const {
  const FermionOperator diff = *this - adjoint();
  for (const auto& [s, c] : diff.terms()) {
    if (std::abs(c) > tol) return false;
  }
  return true;
}

FermionOperator& FermionOperator::operator+=(const FermionOperator& o) {
  for (const auto& [s, c] : o.terms_) accumulate(s, c);
  prune();
  return *this;
}

FermionOperator& FermionOperator::operator-=(const FermionOperator& o) {
  for (const auto& [s, c] : o.terms_) accumulate(s, -c);
  prune();
  return *this;
}

FermionOperator& FermionOperator::operator*=(Complex c) {
  for (auto& [s, v] : terms_) v *= c;
  prune();
  return *this;
}

FermionOperator operator*(const FermionOperator& a, const FermionOperator& b) {
  FermionOperator out;
  for (const auto& [sa, ca] : a.terms_) {
    for (const auto& [sb, cb] : b.terms_) {
      LadderString joined = sa;
      joined.insert(joined.end(), sb.begin(), sb.end());
      for (auto& [coef, s] : normal_order(joined)) out.accumulate(s, ca * cb * coef);
    }
  }
  out.prune();
  return out;
}

int FermionOperator::min_orbitals() const {
  int n = 0;
  for (const auto& [s, c] : terms_) {
    for (const auto& op : s) n = std::max(n, op.orbital + 1);
  }
  return n;
}

FermionOperator build_hamiltonian(const MolecularIntegrals& ints) {
  ints.validate();
  const int n = ints.n_orbitals();
  FermionOperator h = FermionOperator::identity(ints.core_energy);
  const Spin spins[2] = {Spin::Alpha, Spin::Beta};
  for (Spin s : spins) {
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        const double v = ints.h(p, q);
        if (v != 0.0) h.add(v, {cre(p, s), des(q, s)});
      }
  }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int t = 0; t < n; ++t) {
          const double v = ints.eri(p, r, q, t);
          if (v == 0.0) continue;
          for (Spin s1 : spins)
            for (Spin s2 : spins) {
              if (s1 == s2 && (p == q || r == t)) continue;
              h.add(0.5 * v, {cre(p, s1), cre(q, s2), des(t, s2), des(r, s1)});
            }
        }
  return h;
}

FermionOperator sz_operator(int n_orbitals) {
  FermionOperator sz;
  for (int p = 0; p < n_orbitals; ++p) {
    sz.add(0.5, {cre(p, Spin::Alpha), des(p, Spin::Alpha)});
    sz.add(-0.5, {cre(p, Spin::Beta), des(p, Spin::Beta)});
  }
  return sz;
}

FermionOperator number_operator(int n_orbitals) {
  FermionOperator n;
  for (int p = 0; p < n_orbitals; ++p) {
    n.add(1.0, {cre(p, Spin::Alpha), des(p, Spin::Alpha)});
    n.add(1.0, {cre(p, Spin::Beta), des(p, Spin::Beta)});
  }
  return n;
}

FermionOperator total_spin_operator(int n_orbitals) {
  FermionOperator splus, sminus;
  for (int p = 0; p < n_orbitals; ++p) {
    splus.add(1.0, {cre(p, Spin::Alpha), des(p, Spin::Beta)});
    sminus.add(1.0, {cre(p, Spin::Beta), des(p, Spin::Alpha)});
  }
  const FermionOperator sz = sz_operator(n_orbitals);
  return sminus * splus + sz * (sz + FermionOperator::identity());
}

std::vector<Complex> apply_fermion(const FermionOperator& op, int n_orbitals,
                                   const std::vector<Complex>& psi) {
  const int modes = 2 * n_orbitals;
  if (psi.size() != (std::size_t{1} << modes)) {
    throw ContractViolation("state dimension does not match 2^(2N)");
  }
  if (op.min_orbitals() > n_orbitals) throw BoundsError("operator acts outside the register");
  std::vector<Complex> out(psi.size(), 0.0);
  for (const auto& [s, c] : op.terms()) {
    for (std::uint64_t b = 0; b < psi.size(); ++b) {
      if (psi[b] == Complex(0.0)) continue;
      std::uint64_t state = b;
      int sign = 1;
      bool alive = true;
      for (auto it = s.rbegin(); it != s.rend() && alive; ++it) {
        const int m = it->orbital + n_orbitals * static_cast<int>(it->spin);
        const std::uint64_t bit = std::uint64_t{1} << m;
        const bool occ = (state & bit) != 0;
        if (occ == it->create) {
          alive = false;
          break;
        }
        if (std::popcount(state & (bit - 1)) & 1) sign = -sign;
        state ^= bit;
      }
      if (alive) out[state] += c * static_cast<double>(sign) * psi[b];
    }
  }
  return out;
}

SpinSplit split_by_spin(const LadderString& ops) {
  SpinSplit out;
  int betas_seen = 0;
  for (const auto& op : ops) {
    if (op.spin == Spin::Alpha) {
      if (betas_seen & 1) out.sign = -out.sign;
      out.alpha.push_back(op);
    } else {
      ++betas_seen;
      out.beta.push_back(op);
    }
  }
  return out;
}

}  // namespace efqse

#pragma once

// Brute-force Fock-space reference used by the tests. Everything here is
// written from the textbook definitions on purpose and shares no code with
// the library beyond the integral container, so agreement is meaningful.

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "efqse/chemio.hpp"
#include "efqse/forging.hpp"

namespace oracle {

using cd = std::complex<double>;
using Vec = std::vector<cd>;

/// a_m or a+_m on a Fock vector; mode m is bit m, sign from occupied modes
/// below m.
inline Vec ladder(const Vec& v, int mode, bool create) {
  Vec out(v.size(), 0.0);
  const std::uint64_t bit = std::uint64_t{1} << mode;
  for (std::uint64_t i = 0; i < v.size(); ++i) {
    if (v[i] == cd(0.0)) continue;
    const bool occupied = i & bit;
    if (occupied == create) continue;
    const int parity = std::popcount(i & (bit - 1)) & 1;
    out[i ^ bit] += (parity ? -1.0 : 1.0) * v[i];
  }
  return out;
}

inline void axpy(Vec& y, cd a, const Vec& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

inline cd dot(const Vec& a, const Vec& b) {
  cd s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

/// H = E_core + sum h_pq a+_p a_q + 1/2 sum (pq|rs) a+_p(s) a+_r(t) a_s(t) a_q(s),
/// with spin-orbital mode = orbital + n * spin.
inline Vec apply_hamiltonian(const efqse::MolecularIntegrals& ints, const Vec& psi) {
  const int n = ints.n_orbitals();
  Vec out(psi.size(), 0.0);
  axpy(out, ints.core_energy, psi);
  for (int s = 0; s < 2; ++s)
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        if (ints.h(p, q) == 0.0) continue;
        axpy(out, ints.h(p, q), ladder(ladder(psi, q + n * s, false), p + n * s, true));
      }
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t)
      for (int q = 0; q < n; ++q) {
        const Vec a1 = ladder(psi, q + n * s, false);
        for (int sidx = 0; sidx < n; ++sidx) {
          const Vec a2 = ladder(a1, sidx + n * t, false);
          for (int r = 0; r < n; ++r) {
            const Vec a3 = ladder(a2, r + n * t, true);
            for (int p = 0; p < n; ++p) {
              const double v = ints.eri(p, q, r, sidx);
              if (v == 0.0) continue;
              axpy(out, 0.5 * v, ladder(a3, p + n * s, true));
            }
          }
        }
      }
  return out;
}

/// S^2 = Sz^2 + (S+ S- + S- S+) / 2.
inline Vec apply_spin_squared(int n, const Vec& psi) {
  auto s_plus = [&](const Vec& v) {
    Vec o(v.size(), 0.0);
    for (int p = 0; p < n; ++p) axpy(o, 1.0, ladder(ladder(v, p + n, false), p, true));
    return o;
  };
  auto s_minus = [&](const Vec& v) {
    Vec o(v.size(), 0.0);
    for (int p = 0; p < n; ++p) axpy(o, 1.0, ladder(ladder(v, p, false), p + n, true));
    return o;
  };
  Vec out(psi.size(), 0.0);
  const std::uint64_t amask = (std::uint64_t{1} << n) - 1;
  for (std::uint64_t i = 0; i < psi.size(); ++i) {
    const double sz = 0.5 * (std::popcount(i & amask) - std::popcount(i >> n));
    out[i] += sz * sz * psi[i];
  }
  axpy(out, 0.5, s_plus(s_minus(psi)));
  axpy(out, 0.5, s_minus(s_plus(psi)));
  return out;
}

/// Hamiltonian restricted to the (n_alpha, n_beta) sector; basis ordered by
/// ascending alpha string, then ascending beta string.
inline Eigen::MatrixXd sector_hamiltonian(const efqse::MolecularIntegrals& ints, int na, int nb,
                                          std::vector<std::uint64_t>* fock_index = nullptr) {
  const int n = ints.n_orbitals();
  std::vector<std::uint64_t> as, bs, idx;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
    if (std::popcount(s) == na) as.push_back(s);
    if (std::popcount(s) == nb) bs.push_back(s);
  }
  for (auto a : as)
    for (auto b : bs) idx.push_back(a | (b << n));
  const auto d = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd h(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    Vec e(std::size_t{1} << (2 * n), 0.0);
    e[idx[static_cast<std::size_t>(c)]] = 1.0;
    const Vec he = apply_hamiltonian(ints, e);
    for (Eigen::Index r = 0; r < d; ++r) h(r, c) = he[idx[static_cast<std::size_t>(r)]].real();
  }
  if (fock_index) *fock_index = idx;
  return h;
}

/// Two-qubit hop gate as an explicit 4x4 matrix over |q1 q2> in the order
/// 00, 01, 10, 11 (first label = q1).
inline Eigen::Matrix4d hop_matrix(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
  g(0, 0) = 1.0;
  g(1, 1) = c;   // <01|G|01>
  g(2, 1) = s;   // <10|G|01>
  g(1, 2) = s;   // <01|G|10>
  g(2, 2) = -c;  // <10|G|10>
  g(3, 3) = -1.0;
  return g;
}

inline Vec apply_hop(const Vec& v, double theta, int q1, int q2) {
  const Eigen::Matrix4d g = hop_matrix(theta);
  Vec out(v.size(), 0.0);
  for (std::uint64_t i = 0; i < v.size(); ++i) {
    const int col = 2 * static_cast<int>((i >> q1) & 1) + static_cast<int>((i >> q2) & 1);
    const std::uint64_t base = i & ~((std::uint64_t{1} << q1) | (std::uint64_t{1} << q2));
    for (int row = 0; row < 4; ++row) {
      const double m = g(row, col);
      if (m == 0.0) continue;
      const std::uint64_t j = base | (static_cast<std::uint64_t>(row >> 1) << q1) |
                              (static_cast<std::uint64_t>(row & 1) << q2);
      out[j] += m * v[i];
    }
  }
  return out;
}

/// U(theta)|x> on N qubits.
inline Vec register_state(const efqse::ForgedAnsatz& a, std::uint64_t x) {
  Vec v(std::size_t{1} << a.n_qubits, 0.0);
  v[x] = 1.0;
  for (std::size_t h = 0; h < a.hop_layout.size(); ++h) {
    v = apply_hop(v, a.thetas[static_cast<std::size_t>(a.hop_parameter[h])], a.hop_layout[h].first,
                  a.hop_layout[h].second);
  }
  return v;
}

/// sum_k lambda_k U|x_k> (x) U|x_k>, alpha register on the low bits.
inline Vec forged_state(const efqse::ForgedAnsatz& a) {
  const std::size_t dim = std::size_t{1} << a.n_qubits;
  Vec out(dim * dim, 0.0);
  for (std::size_t k = 0; k < a.bitstrings.size(); ++k) {
    const Vec phi = register_state(a, a.bitstrings[k]);
    for (std::size_t b = 0; b < dim; ++b)
      for (std::size_t al = 0; al < dim; ++al) out[al | (b << a.n_qubits)] += a.schmidt[k] * phi[al] * phi[b];
  }
  return out;
}

/// Dense Pauli string from letters, character i acting on qubit i.
inline Eigen::MatrixXcd pauli_matrix(const std::string& letters) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
  for (char ch : letters) {
    Eigen::Matrix2cd p;
    switch (ch) {
      case 'X': p << 0, 1, 1, 0; break;
      case 'Y': p << 0, cd(0, -1), cd(0, 1), 0; break;
      case 'Z': p << 1, 0, 0, -1; break;
      default: p << 1, 0, 0, 1; break;
    }
    // Qubit i is bit i, so later letters are more significant.
    Eigen::MatrixXcd next(m.rows() * 2, m.cols() * 2);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) next.block(r * m.rows(), c * m.cols(), m.rows(), m.cols()) = p(r, c) * m;
    m = next;
  }
  return m;
}

/// Random real integrals with full 8-fold symmetry and no point-group
/// structure (every orbital A1).
inline efqse::MolecularIntegrals random_integrals(int n, int n_electrons, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  efqse::MolecularIntegrals ints(n);
  ints.n_alpha = ints.n_beta = n_electrons / 2;
  ints.core_energy = 0.5 * g(rng);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q) ints.set_h(p, q, p == q ? -1.0 + 0.3 * p + 0.1 * g(rng) : 0.1 * g(rng));
  std::vector<Eigen::MatrixXd> ls;
  for (int k = 0; k < n + 2; ++k) {
    Eigen::MatrixXd l(n, n);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q <= p; ++q) l(p, q) = l(q, p) = (p == q ? 0.4 : 0.1) * g(rng);
    ls.push_back(l);
  }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s <= r; ++s) {
          double v = 0.0;
          for (const auto& l : ls) v += l(p, q) * l(r, s);
          ints.set_eri(p, q, r, s, v);
        }
  return ints;
}

/// Random ansatz: K bitstrings at mutual distance 2, hops on random pairs,
/// random angles and a random normalized Schmidt vector.
inline efqse::ForgedAnsatz random_ansatz(int n, int n_occ, int n_strings, int n_hops, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  std::uniform_int_distribution<int> qubit(0, n - 1);
  efqse::ForgedAnsatz a;
  a.n_qubits = n;
  const std::uint64_t hf = (std::uint64_t{1} << n_occ) - 1;
  a.bitstrings.push_back(hf);
  // Strings HF with the top occupied orbital moved to distinct virtuals are
  // pairwise at distance 2.
  for (int k = 1; k < n_strings; ++k) {
    a.bitstrings.push_back((hf & ~(std::uint64_t{1} << (n_occ - 1))) | (std::uint64_t{1} << (n_occ - 1 + k)));
  }
  for (int h = 0; h < n_hops; ++h) {
    int q1 = qubit(rng), q2 = qubit(rng);
    while (q2 == q1) q2 = qubit(rng);
    a.hop_layout.emplace_back(q1, q2);
    a.hop_parameter.push_back(h);
    a.thetas.push_back(ang(rng));
  }
  double norm = 0.0;
  for (int k = 0; k < n_strings; ++k) {
    a.schmidt.push_back(ang(rng));
    norm += a.schmidt.back() * a.schmidt.back();
  }
  for (auto& l : a.schmidt) l /= std::sqrt(norm);
  return a;
}

}  // namespace oracle

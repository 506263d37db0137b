#include "efqse/casci.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <unordered_map>

#include <Eigen/Sparse>

#include "efqse/errors.hpp"
#include "efqse/parallel.hpp"

namespace efqse {

namespace {

std::vector<std::uint64_t> strings_of_weight(int n, int k) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
    if (std::popcount(s) == k) out.push_back(s);
  }
  return out;
}

// Parity of occupied bits strictly below orbital p.
int parity_below(std::uint64_t s, int p) {
  return std::popcount(s & ((std::uint64_t{1} << p) - 1)) & 1;
}

// Sign of a+_a a_i acting on string s (i occupied, a empty, or a == i).
int single_sign(std::uint64_t s, int i, int a) {
  int par = parity_below(s, i);
  s &= ~(std::uint64_t{1} << i);
  par += parity_below(s, a);
  return (par & 1) ? -1 : 1;
}

// Sign of a+_a a+_b a_j a_i acting on s.
int double_sign(std::uint64_t s, int i, int j, int a, int b) {
  int par = parity_below(s, i);
  s &= ~(std::uint64_t{1} << i);
  par += parity_below(s, j);
  s &= ~(std::uint64_t{1} << j);
  par += parity_below(s, b);
  s |= std::uint64_t{1} << b;
  par += parity_below(s, a);
  return (par & 1) ? -1 : 1;
}

std::vector<int> bits_of(std::uint64_t s) {
  std::vector<int> out;
  while (s) {
    out.push_back(std::countr_zero(s));
    s &= s - 1;
  }
  return out;
}

double diagonal_energy(const Determinant& d, const MolecularIntegrals& ints) {
  const auto oa = bits_of(d.alpha);
  const auto ob = bits_of(d.beta);
  double e = ints.core_energy;
  for (int p : oa) e += ints.h(p, p);
  for (int p : ob) e += ints.h(p, p);
  for (const auto* occ : {&oa, &ob}) {
    for (std::size_t x = 0; x < occ->size(); ++x)
      for (std::size_t y = x + 1; y < occ->size(); ++y) {
        const int p = (*occ)[x], q = (*occ)[y];
        e += ints.eri(p, p, q, q) - ints.eri(p, q, q, p);
      }
  }
  for (int p : oa)
    for (int q : ob) e += ints.eri(p, p, q, q);
  return e;
}

}  // namespace

DeterminantBasis DeterminantBasis::build(int n_orbitals, int n_alpha, int n_beta) {
  if (n_orbitals < 1 || n_orbitals > 31) throw BoundsError("CASCI supports 1..31 orbitals");
  if (n_alpha < 0 || n_beta < 0 || n_alpha > n_orbitals || n_beta > n_orbitals) {
    throw ContractViolation("electron counts incompatible with the orbital count");
  }
  DeterminantBasis b;
  b.n_orbitals = n_orbitals;
  b.n_alpha = n_alpha;
  b.n_beta = n_beta;
  b.alpha_strings = strings_of_weight(n_orbitals, n_alpha);
  b.beta_strings = strings_of_weight(n_orbitals, n_beta);
  return b;
}

Irrep determinant_irrep(const Determinant& d, const std::vector<Irrep>& orbital_irreps) {
  Irrep r = Irrep::A1;
  for (int p : bits_of(d.alpha ^ d.beta)) r = irrep_product(r, orbital_irreps[static_cast<std::size_t>(p)]);
  return r;
}

double slater_condon_element(const Determinant& d1, const Determinant& d2, const MolecularIntegrals& ints) {
  const std::uint64_t da = d1.alpha ^ d2.alpha;
  const std::uint64_t db = d1.beta ^ d2.beta;
  const int na = std::popcount(da) / 2;
  const int nb = std::popcount(db) / 2;
  if (std::popcount(d1.alpha) != std::popcount(d2.alpha) || std::popcount(d1.beta) != std::popcount(d2.beta)) {
    return 0.0;
  }
  if (na + nb > 2) return 0.0;
  if (na + nb == 0) return diagonal_energy(d1, ints);

  if (na + nb == 1) {
    const bool alpha = na == 1;
    const std::uint64_t s1 = alpha ? d1.alpha : d1.beta;
    const std::uint64_t s2 = alpha ? d2.alpha : d2.beta;
    const std::uint64_t other = alpha ? d1.beta : d1.alpha;
    const int i = std::countr_zero(s1 & ~s2);
    const int a = std::countr_zero(s2 & ~s1);
    double v = ints.h(a, i);
    for (int k : bits_of(s1)) v += ints.eri(a, i, k, k) - ints.eri(a, k, k, i);
    for (int k : bits_of(other)) v += ints.eri(a, i, k, k);
    // <d2| a+_a a_i |d1> sign.
    return v * single_sign(s1, i, a);
  }

  if (na == 2 || nb == 2) {
    const bool alpha = na == 2;
    const std::uint64_t s1 = alpha ? d1.alpha : d1.beta;
    const std::uint64_t s2 = alpha ? d2.alpha : d2.beta;
    const auto holes = bits_of(s1 & ~s2);
    const auto parts = bits_of(s2 & ~s1);
    const int i = holes[0], j = holes[1], a = parts[0], b = parts[1];
    const double v = ints.eri(a, i, b, j) - ints.eri(a, j, b, i);
    return v * double_sign(s1, i, j, a, b);
  }

  // One alpha and one beta excitation.
  const int i = std::countr_zero(d1.alpha & ~d2.alpha);
  const int a = std::countr_zero(d2.alpha & ~d1.alpha);
  const int j = std::countr_zero(d1.beta & ~d2.beta);
  const int b = std::countr_zero(d2.beta & ~d1.beta);
  return ints.eri(a, i, b, j) * single_sign(d1.alpha, i, a) * single_sign(d1.beta, j, b);
}

Eigen::MatrixXd casci_matrix(const MolecularIntegrals& ints, const DeterminantBasis& basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd h(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Determinant dr{basis.alpha(static_cast<std::size_t>(r)), basis.beta(static_cast<std::size_t>(r))};
    for (Eigen::Index c = 0; c <= r; ++c) {
      const Determinant dc{basis.alpha(static_cast<std::size_t>(c)), basis.beta(static_cast<std::size_t>(c))};
      h(r, c) = h(c, r) = slater_condon_element(dr, dc, ints);
    }
  }
  return h;
}

std::vector<Complex> to_fock_vector(const DeterminantBasis& basis, const std::vector<double>& c) {
  const int n = basis.n_orbitals;
  std::vector<Complex> out(std::size_t{1} << (2 * n), 0.0);
  for (std::size_t i = 0; i < basis.size(); ++i) out[basis.alpha(i) | (basis.beta(i) << n)] = c[i];
  return out;
}

namespace {

// Connected determinants of d within its (n_alpha, n_beta) sector.
std::vector<Determinant> connected(const Determinant& d, int n) {
  std::vector<Determinant> out;
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  auto singles = [&](std::uint64_t s) {
    std::vector<std::uint64_t> r;
    for (int i : bits_of(s))
      for (int a : bits_of(full & ~s)) r.push_back((s & ~(std::uint64_t{1} << i)) | (std::uint64_t{1} << a));
    return r;
  };
  auto doubles = [&](std::uint64_t s) {
    std::vector<std::uint64_t> r;
    const auto occ = bits_of(s);
    const auto vir = bits_of(full & ~s);
    for (std::size_t x = 0; x < occ.size(); ++x)
      for (std::size_t y = x + 1; y < occ.size(); ++y)
        for (std::size_t u = 0; u < vir.size(); ++u)
          for (std::size_t v = u + 1; v < vir.size(); ++v) {
            r.push_back((s & ~(std::uint64_t{1} << occ[x]) & ~(std::uint64_t{1} << occ[y])) |
                        (std::uint64_t{1} << vir[u]) | (std::uint64_t{1} << vir[v]));
          }
    return r;
  };
  const auto sa = singles(d.alpha);
  const auto sb = singles(d.beta);
  out.push_back(d);
  for (auto a : sa) out.push_back({a, d.beta});
  for (auto b : sb) out.push_back({d.alpha, b});
  for (auto a : doubles(d.alpha)) out.push_back({a, d.beta});
  for (auto b : doubles(d.beta)) out.push_back({d.alpha, b});
  for (auto a : sa)
    for (auto b : sb) out.push_back({a, b});
  return out;
}

struct Eigenpairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

Eigenpairs davidson(const Eigen::SparseMatrix<double>& h, int n_roots, double tol) {
  const Eigen::Index dim = h.rows();
  n_roots = static_cast<int>(std::min<Eigen::Index>(n_roots, dim));
  const Eigen::VectorXd diag = h.diagonal();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return diag(a) < diag(b); });
  const int n_guess = static_cast<int>(std::min<Eigen::Index>(dim, 2 * n_roots + 4));
  const int max_space = std::min<int>(static_cast<int>(dim), std::max(n_guess + 2, 8 * n_roots + 20));
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(dim, n_guess);
  for (int k = 0; k < n_guess; ++k) v(order[static_cast<std::size_t>(k)], k) = 1.0;
  Eigenpairs out;
  for (int iter = 0; iter < 1000; ++iter) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
    v = qr.householderQ() * Eigen::MatrixXd::Identity(dim, v.cols());
    const Eigen::MatrixXd w = h * v;
    const Eigen::MatrixXd t = v.transpose() * w;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (t + t.transpose()));
    const Eigen::MatrixXd y = es.eigenvectors().leftCols(n_roots);
    const Eigen::VectorXd theta = es.eigenvalues().head(n_roots);
    const Eigen::MatrixXd x = v * y;
    const Eigen::MatrixXd r = w * y - x * theta.asDiagonal();
    std::vector<Eigen::VectorXd> corrections;
    for (int k = 0; k < n_roots; ++k) {
      if (r.col(k).norm() < tol) continue;
      Eigen::VectorXd c(dim);
      for (Eigen::Index i = 0; i < dim; ++i) {
        const double den = theta(k) - diag(i);
        c(i) = r(i, k) / (std::abs(den) > 1e-8 ? den : 1e-8);
      }
      corrections.push_back(c);
    }
    out.values = theta;
    out.vectors = x;
    if (corrections.empty()) return out;
    Eigen::MatrixXd base = v;
    if (v.cols() + static_cast<Eigen::Index>(corrections.size()) > max_space) base = x;
    Eigen::MatrixXd next(dim, base.cols() + static_cast<Eigen::Index>(corrections.size()));
    next.leftCols(base.cols()) = base;
    for (std::size_t k = 0; k < corrections.size(); ++k) {
      Eigen::VectorXd c = corrections[k];
      for (int pass = 0; pass < 2; ++pass) c -= next.leftCols(base.cols() + static_cast<Eigen::Index>(k)) *
                                                 (next.leftCols(base.cols() + static_cast<Eigen::Index>(k)).transpose() * c);
      const double nrm = c.norm();
      next.col(base.cols() + static_cast<Eigen::Index>(k)) =
          nrm > 1e-12 ? Eigen::VectorXd(c / nrm) : Eigen::VectorXd::Zero(dim);
    }
    v = next;
  }
  throw NumericalError("Davidson eigensolver did not converge");
}

double s2_expectation(const DeterminantBasis& basis, const std::vector<double>& c) {
  // <S^2> = |S+ psi|^2 + Sz (Sz + 1); S+ = sum_p a+_{p alpha} a_{p beta}.
  const int n = basis.n_orbitals;
  std::map<std::pair<std::uint64_t, std::uint64_t>, double> target;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (c[i] == 0.0) continue;
    const std::uint64_t a = basis.alpha(i), b = basis.beta(i);
    for (int p = 0; p < n; ++p) {
      const std::uint64_t bit = std::uint64_t{1} << p;
      if (!(b & bit) || (a & bit)) continue;
      // a_{p beta} passes every alpha electron and the beta ones below p.
      int par = std::popcount(a) + parity_below(b, p) + parity_below(a, p);
      target[{a | bit, b & ~bit}] += ((par & 1) ? -1.0 : 1.0) * c[i];
    }
  }
  double norm = 0.0;
  for (const auto& [k, v] : target) norm += v * v;
  const double sz = 0.5 * (basis.n_alpha - basis.n_beta);
  return norm + sz * (sz + 1.0);
}

}  // namespace

CasciResult casci_solve(const MolecularIntegrals& ints, int n_alpha, int n_beta, const CasciOptions& options) {
  ints.validate();
  CasciResult res;
  res.basis = DeterminantBasis::build(ints.n_orbitals(), n_alpha, n_beta);
  const std::size_t dim = res.basis.size();
  if (dim > options.max_determinants) {
    throw NumericalError("CASCI space of " + std::to_string(dim) + " determinants exceeds the cap of " +
                         std::to_string(options.max_determinants));
  }
  const auto& irreps = ints.orbital_irreps;
  std::map<Irrep, std::vector<std::size_t>> blocks;
  for (std::size_t i = 0; i < dim; ++i) {
    blocks[determinant_irrep({res.basis.alpha(i), res.basis.beta(i)}, irreps)].push_back(i);
  }

  for (const auto& [irrep, members] : blocks) {
    const auto m = static_cast<Eigen::Index>(members.size());
    Eigenpairs ep;
    if (members.size() <= options.dense_limit) {
      Eigen::MatrixXd h(m, m);
      parallel_for(members.size(), [&](std::size_t r) {
        const Determinant dr{res.basis.alpha(members[r]), res.basis.beta(members[r])};
        for (std::size_t c = 0; c <= r; ++c) {
          const Determinant dc{res.basis.alpha(members[c]), res.basis.beta(members[c])};
          const double v = slater_condon_element(dr, dc, ints);
          h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
          h(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = v;
        }
      });
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
      const Eigen::Index keep = options.n_states > 0 ? std::min<Eigen::Index>(m, options.n_states) : m;
      ep.values = es.eigenvalues().head(keep);
      ep.vectors = es.eigenvectors().leftCols(keep);
    } else {
      std::unordered_map<std::uint64_t, std::size_t> index;
      const int n = ints.n_orbitals();
      for (std::size_t r = 0; r < members.size(); ++r) {
        index[res.basis.alpha(members[r]) | (res.basis.beta(members[r]) << n)] = r;
      }
      std::vector<std::vector<Eigen::Triplet<double>>> rows(members.size());
      parallel_for(members.size(), [&](std::size_t r) {
        const Determinant dr{res.basis.alpha(members[r]), res.basis.beta(members[r])};
        for (const auto& dc : connected(dr, n)) {
          auto it = index.find(dc.alpha | (dc.beta << n));
          if (it == index.end()) continue;
          const double v = slater_condon_element(dr, dc, ints);
          if (v != 0.0) {
            rows[r].emplace_back(static_cast<int>(r), static_cast<int>(it->second), v);
          }
        }
      });
      std::vector<Eigen::Triplet<double>> trip;
      for (auto& r : rows) trip.insert(trip.end(), r.begin(), r.end());
      Eigen::SparseMatrix<double> h(m, m);
      h.setFromTriplets(trip.begin(), trip.end());
      const int roots = options.n_states > 0 ? options.n_states : options.davidson_states;
      ep = davidson(h, roots, options.davidson_tolerance);
    }
    for (Eigen::Index k = 0; k < ep.values.size(); ++k) {
      CasciState st;
      st.energy = ep.values(k);
      st.irrep = irrep;
      st.coefficients.assign(dim, 0.0);
      for (Eigen::Index r = 0; r < m; ++r) st.coefficients[members[static_cast<std::size_t>(r)]] = ep.vectors(r, k);
      // Deterministic phase: first non-negligible amplitude positive.
      for (double c : st.coefficients) {
        if (std::abs(c) > 1e-12) {
          if (c < 0) {
            for (auto& x : st.coefficients) x = -x;
          }
          break;
        }
      }
      st.s2 = s2_expectation(res.basis, st.coefficients);
      // Cross-check the block label on the dominant determinants.
      std::vector<std::size_t> idx(dim);
      for (std::size_t i = 0; i < dim; ++i) idx[i] = i;
      std::partial_sort(idx.begin(), idx.begin() + static_cast<long>(std::min<std::size_t>(5, dim)), idx.end(),
                        [&](std::size_t a, std::size_t b) {
                          return std::abs(st.coefficients[a]) > std::abs(st.coefficients[b]);
                        });
      for (std::size_t t = 0; t < std::min<std::size_t>(5, dim); ++t) {
        if (std::abs(st.coefficients[idx[t]]) < 1e-6) break;
        if (determinant_irrep({res.basis.alpha(idx[t]), res.basis.beta(idx[t])}, irreps) != irrep) {
          throw NumericalError("CASCI eigenvector mixes irreps");
        }
      }
      res.states.push_back(std::move(st));
    }
  }

  res.spectrum.method = "casci";
  std::vector<std::size_t> order(res.states.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<LabeledState> labeled;
  for (const auto& st : res.states) {
    LabeledState ls;
    ls.energy = st.energy;
    ls.s2 = st.s2;
    const auto spin = spin_from_s2(st.s2, 1e-6);
    if (!spin) throw NumericalError("CASCI eigenvector is not a spin eigenstate (<S^2> = " + std::to_string(st.s2) + ")");
    ls.spin = *spin;
    ls.irrep = st.irrep;
    labeled.push_back(ls);
  }
  // Sort states and the labeled records consistently.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = labeled[a];
    const auto& y = labeled[b];
    if (std::abs(x.energy - y.energy) > 1e-9) return x.energy < y.energy;
    if (x.spin != y.spin) return x.spin < y.spin;
    return static_cast<int>(x.irrep) < static_cast<int>(y.irrep);
  });
  std::vector<CasciState> sorted_states;
  for (auto i : order) {
    sorted_states.push_back(std::move(res.states[i]));
    res.spectrum.states.push_back(labeled[i]);
  }
  res.states = std::move(sorted_states);
  finalize_spectrum(res.spectrum);
  return res;
}

LabeledSpectrum casci_spectrum(const MolecularIntegrals& ints, int n_alpha, int n_beta, int n_states,
                               const CasciOptions& options) {
  LabeledSpectrum s = casci_solve(ints, n_alpha, n_beta, options).spectrum;
  if (n_states > 0 && static_cast<int>(s.states.size()) > n_states) {
    s.states.resize(static_cast<std::size_t>(n_states));
  }
  return s;
}

}  // namespace efqse

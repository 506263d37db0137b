#include "efqse/qse.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "efqse/errors.hpp"
#include "efqse/parallel.hpp"
#include "efqse/statevector.hpp"

namespace efqse {

namespace {

char spin_char(Spin s) { return s == Spin::Alpha ? 'a' : 'b'; }

Irrep irrep_at(const std::vector<Irrep>& irreps, int p) {
  return irreps.empty() ? Irrep::A1 : irreps[static_cast<std::size_t>(p)];
}

}  // namespace

LadderString ExcitationElement::ladder() const {
  LadderString s = alpha_part;
  s.insert(s.end(), beta_part.begin(), beta_part.end());
  return s;
}

FermionOperator ExcitationElement::op() const {
  if (kind == ExcitationKind::Identity) return FermionOperator::identity();
  FermionOperator f;
  f.add(1.0, ladder());
  return f;
}

std::string ExcitationElement::name() const {
  switch (kind) {
    case ExcitationKind::Identity:
      return "I";
    case ExcitationKind::Single:
      return std::to_string(a) + spin_char(sigma) + "<-" + std::to_string(i) + spin_char(sigma);
    case ExcitationKind::Double:
      return std::to_string(a) + spin_char(sigma) + std::to_string(b) + spin_char(tau) + "<-" + std::to_string(i) +
             spin_char(sigma) + std::to_string(j) + spin_char(tau);
  }
  return "?";
}

ExcitationBasis build_excitation_basis(std::uint64_t reference, int n_orbitals, const std::vector<Irrep>& irreps,
                                       Irrep reference_irrep) {
  if (n_orbitals < 1 || n_orbitals > 16) throw BoundsError("excitation basis supports 1..16 orbitals");
  if (!irreps.empty() && static_cast<int>(irreps.size()) != n_orbitals) {
    throw ContractViolation("orbital irrep list does not match the orbital count");
  }
  if (reference >> n_orbitals) throw BoundsError("reference bitstring has bits beyond the register");
  std::vector<int> occ, vir;
  for (int p = 0; p < n_orbitals; ++p) ((reference >> p) & 1 ? occ : vir).push_back(p);

  ExcitationBasis basis;
  basis.n_orbitals = n_orbitals;
  basis.reference = reference;
  basis.reference_irrep = reference_irrep;
  ExcitationElement id;
  id.irrep = reference_irrep;
  basis.elements.push_back(id);

  auto part = [](LadderString& dst, std::initializer_list<LadderOp> ops) { dst.assign(ops); };
  for (Spin s : {Spin::Alpha, Spin::Beta}) {
    for (int i : occ)
      for (int a : vir) {
        ExcitationElement e;
        e.kind = ExcitationKind::Single;
        e.a = a;
        e.i = i;
        e.sigma = e.tau = s;
        e.irrep = irrep_product(irrep_product(irrep_at(irreps, a), irrep_at(irreps, i)), reference_irrep);
        part(s == Spin::Alpha ? e.alpha_part : e.beta_part, {cre(a, s), des(i, s)});
        basis.elements.push_back(std::move(e));
      }
  }
  auto double_irrep = [&](int a, int i, int b, int j) {
    Irrep r = irrep_product(irrep_at(irreps, a), irrep_at(irreps, i));
    r = irrep_product(r, irrep_product(irrep_at(irreps, b), irrep_at(irreps, j)));
    return irrep_product(r, reference_irrep);
  };
  for (Spin s : {Spin::Alpha, Spin::Beta}) {
    for (std::size_t x = 0; x < occ.size(); ++x)
      for (std::size_t y = x + 1; y < occ.size(); ++y)
        for (std::size_t u = 0; u < vir.size(); ++u)
          for (std::size_t v = u + 1; v < vir.size(); ++v) {
            ExcitationElement e;
            e.kind = ExcitationKind::Double;
            e.i = occ[x];
            e.j = occ[y];
            e.a = vir[u];
            e.b = vir[v];
            e.sigma = e.tau = s;
            e.irrep = double_irrep(e.a, e.i, e.b, e.j);
            part(s == Spin::Alpha ? e.alpha_part : e.beta_part,
                 {cre(e.a, s), cre(e.b, s), des(e.j, s), des(e.i, s)});
            basis.elements.push_back(std::move(e));
          }
  }
  for (int i : occ)
    for (int a : vir)
      for (int j : occ)
        for (int b : vir) {
          ExcitationElement e;
          e.kind = ExcitationKind::Double;
          e.a = a;
          e.i = i;
          e.b = b;
          e.j = j;
          e.sigma = Spin::Alpha;
          e.tau = Spin::Beta;
          e.irrep = double_irrep(a, i, b, j);
          part(e.alpha_part, {cre(a, Spin::Alpha), des(i, Spin::Alpha)});
          part(e.beta_part, {cre(b, Spin::Beta), des(j, Spin::Beta)});
          basis.elements.push_back(std::move(e));
        }
  return basis;
}

void SubspaceMatrices::symmetrize() {
  // Only the upper triangle is ever filled; mirror it.
  for (auto* m : {&H, &M, &S, &sigma_H, &sigma_M, &sigma_S}) {
    for (Eigen::Index r = 0; r < m->rows(); ++r)
      for (Eigen::Index c = r + 1; c < m->cols(); ++c) (*m)(c, r) = (*m)(r, c);
  }
}

QseOperators QseOperators::build(const MolecularIntegrals& ints) {
  const int n = ints.n_orbitals();
  QseOperators ops;
  ops.hamiltonian_fermion = build_hamiltonian(ints);
  ops.spin_squared_fermion = total_spin_operator(n);
  ops.hamiltonian = bipartition(ops.hamiltonian_fermion, n);
  ops.spin_squared = bipartition(ops.spin_squared_fermion, n);
  return ops;
}

namespace {

SubspaceMatrices zero_matrices(Eigen::Index n) {
  SubspaceMatrices m;
  for (auto* x : {&m.H, &m.M, &m.S, &m.sigma_H, &m.sigma_M, &m.sigma_S}) *x = Eigen::MatrixXd::Zero(n, n);
  return m;
}

void check_sizes(int n_qubits, const ExcitationBasis& basis, const QseOperators& ops) {
  if (basis.n_orbitals != n_qubits || ops.hamiltonian.n_qubits() != n_qubits ||
      ops.spin_squared.n_qubits() != n_qubits) {
    throw ContractViolation("excitation basis, operators and state disagree on the orbital count");
  }
}

LadderString strip_spin(LadderString s) {
  for (auto& o : s) o.spin = Spin::Alpha;
  return s;
}

struct CompactTerm {
  std::size_t a_full, b_full;  // PauliString::index
  std::size_t a, b;            // positions in the compact index list
  Complex c;
};

}  // namespace

SubspaceMatrices assemble_matrices(const TransitionData& data, const std::vector<double>& schmidt,
                                   const ExcitationBasis& basis, const QseOperators& ops) {
  const int n = data.n_qubits();
  check_sizes(n, basis, ops);
  const int K = data.n_strings();
  if (static_cast<int>(schmidt.size()) != K) throw ContractViolation("Schmidt vector size mismatch");
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t n_paulis = dim * dim;
  const auto E = static_cast<Eigen::Index>(basis.size());

  // Distinct single-register factors and their matrices.
  std::vector<LadderString> parts;
  std::map<LadderString, int> part_index;
  auto intern = [&](const LadderString& s) {
    auto key = strip_spin(s);
    auto [it, fresh] = part_index.emplace(key, static_cast<int>(parts.size()));
    if (fresh) parts.push_back(key);
    return it->second;
  };
  std::vector<int> pa(basis.size()), pb(basis.size());
  for (std::size_t m = 0; m < basis.size(); ++m) {
    pa[m] = intern(basis.elements[m].alpha_part);
    pb[m] = intern(basis.elements[m].beta_part);
  }
  std::vector<Eigen::MatrixXcd> J(parts.size());
  for (std::size_t p = 0; p < parts.size(); ++p) {
    J[p] = parts[p].empty() ? Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))
                            : jordan_wigner_string(parts[p], n).to_dense();
  }

  // Operators as compact term lists: H, identity, S^2.
  std::map<std::size_t, std::size_t> compact;
  std::vector<std::size_t> compact_full;
  auto slot = [&](std::size_t full) {
    auto [it, fresh] = compact.emplace(full, compact_full.size());
    if (fresh) compact_full.push_back(full);
    return it->second;
  };
  std::array<std::vector<CompactTerm>, 3> op_terms;
  {
    BipartiteOperator id(n);
    id.add(PauliString{}, PauliString{}, 1.0);
    const BipartiteOperator* src[3] = {&ops.hamiltonian, &id, &ops.spin_squared};
    for (int o = 0; o < 3; ++o) {
      for (const auto& t : src[o]->term_list()) {
        CompactTerm ct;
        ct.a_full = t.alpha.index(n);
        ct.b_full = t.beta.index(n);
        ct.a = slot(ct.a_full);
        ct.b = slot(ct.b_full);
        ct.c = t.coeff;
        op_terms[static_cast<std::size_t>(o)].push_back(ct);
      }
    }
  }

  // rho_kl = U|x_l><x_k|U^dag, rebuilt from the transition tables.
  std::vector<Eigen::MatrixXcd> rho(static_cast<std::size_t>(K * K));
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < K; ++l) rho[static_cast<std::size_t>(k * K + l)] = matrix_from_pauli_traces(data.table(k, l), n);

  // V[(u, v)][kl][P] = Tr(P J_v rho_kl J_u^dag) at the compact indices.
  std::set<std::pair<int, int>> needed;
  for (Eigen::Index mu = 0; mu < E; ++mu)
    for (Eigen::Index nu = mu; nu < E; ++nu) {
      needed.emplace(pa[static_cast<std::size_t>(mu)], pa[static_cast<std::size_t>(nu)]);
      needed.emplace(pb[static_cast<std::size_t>(mu)], pb[static_cast<std::size_t>(nu)]);
    }
  const std::vector<std::pair<int, int>> pair_list(needed.begin(), needed.end());
  std::map<std::pair<int, int>, std::size_t> pair_slot;
  for (std::size_t i = 0; i < pair_list.size(); ++i) pair_slot[pair_list[i]] = i;
  std::vector<std::vector<std::vector<Complex>>> V(pair_list.size());
  parallel_for(pair_list.size(), [&](std::size_t i) {
    const auto [u, v] = pair_list[i];
    V[i].resize(static_cast<std::size_t>(K * K));
    for (std::size_t kl = 0; kl < rho.size(); ++kl) {
      const auto tr = all_pauli_traces(J[static_cast<std::size_t>(v)] * rho[kl] * J[static_cast<std::size_t>(u)].adjoint());
      auto& dst = V[i][kl];
      dst.resize(compact_full.size());
      for (std::size_t c = 0; c < compact_full.size(); ++c) dst[c] = tr[compact_full[c]];
    }
  });

  SubspaceMatrices out = zero_matrices(E);
  Eigen::MatrixXd* values[3] = {&out.H, &out.M, &out.S};
  Eigen::MatrixXd* sigmas[3] = {&out.sigma_H, &out.sigma_M, &out.sigma_S};
  std::vector<std::pair<Eigen::Index, Eigen::Index>> entries;
  for (Eigen::Index mu = 0; mu < E; ++mu)
    for (Eigen::Index nu = mu; nu < E; ++nu) entries.emplace_back(mu, nu);

  const double inv_dim = 1.0 / static_cast<double>(dim);
  parallel_for(entries.size(), [&](std::size_t e) {
    const auto [mu, nu] = entries[e];
    const auto smu = static_cast<std::size_t>(mu), snu = static_cast<std::size_t>(nu);
    const auto& Va = V[pair_slot.at({pa[smu], pa[snu]})];
    const auto& Vb = V[pair_slot.at({pb[smu], pb[snu]})];
    const bool with_sigma = data.sampled() && basis.elements[smu].irrep == basis.elements[snu].irrep;
    for (int o = 0; o < 3; ++o) {
      const auto& terms = op_terms[static_cast<std::size_t>(o)];
      Complex total = 0.0;
      for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l) {
          const double ll = schmidt[static_cast<std::size_t>(k)] * schmidt[static_cast<std::size_t>(l)];
          if (ll == 0.0) continue;
          const auto& va = Va[static_cast<std::size_t>(k * K + l)];
          const auto& vb = Vb[static_cast<std::size_t>(k * K + l)];
          Complex acc = 0.0;
          for (const auto& t : terms) acc += t.c * va[t.a] * vb[t.b];
          total += ll * acc;
        }
      (*values[o])(mu, nu) = total.real();
      if (!with_sigma) continue;

      // d entry / d A_kl(Q) = 2^-N ll [Tr(Q J_u^dag C_a J_v) + Tr(Q J_u'^dag C_b J_v')].
      std::vector<std::vector<Complex>> w(static_cast<std::size_t>(K * K));
      for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l) {
          const double ll = schmidt[static_cast<std::size_t>(k)] * schmidt[static_cast<std::size_t>(l)];
          if (ll == 0.0) continue;
          const auto& va = Va[static_cast<std::size_t>(k * K + l)];
          const auto& vb = Vb[static_cast<std::size_t>(k * K + l)];
          std::vector<Complex> ta(n_paulis, 0.0), tb(n_paulis, 0.0);
          for (const auto& t : terms) {
            ta[t.a_full] += static_cast<double>(dim) * t.c * vb[t.b];
            tb[t.b_full] += static_cast<double>(dim) * t.c * va[t.a];
          }
          const auto& Ju = J[static_cast<std::size_t>(pa[smu])];
          const auto& Jv = J[static_cast<std::size_t>(pa[snu])];
          const auto& Ju2 = J[static_cast<std::size_t>(pb[smu])];
          const auto& Jv2 = J[static_cast<std::size_t>(pb[snu])];
          const auto ga = all_pauli_traces(Ju.adjoint() * matrix_from_pauli_traces(ta, n) * Jv);
          const auto gb = all_pauli_traces(Ju2.adjoint() * matrix_from_pauli_traces(tb, n) * Jv2);
          auto& wkl = w[static_cast<std::size_t>(k * K + l)];
          wkl.resize(n_paulis);
          for (std::size_t q = 0; q < n_paulis; ++q) wkl[q] = ll * inv_dim * (ga[q] + gb[q]);
        }
      (*sigmas[o])(mu, nu) = std::sqrt(std::max(0.0, data.variance(w)));
    }
  });
  out.symmetrize();
  return out;
}

SubspaceMatrices assemble_matrices_literal(const TransitionData& data, const std::vector<double>& schmidt,
                                           const ExcitationBasis& basis, const QseOperators& ops) {
  const int n = data.n_qubits();
  check_sizes(n, basis, ops);
  const auto E = static_cast<Eigen::Index>(basis.size());
  std::vector<FermionOperator> e_ops, e_adj;
  for (const auto& el : basis.elements) {
    e_ops.push_back(el.op());
    e_adj.push_back(e_ops.back().adjoint());
  }
  const FermionOperator* src[3] = {&ops.hamiltonian_fermion, nullptr, &ops.spin_squared_fermion};
  SubspaceMatrices out = zero_matrices(E);
  Eigen::MatrixXd* values[3] = {&out.H, &out.M, &out.S};
  Eigen::MatrixXd* sigmas[3] = {&out.sigma_H, &out.sigma_M, &out.sigma_S};
  std::vector<std::pair<Eigen::Index, Eigen::Index>> entries;
  for (Eigen::Index mu = 0; mu < E; ++mu)
    for (Eigen::Index nu = mu; nu < E; ++nu) entries.emplace_back(mu, nu);
  parallel_for(entries.size(), [&](std::size_t e) {
    const auto [mu, nu] = entries[e];
    for (int o = 0; o < 3; ++o) {
      const auto& adj = e_adj[static_cast<std::size_t>(mu)];
      const auto& right = e_ops[static_cast<std::size_t>(nu)];
      const FermionOperator product = src[o] ? adj * *src[o] * right : adj * right;
      const Estimate est = forged_expectation(data, schmidt, bipartition(product, n));
      (*values[o])(mu, nu) = est.value;
      (*sigmas[o])(mu, nu) = est.sigma;
    }
  });
  out.symmetrize();
  return out;
}

SubspaceMatrices assemble_matrices_dense(const std::vector<Complex>& psi, const ExcitationBasis& basis,
                                         const QseOperators& ops) {
  const int n = basis.n_orbitals;
  if (psi.size() != (std::size_t{1} << (2 * n))) throw ContractViolation("state size does not match the basis");
  const auto E = static_cast<Eigen::Index>(basis.size());
  std::vector<std::vector<Complex>> phi(basis.size()), h_phi(basis.size()), s_phi(basis.size());
  parallel_for(basis.size(), [&](std::size_t m) {
    phi[m] = apply_fermion(basis.elements[m].op(), n, psi);
    h_phi[m] = apply_fermion(ops.hamiltonian_fermion, n, phi[m]);
    s_phi[m] = apply_fermion(ops.spin_squared_fermion, n, phi[m]);
  });
  auto dot = [](const std::vector<Complex>& a, const std::vector<Complex>& b) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s.real();
  };
  SubspaceMatrices out = zero_matrices(E);
  for (Eigen::Index mu = 0; mu < E; ++mu)
    for (Eigen::Index nu = mu; nu < E; ++nu) {
      const auto& left = phi[static_cast<std::size_t>(mu)];
      out.H(mu, nu) = dot(left, h_phi[static_cast<std::size_t>(nu)]);
      out.M(mu, nu) = dot(left, phi[static_cast<std::size_t>(nu)]);
      out.S(mu, nu) = dot(left, s_phi[static_cast<std::size_t>(nu)]);
      out.H(nu, mu) = out.H(mu, nu);
      out.M(nu, mu) = out.M(mu, nu);
      out.S(nu, mu) = out.S(mu, nu);
    }
  return out;
}

double overlap_threshold(const SubspaceMatrices& m, const ExcitationBasis& basis, bool sampled) {
  constexpr double kFloor = 1e-8;
  if (!sampled) return kFloor;
  std::vector<double> s;
  for (Eigen::Index r = 0; r < m.size(); ++r)
    for (Eigen::Index c = r; c < m.size(); ++c) {
      if (basis.elements[static_cast<std::size_t>(r)].irrep == basis.elements[static_cast<std::size_t>(c)].irrep) {
        s.push_back(m.sigma_M(r, c));
      }
    }
  if (s.empty()) return kFloor;
  const auto mid = s.begin() + static_cast<long>(s.size() / 2);
  std::nth_element(s.begin(), mid, s.end());
  double median = *mid;
  if (s.size() % 2 == 0) median = 0.5 * (median + *std::max_element(s.begin(), mid));
  return std::max(kFloor, 3.0 * median);
}

LabeledSpectrum block_and_classify(const SubspaceMatrices& m, const ExcitationBasis& basis,
                                   const QseThresholds& thresholds) {
  if (m.size() != static_cast<Eigen::Index>(basis.size())) throw ContractViolation("matrix and basis sizes differ");
  LabeledSpectrum out;
  out.method = "qse";
  std::map<Irrep, std::vector<Eigen::Index>> blocks;
  for (std::size_t i = 0; i < basis.size(); ++i) blocks[basis.elements[i].irrep].push_back(static_cast<Eigen::Index>(i));

  for (const auto& [irrep, idx] : blocks) {
    const auto nb = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd Hb(nb, nb), Mb(nb, nb), Sb(nb, nb);
    for (Eigen::Index r = 0; r < nb; ++r)
      for (Eigen::Index c = 0; c < nb; ++c) {
        Hb(r, c) = m.H(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
        Mb(r, c) = m.M(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
        Sb(r, c) = m.S(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> me(Mb);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < nb; ++k)
      if (me.eigenvalues()(k) > thresholds.eps_m) keep.push_back(k);
    if (keep.empty()) {
      out.warnings.push_back("irrep " + std::string(irrep_name(irrep)) + ": overlap block has no eigenvalue above the threshold");
      continue;
    }
    Eigen::MatrixXd X(nb, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
      X.col(static_cast<Eigen::Index>(c)) = me.eigenvectors().col(keep[c]) / std::sqrt(me.eigenvalues()(keep[c]));
    }
    const Eigen::MatrixXd Ho = X.transpose() * Hb * X;
    Eigen::MatrixXd So = X.transpose() * Sb * X;
    So = 0.5 * (So + So.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> se(So);

    std::map<int, std::vector<Eigen::Index>> spaces;
    int dropped = 0;
    for (Eigen::Index k = 0; k < se.eigenvalues().size(); ++k) {
      const auto spin = spin_from_s2(se.eigenvalues()(k), thresholds.eps_s);
      if (spin) {
        spaces[*spin].push_back(k);
      } else {
        ++dropped;
      }
    }
    if (dropped > 0) {
      out.warnings.push_back("irrep " + std::string(irrep_name(irrep)) + ": " + std::to_string(dropped) +
                             " vector(s) without a definite total spin were dropped");
    }
    for (const auto& [spin, cols] : spaces) {
      Eigen::MatrixXd Y(se.eigenvectors().rows(), static_cast<Eigen::Index>(cols.size()));
      Eigen::VectorXd s2(static_cast<Eigen::Index>(cols.size()));
      for (std::size_t c = 0; c < cols.size(); ++c) {
        Y.col(static_cast<Eigen::Index>(c)) = se.eigenvectors().col(cols[c]);
        s2(static_cast<Eigen::Index>(c)) = se.eigenvalues()(cols[c]);
      }
      Eigen::MatrixXd Hs = Y.transpose() * Ho * Y;
      Hs = 0.5 * (Hs + Hs.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> he(Hs);
      for (Eigen::Index k = 0; k < he.eigenvalues().size(); ++k) {
        LabeledState st;
        st.energy = he.eigenvalues()(k);
        st.spin = spin;
        st.irrep = irrep;
        st.s2 = he.eigenvectors().col(k).cwiseAbs2().dot(s2);
        out.states.push_back(st);
      }
    }
  }
  finalize_spectrum(out);
  return out;
}

void bootstrap_uncertainty(LabeledSpectrum& spectrum, const SubspaceMatrices& m, const ExcitationBasis& basis,
                           const QseThresholds& thresholds, int n_resamples, std::uint64_t seed) {
  if (spectrum.states.empty() || n_resamples <= 0) return;
  const std::string ground = spectrum.ground().label();
  const std::size_t n_states = spectrum.states.size();
  // excitation[r][s], NaN when state s is missing from resample r.
  std::vector<std::vector<double>> excitation(static_cast<std::size_t>(n_resamples),
                                              std::vector<double>(n_states, std::nan("")));
  parallel_for(static_cast<std::size_t>(n_resamples), [&](std::size_t r) {
    std::mt19937_64 rng(derive_seed(seed, {0x626f6f74, r}));
    std::normal_distribution<double> gauss;
    SubspaceMatrices p = m;
    const Eigen::MatrixXd* sig[3] = {&m.sigma_H, &m.sigma_M, &m.sigma_S};
    Eigen::MatrixXd* val[3] = {&p.H, &p.M, &p.S};
    for (int o = 0; o < 3; ++o)
      for (Eigen::Index i = 0; i < m.size(); ++i)
        for (Eigen::Index j = i; j < m.size(); ++j) {
          const double g = gauss(rng);
          (*val[o])(i, j) += (*sig[o])(i, j) * g;
          (*val[o])(j, i) = (*val[o])(i, j);
        }
    LabeledSpectrum rs;
    try {
      rs = block_and_classify(p, basis, thresholds);
    } catch (const NumericalError&) {
      return;
    }
    const LabeledState* g0 = rs.find(ground);
    if (!g0) return;
    for (std::size_t s = 0; s < n_states; ++s) {
      if (const LabeledState* hit = rs.find(spectrum.states[s].label())) {
        excitation[r][s] = (hit->energy - g0->energy) * kHartreeToEv;
      }
    }
  });
  for (std::size_t s = 0; s < n_states; ++s) {
    double sum = 0.0, sum2 = 0.0;
    int count = 0;
    for (const auto& row : excitation) {
      if (std::isnan(row[s])) continue;
      sum += row[s];
      ++count;
    }
    const double mean = count > 0 ? sum / count : 0.0;
    for (const auto& row : excitation) {
      if (!std::isnan(row[s])) sum2 += (row[s] - mean) * (row[s] - mean);
    }
    auto& st = spectrum.states[s];
    st.sigma_ev = count > 1 ? std::sqrt(sum2 / (count - 1)) : 0.0;
    st.unstable = count < n_resamples;
  }
}

double chi_squared(const std::vector<double>& deviations, const std::vector<double>& sigmas) {
  if (deviations.empty() || deviations.size() != sigmas.size()) {
    throw ContractViolation("chi_squared needs equal-length, nonempty inputs");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < deviations.size(); ++i) {
    if (!(sigmas[i] > 0.0)) throw ContractViolation("chi_squared needs strictly positive sigmas");
    total += deviations[i] * deviations[i] / (sigmas[i] * sigmas[i]);
  }
  return total / static_cast<double>(deviations.size());
}

std::uint64_t dominant_bitstring(const ForgedAnsatz& a) {
  a.validate();
  std::vector<QubitState> rotated;
  for (auto x : a.bitstrings) {
    QubitState s = QubitState::basis(a.n_qubits, x);
    for (std::size_t h = 0; h < a.hop_layout.size(); ++h)
      apply_hop_gate(s, a.theta_of(h), a.hop_layout[h].first, a.hop_layout[h].second);
    rotated.push_back(std::move(s));
  }
  // Amplitude of |x>|x> in the forged state is sum_k lambda_k <x|U|x_k>^2.
  const int occupied = a.n_occupied();
  std::uint64_t best = a.bitstrings.front();
  double best_weight = -1.0;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << a.n_qubits); ++x) {
    if (std::popcount(x) != occupied) continue;
    Complex amp = 0.0;
    for (std::size_t k = 0; k < rotated.size(); ++k) amp += a.schmidt[k] * rotated[k][x] * rotated[k][x];
    if (std::abs(amp) > best_weight + 1e-12) {
      best_weight = std::abs(amp);
      best = x;
    }
  }
  return best;
}

QseResult solve_qse(const TransitionData& data, const ForgedAnsatz& a, const QseOperators& ops,
                    const std::vector<Irrep>& irreps, const QseSolveOptions& options) {
  QseResult r;
  r.basis = build_excitation_basis(dominant_bitstring(a), a.n_qubits, irreps,
                                   options.reference_irrep);
  r.matrices = assemble_matrices(data, a.schmidt, r.basis, ops);
  r.thresholds.eps_m = options.eps_m ? *options.eps_m : overlap_threshold(r.matrices, r.basis, data.sampled());
  r.thresholds.eps_s = options.eps_s;
  r.spectrum = block_and_classify(r.matrices, r.basis, r.thresholds);
  r.spectrum.method = options.method;
  if (data.sampled() && options.bootstrap_resamples > 0) {
    bootstrap_uncertainty(r.spectrum, r.matrices, r.basis, r.thresholds, options.bootstrap_resamples, options.seed);
  }
  return r;
}

}  // namespace efqse

#include "efqse/forging.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "json.hpp"

#include "efqse/errors.hpp"
#include "efqse/parallel.hpp"

namespace efqse {

using ojson = nlohmann::ordered_json;

int ForgedAnsatz::n_occupied() const {
  return bitstrings.empty() ? 0 : std::popcount(bitstrings.front());
}

void ForgedAnsatz::validate() const {
  if (n_qubits < 1 || n_qubits > 30) throw BoundsError("ansatz register size must be in 1..30");
  if (bitstrings.empty()) throw ContractViolation("ansatz has no bitstrings");
  const std::uint64_t limit = std::uint64_t{1} << n_qubits;
  std::set<std::uint64_t> seen;
  for (auto b : bitstrings) {
    if (b >= limit) throw BoundsError("bitstring uses qubits outside the register");
    if (std::popcount(b) != n_occupied()) {
      throw ContractViolation("all bitstrings must have the same Hamming weight");
    }
    if (!seen.insert(b).second) throw ContractViolation("duplicate bitstring in ansatz");
  }
  if (schmidt.size() != bitstrings.size()) {
    throw ContractViolation("one Schmidt coefficient per bitstring is required");
  }
  double norm = 0.0;
  for (double l : schmidt) norm += l * l;
  if (std::abs(norm - 1.0) > 1e-10) throw ContractViolation("Schmidt coefficients are not normalized");
  if (hop_parameter.size() != hop_layout.size()) {
    throw ContractViolation("hop_parameter must map every hop gate to an angle");
  }
  for (std::size_t h = 0; h < hop_layout.size(); ++h) {
    const auto [q1, q2] = hop_layout[h];
    if (q1 < 0 || q2 < 0 || q1 >= n_qubits || q2 >= n_qubits) {
      throw BoundsError("hop gate on a qubit outside the register");
    }
    if (q1 == q2) throw ContractViolation("hop gate needs two distinct qubits");
    if (hop_parameter[h] < 0 || hop_parameter[h] >= static_cast<int>(thetas.size())) {
      throw BoundsError("hop gate refers to a missing angle");
    }
  }
}

std::vector<std::uint64_t> default_bitstrings(int n_orbitals, int n_occupied,
                                              const std::vector<Irrep>& irreps) {
  if (n_occupied < 1 || n_occupied >= n_orbitals) {
    throw ConfigError("default bitstrings need at least one occupied and one virtual orbital");
  }
  if (!irreps.empty() && static_cast<int>(irreps.size()) != n_orbitals) {
    throw ContractViolation("irrep list length does not match the orbital count");
  }
  const std::uint64_t hf = (std::uint64_t{1} << n_occupied) - 1;
  auto swap = [&](int i, int a) { return (hf & ~(std::uint64_t{1} << i)) | (std::uint64_t{1} << a); };
  if (!irreps.empty()) {
    for (int i = n_occupied - 1; i >= 0; --i) {
      for (int a = n_occupied; a < n_orbitals; ++a) {
        if (irreps[static_cast<std::size_t>(i)] == irreps[static_cast<std::size_t>(a)]) {
          return {hf, swap(i, a)};
        }
      }
    }
  }
  return {hf, swap(n_occupied - 1, n_occupied)};
}

int default_hop_count(int n_orbitals, int n_occupied) {
  const int n_virtual = n_orbitals - n_occupied;
  return std::max(1, n_orbitals + n_virtual - 3);
}

std::vector<std::pair<int, int>> default_hop_layout(int n_orbitals, int n_occupied, int n_hops,
                                                    const std::vector<Irrep>& irreps) {
  using Pair = std::pair<int, int>;
  const int boundary = n_occupied - 1;
  std::vector<Pair> cls[2];
  for (int i = 0; i + 1 < n_orbitals; ++i) {
    if (!irreps.empty() && irreps[static_cast<std::size_t>(i)] != irreps[static_cast<std::size_t>(i + 1)]) {
      continue;
    }
    cls[std::abs(i - boundary) % 2].push_back({i, i + 1});
  }
  for (auto& c : cls) {
    std::stable_sort(c.begin(), c.end(), [&](const Pair& a, const Pair& b) {
      return std::abs(a.first - boundary) < std::abs(b.first - boundary);
    });
  }
  if (cls[0].empty() && cls[1].empty()) return {};

  // Three brick layers: boundary-parity pairs, the other parity, boundary
  // parity again. Each layer walks its own cursor through its class and
  // falls back to the other class once exhausted.
  const int layer_class[3] = {0, 1, 0};
  std::vector<Pair> layers[3];
  std::size_t cursor[3][2] = {{0, 0}, {0, 0}, {0, 0}};
  std::vector<Pair> overflow;
  std::vector<Pair> all_pairs = cls[0];
  all_pairs.insert(all_pairs.end(), cls[1].begin(), cls[1].end());
  std::size_t overflow_cursor = 0;
  for (int h = 0; h < n_hops; ++h) {
    const int layer = h % 3;
    bool placed = false;
    for (int attempt = 0; attempt < 2 && !placed; ++attempt) {
      const int c = attempt == 0 ? layer_class[layer] : 1 - layer_class[layer];
      auto& cur = cursor[layer][c];
      while (cur < cls[c].size()) {
        const Pair cand = cls[c][cur++];
        const bool clash = std::any_of(layers[layer].begin(), layers[layer].end(), [&](const Pair& p) {
          return p.first == cand.first || p.first == cand.second || p.second == cand.first ||
                 p.second == cand.second;
        });
        if (!clash) {
          layers[layer].push_back(cand);
          placed = true;
          break;
        }
      }
    }
    if (!placed) overflow.push_back(all_pairs[overflow_cursor++ % all_pairs.size()]);
  }
  std::vector<Pair> out;
  for (const auto& l : layers) out.insert(out.end(), l.begin(), l.end());
  out.insert(out.end(), overflow.begin(), overflow.end());
  return out;
}

ForgedAnsatz default_ansatz(int n_orbitals, int n_occupied, const std::vector<Irrep>& irreps, int n_hops) {
  ForgedAnsatz a;
  a.n_qubits = n_orbitals;
  a.bitstrings = default_bitstrings(n_orbitals, n_occupied, irreps);
  if (n_hops < 0) n_hops = default_hop_count(n_orbitals, n_occupied);
  a.hop_layout = default_hop_layout(n_orbitals, n_occupied, n_hops, irreps);
  for (std::size_t h = 0; h < a.hop_layout.size(); ++h) a.hop_parameter.push_back(static_cast<int>(h));
  a.thetas.assign(a.hop_layout.size(), 0.0);
  a.schmidt = {1.0, 0.0};
  a.validate();
  return a;
}

std::vector<ForgedCircuitSpec> forged_circuit_list(const ForgedAnsatz& a) {
  std::vector<ForgedCircuitSpec> out;
  const int K = static_cast<int>(a.bitstrings.size());
  for (int k = 0; k < K; ++k) out.push_back({CircuitKind::Diagonal, k, k, 0});
  for (int k = 0; k < K; ++k)
    for (int l = k + 1; l < K; ++l)
      for (int p = 0; p < 4; ++p) out.push_back({CircuitKind::Superposition, k, l, p});
  return out;
}

std::pair<int, int> differing_pair(std::uint64_t xk, std::uint64_t xl) {
  const std::uint64_t only_k = xk & ~xl;
  const std::uint64_t only_l = xl & ~xk;
  if (std::popcount(only_k) != 1 || std::popcount(only_l) != 1) {
    throw ContractViolation(
        "unsupported superposition: bitstrings must differ in exactly one occupied/unoccupied pair");
  }
  return {std::countr_zero(only_k), std::countr_zero(only_l)};
}

namespace {

void append_hops(const ForgedAnsatz& a, Circuit& c) {
  for (std::size_t h = 0; h < a.hop_layout.size(); ++h) {
    c.gates.push_back(HopGate{a.theta_of(h), a.hop_layout[h].first, a.hop_layout[h].second});
  }
}

}  // namespace

Circuit build_forged_circuit(const ForgedAnsatz& a, const ForgedCircuitSpec& spec) {
  const int K = static_cast<int>(a.bitstrings.size());
  if (spec.k < 0 || spec.k >= K || spec.l < 0 || spec.l >= K) throw BoundsError("bitstring index out of range");
  Circuit c;
  c.n_qubits = a.n_qubits;
  const std::uint64_t xk = a.bitstrings[static_cast<std::size_t>(spec.k)];
  if (spec.kind == CircuitKind::Diagonal) {
    for (int q = 0; q < a.n_qubits; ++q) {
      if ((xk >> q) & 1u) c.gates.push_back(PauliXGate{q});
    }
  } else {
    if (spec.k == spec.l) throw ContractViolation("superposition circuit needs two different bitstrings");
    if (spec.p < 0 || spec.p > 3) throw BoundsError("superposition phase index must be 0..3");
    const std::uint64_t xl = a.bitstrings[static_cast<std::size_t>(spec.l)];
    const auto [q1, q2] = differing_pair(xk, xl);
    const std::uint64_t shared = xk & xl;
    for (int q = 0; q < a.n_qubits; ++q) {
      if ((shared >> q) & 1u) c.gates.push_back(PauliXGate{q});
    }
    c.gates.push_back(VprepGate{q1, q2, phi_variant(spec.p)});
  }
  append_hops(a, c);
  return c;
}

Circuit build_unitary_circuit(const ForgedAnsatz& a) {
  Circuit c;
  c.n_qubits = a.n_qubits;
  append_hops(a, c);
  return c;
}

Complex reconstruction_coefficient(int p, ReconstructionScale scale) {
  const double denom = scale == ReconstructionScale::Normalized ? 2.0 : 4.0;
  return i_power(-p) / denom;
}

OffDiagonalResult off_diagonal_element(const ForgedAnsatz& a, int k, int l,
                                       const std::vector<PauliString>& terms, ReconstructionScale scale) {
  if (k == l) throw ContractViolation("off_diagonal_element needs k != l (use the diagonal circuit)");
  a.validate();
  OffDiagonalResult out;
  out.phi_expectations.assign(terms.size(), {0.0, 0.0, 0.0, 0.0});
  out.elements.assign(terms.size(), 0.0);
  for (int p = 0; p < 4; ++p) {
    const QubitState s = run_circuit(build_forged_circuit(a, {CircuitKind::Superposition, k, l, p}));
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const double e = pauli_expectation(s, terms[t]).real();
      out.phi_expectations[t][static_cast<std::size_t>(p)] = e;
      out.elements[t] += reconstruction_coefficient(p, scale) * e;
    }
  }
  return out;
}

OffDiagonalResult off_diagonal_element_sampled(const ForgedAnsatz& a, int k, int l,
                                               const std::vector<PauliString>& terms,
                                               const SamplingOptions& options) {
  if (k == l) throw ContractViolation("off_diagonal_element needs k != l (use the diagonal circuit)");
  a.validate();
  std::vector<CircuitJob> jobs;
  for (int p = 0; p < 4; ++p) {
    jobs.push_back({run_circuit(build_forged_circuit(a, {CircuitKind::Superposition, k, l, p})),
                    a.n_occupied()});
  }
  auto plan = std::make_shared<const MeasurementPlan>(MeasurementPlan::grouped(a.n_qubits, terms));
  const PauliEstimates est = measure(jobs, plan, options, 0);
  OffDiagonalResult out;
  out.phi_expectations.assign(terms.size(), {0.0, 0.0, 0.0, 0.0});
  out.elements.assign(terms.size(), 0.0);
  for (std::size_t t = 0; t < terms.size(); ++t) {
    for (int p = 0; p < 4; ++p) {
      const double e = est.value(static_cast<std::size_t>(p), terms[t].index(a.n_qubits));
      out.phi_expectations[t][static_cast<std::size_t>(p)] = e;
      out.elements[t] += reconstruction_coefficient(p) * e;
    }
  }
  return out;
}

void TransitionData::assemble(const std::vector<std::vector<double>>& values) {
  const std::size_t n_paulis = std::size_t{1} << (2 * n_);
  tables_.assign(static_cast<std::size_t>(k_ * k_), std::vector<Complex>(n_paulis, 0.0));
  for (std::size_t c = 0; c < circuits_.size(); ++c) {
    const auto& spec = circuits_[c];
    const auto& v = values[c];
    if (spec.kind == CircuitKind::Diagonal) {
      auto& t = tables_[static_cast<std::size_t>(spec.k * k_ + spec.k)];
      for (std::size_t i = 0; i < n_paulis; ++i) t[i] = v[i];
    } else {
      const Complex cp = reconstruction_coefficient(spec.p);
      auto& tkl = tables_[static_cast<std::size_t>(spec.k * k_ + spec.l)];
      auto& tlk = tables_[static_cast<std::size_t>(spec.l * k_ + spec.k)];
      for (std::size_t i = 0; i < n_paulis; ++i) {
        tkl[i] += cp * v[i];
        tlk[i] += std::conj(cp) * v[i];
      }
    }
  }
}

TransitionData exact_transition_data(const ForgedAnsatz& a) {
  a.validate();
  TransitionData d;
  d.n_ = a.n_qubits;
  d.k_ = static_cast<int>(a.bitstrings.size());
  d.circuits_ = forged_circuit_list(a);
  std::vector<std::vector<double>> values(d.circuits_.size());
  parallel_for(d.circuits_.size(), [&](std::size_t c) {
    const QubitState s = run_circuit(build_forged_circuit(a, d.circuits_[c]));
    const auto e = all_pauli_expectations(s);
    values[c].resize(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) values[c][i] = e[i].real();
  });
  d.assemble(values);
  return d;
}

TransitionData sampled_transition_data(const ForgedAnsatz& a, std::shared_ptr<const MeasurementPlan> plan,
                                       const SamplingOptions& options, std::uint64_t stream) {
  a.validate();
  if (plan->n_qubits != a.n_qubits) throw ContractViolation("measurement plan size does not match ansatz");
  TransitionData d;
  d.n_ = a.n_qubits;
  d.k_ = static_cast<int>(a.bitstrings.size());
  d.circuits_ = forged_circuit_list(a);
  std::vector<CircuitJob> jobs(d.circuits_.size());
  parallel_for(jobs.size(), [&](std::size_t c) {
    jobs[c] = {run_circuit(build_forged_circuit(a, d.circuits_[c])), a.n_occupied()};
  }, options.threads);
  d.estimates_ = measure(jobs, std::move(plan), options, stream);
  std::vector<std::vector<double>> values(d.circuits_.size());
  for (std::size_t c = 0; c < values.size(); ++c) values[c] = d.estimates_->values(c);
  d.assemble(values);
  return d;
}

double TransitionData::variance(const std::vector<std::vector<Complex>>& w) const {
  if (!estimates_) return 0.0;
  const std::size_t n_paulis = std::size_t{1} << (2 * n_);
  std::vector<std::vector<double>> g(circuits_.size());
  for (std::size_t c = 0; c < circuits_.size(); ++c) {
    const auto& spec = circuits_[c];
    const auto& wkl = w[static_cast<std::size_t>(spec.k * k_ + spec.l)];
    const auto& wlk = w[static_cast<std::size_t>(spec.l * k_ + spec.k)];
    if (wkl.empty() && wlk.empty()) continue;
    g[c].assign(n_paulis, 0.0);
    if (spec.kind == CircuitKind::Diagonal) {
      for (std::size_t i = 0; i < n_paulis; ++i) g[c][i] = wkl[i].real();
    } else {
      const Complex cp = reconstruction_coefficient(spec.p);
      for (std::size_t i = 0; i < n_paulis; ++i) {
        Complex acc = 0.0;
        if (!wkl.empty()) acc += wkl[i] * cp;
        if (!wlk.empty()) acc += wlk[i] * std::conj(cp);
        g[c][i] = acc.real();
      }
    }
  }
  return estimates_->variance(g);
}

Estimate forged_expectation(const TransitionData& data, const std::vector<double>& schmidt,
                            const BipartiteOperator& op) {
  const int K = data.n_strings();
  if (static_cast<int>(schmidt.size()) != K) throw ContractViolation("Schmidt vector size mismatch");
  if (op.n_qubits() != data.n_qubits()) throw ContractViolation("operator and ansatz sizes differ");
  const int n = data.n_qubits();
  const std::size_t n_paulis = std::size_t{1} << (2 * n);
  const auto terms = op.term_list();
  Complex total = 0.0;
  std::vector<std::vector<Complex>> w;
  if (data.sampled()) w.assign(static_cast<std::size_t>(K * K), {});
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < K; ++l) {
      const double ll = schmidt[static_cast<std::size_t>(k)] * schmidt[static_cast<std::size_t>(l)];
      if (ll == 0.0 && !data.sampled()) continue;
      const auto& t = data.table(k, l);
      Complex acc = 0.0;
      std::vector<Complex>* grad = nullptr;
      if (data.sampled()) {
        grad = &w[static_cast<std::size_t>(k * K + l)];
        grad->assign(n_paulis, 0.0);
      }
      for (const auto& term : terms) {
        const std::size_t ia = term.alpha.index(n);
        const std::size_t ib = term.beta.index(n);
        acc += term.coeff * t[ia] * t[ib];
        if (grad) {
          (*grad)[ia] += ll * term.coeff * t[ib];
          (*grad)[ib] += ll * term.coeff * t[ia];
        }
      }
      total += ll * acc;
    }
  Estimate e;
  e.value = total.real();
  if (data.sampled()) e.sigma = std::sqrt(data.variance(w));
  return e;
}

Estimate forged_expectation(const ForgedAnsatz& a, const BipartiteOperator& op) {
  return forged_expectation(exact_transition_data(a), a.schmidt, op);
}

Estimate forged_expectation(const ForgedAnsatz& a, const BipartiteOperator& op,
                            const SamplingOptions& options, std::uint64_t stream) {
  if (options.mode == ExecutionMode::Exact) return forged_expectation(a, op);
  std::vector<PauliString> paulis;
  for (const auto& t : op.term_list()) {
    paulis.push_back(t.alpha);
    paulis.push_back(t.beta);
  }
  auto plan = std::make_shared<const MeasurementPlan>(MeasurementPlan::grouped(a.n_qubits, paulis));
  return forged_expectation(sampled_transition_data(a, plan, options, stream), a.schmidt, op);
}

QubitState direct_statevector(const ForgedAnsatz& a) {
  a.validate();
  if (a.n_qubits > kDirectStatevectorCap) {
    throw NumericalError("direct_statevector is limited to N <= " + std::to_string(kDirectStatevectorCap));
  }
  const int n = a.n_qubits;
  const std::size_t dim = std::size_t{1} << n;
  const Circuit u = build_unitary_circuit(a);
  std::vector<Complex> amps(dim * dim, 0.0);
  for (std::size_t k = 0; k < a.bitstrings.size(); ++k) {
    QubitState s = QubitState::basis(n, a.bitstrings[k]);
    for (const auto& g : u.gates) apply_gate(s, g);
    const double lam = a.schmidt[k];
    for (std::size_t b = 0; b < dim; ++b) {
      if (s[b] == Complex(0.0)) continue;
      for (std::size_t al = 0; al < dim; ++al) amps[al | (b << n)] += lam * s[al] * s[b];
    }
  }
  return QubitState::from_amplitudes(std::move(amps));
}

namespace {

std::vector<double> schmidt_from_angles(const double* phi, std::size_t k) {
  std::vector<double> lam(k, 0.0);
  double run = 1.0;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    lam[i] = run * std::cos(phi[i]);
    run *= std::sin(phi[i]);
  }
  lam[k - 1] = run;
  return lam;
}

struct NmResult {
  std::vector<double> x;
  double f = 0.0;
  bool converged = false;
};

NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                     double step, int max_iter, double tol) {
  const std::size_t n = x0.size();
  NmResult res;
  if (n == 0) {
    res.x = x0;
    res.f = f(x0);
    res.converged = true;
    return res;
  }
  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
  for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);
  std::vector<std::size_t> order(n + 1);
  for (int it = 0; it < max_iter; ++it) {
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
    if (fv[worst] - fv[best] <= tol) {
      res.converged = true;
      break;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[i][d] / static_cast<double>(n);
    }
    auto along = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t d = 0; d < n; ++d) p[d] = centroid[d] + t * (pts[worst][d] - centroid[d]);
      return p;
    };
    const auto xr = along(-1.0);
    const double fr = f(xr);
    if (fr < fv[best]) {
      const auto xe = along(-2.0);
      const double fe = f(xe);
      if (fe < fr) {
        pts[worst] = xe;
        fv[worst] = fe;
      } else {
        pts[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      pts[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    const auto xc = along(outside ? -0.5 : 0.5);
    const double fc = f(xc);
    if (fc < (outside ? fr : fv[worst])) {
      pts[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t d = 0; d < n; ++d) pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
      fv[i] = f(pts[i]);
    }
  }
  const std::size_t best =
      static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  res.x = pts[best];
  res.f = fv[best];
  return res;
}

}  // namespace

OptimizationResult optimize_ground_state(const ForgedAnsatz& templ, const BipartiteOperator& h,
                                         const OptimizerOptions& options) {
  templ.validate();
  const std::size_t n_theta = templ.thetas.size();
  const std::size_t K = templ.bitstrings.size();
  const std::size_t n_phi = K - 1;
  OptimizationResult out;
  auto unpack = [&](const std::vector<double>& x) {
    ForgedAnsatz a = templ;
    std::copy(x.begin(), x.begin() + static_cast<long>(n_theta), a.thetas.begin());
    a.schmidt = schmidt_from_angles(x.data() + n_theta, K);
    return a;
  };
  auto objective = [&](const std::vector<double>& x) {
    const double e = forged_expectation(unpack(x), h).value;
    out.history.push_back(e);
    ++out.evaluations;
    return e;
  };

  // Starting angles reproducing the template's lambda (first start only).
  std::vector<double> x0(templ.thetas);
  {
    double run = 1.0;
    for (std::size_t i = 0; i < n_phi; ++i) {
      const double c = run > 0 ? std::clamp(templ.schmidt[i] / run, -1.0, 1.0) : 1.0;
      const double phi = std::acos(c);
      x0.push_back(phi);
      run *= std::sin(phi);
    }
    // Keep the sign of the last coefficient.
    if (n_phi > 0 && templ.schmidt[K - 1] < 0) x0.back() = -x0.back();
  }

  std::mt19937_64 rng(derive_seed(options.seed, {0x6f7074}));
  std::uniform_real_distribution<double> angle(-M_PI / 2, M_PI / 2);
  std::vector<double> best_x;
  double best_f = std::numeric_limits<double>::infinity();
  bool converged = false;
  const int per_run = std::max(1, options.max_iterations / (options.restarts + 1));
  for (int start = 0; start <= options.restarts; ++start) {
    std::vector<double> x = x0;
    if (start > 0) {
      for (auto& v : x) v = angle(rng);
    }
    NmResult r = nelder_mead(objective, x, options.initial_step, per_run, options.tolerance);
    // Re-seed the simplex at the optimum until the energy stops moving.
    for (int polish = 0; polish < 6; ++polish) {
      NmResult r2 = nelder_mead(objective, r.x, options.initial_step / 4, per_run, options.tolerance);
      const bool settled = r.f - r2.f <= options.tolerance;
      if (r2.f < r.f) r = r2;
      if (settled) break;
    }
    if (r.f < best_f) {
      best_f = r.f;
      best_x = r.x;
      converged = r.converged;
    }
  }
  out.ansatz = unpack(best_x);
  out.energy = best_f;
  out.converged = converged;
  return out;
}

ResourceCount resource_count(const ForgedAnsatz& a) {
  a.validate();
  ResourceCount rc;
  rc.qubits = a.n_qubits;
  rc.n_parameters = a.n_parameters();
  const int hops = static_cast<int>(a.hop_layout.size());
  std::vector<int> last(static_cast<std::size_t>(a.n_qubits), 0);
  int layers = 0;
  for (const auto& [q1, q2] : a.hop_layout) {
    const int l = std::max(last[static_cast<std::size_t>(q1)], last[static_cast<std::size_t>(q2)]) + 1;
    last[static_cast<std::size_t>(q1)] = last[static_cast<std::size_t>(q2)] = l;
    layers = std::max(layers, l);
  }
  const int measure_single = 2 * a.n_qubits;
  if (a.bitstrings.size() >= 2) {
    const int shared = std::popcount(a.bitstrings[0] & a.bitstrings[1]);
    rc.single_qubit_gates = shared + 4 + 4 * hops + measure_single;
    rc.two_qubit_gates = 1 + 3 * hops;
    rc.depth = 3 + 7 * layers + 2;
  } else {
    rc.single_qubit_gates = std::popcount(a.bitstrings[0]) + 4 * hops + measure_single;
    rc.two_qubit_gates = 3 * hops;
    rc.depth = 1 + 7 * layers + 2;
  }
  return rc;
}

std::string ansatz_to_json(const ForgedAnsatz& a) {
  a.validate();
  ojson j;
  j["format"] = "efqse-ansatz";
  j["version"] = 1;
  j["n_qubits"] = a.n_qubits;
  j["bitstrings"] = ojson::array();
  for (auto b : a.bitstrings) j["bitstrings"].push_back(bitstring(b, a.n_qubits));
  j["hop_layout"] = ojson::array();
  for (const auto& [q1, q2] : a.hop_layout) j["hop_layout"].push_back({q1, q2});
  j["hop_parameter"] = a.hop_parameter;
  j["thetas"] = a.thetas;
  j["schmidt"] = a.schmidt;
  return j.dump(2) + "\n";
}

ForgedAnsatz ansatz_from_json(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("ansatz record: ") + e.what());
  }
  try {
    if (j.value("format", std::string()) != "efqse-ansatz") throw ParseError("not an efqse ansatz record");
    if (j.at("version").get<int>() != 1) throw ParseError("unsupported ansatz record version");
    ForgedAnsatz a;
    a.n_qubits = j.at("n_qubits").get<int>();
    for (const auto& b : j.at("bitstrings")) {
      const std::string s = b.get<std::string>();
      if (static_cast<int>(s.size()) != a.n_qubits) throw ParseError("bitstring length differs from n_qubits");
      a.bitstrings.push_back(parse_bitstring(s));
    }
    for (const auto& p : j.at("hop_layout")) a.hop_layout.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
    a.hop_parameter = j.at("hop_parameter").get<std::vector<int>>();
    a.thetas = j.at("thetas").get<std::vector<double>>();
    a.schmidt = j.at("schmidt").get<std::vector<double>>();
    a.validate();
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("ansatz record: ") + e.what());
  }
}

}  // namespace efqse

#include "efqse/statevector.hpp"

#include <bit>
#include <cmath>

#include "efqse/errors.hpp"

namespace efqse {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_qubit(const QubitState& s, int q) {
  if (q < 0 || q >= s.n_qubits()) {
    throw BoundsError("qubit " + std::to_string(q) + " outside register of " +
                      std::to_string(s.n_qubits()));
  }
}

void check_pair(const QubitState& s, int q1, int q2) {
  check_qubit(s, q1);
  check_qubit(s, q2);
  if (q1 == q2) throw ContractViolation("two-qubit gate needs distinct qubits");
}

// Applies a 2x2 matrix to qubit q.
void apply_1q(QubitState& s, int q, Complex a, Complex b, Complex c, Complex d) {
  auto& v = s.amplitudes();
  const std::size_t bit = std::size_t{1} << q;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i & bit) continue;
    const Complex x0 = v[i];
    const Complex x1 = v[i | bit];
    v[i] = a * x0 + b * x1;
    v[i | bit] = c * x0 + d * x1;
  }
}

void apply_h(QubitState& s, int q) { apply_1q(s, q, kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2); }

void apply_phase(QubitState& s, int q, Complex phase) { apply_1q(s, q, 1.0, 0.0, 0.0, phase); }

void apply_cnot(QubitState& s, int control, int target) {
  auto& v = s.amplitudes();
  const std::size_t cb = std::size_t{1} << control;
  const std::size_t tb = std::size_t{1} << target;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if ((i & cb) && !(i & tb)) std::swap(v[i], v[i | tb]);
  }
}

}  // namespace

VprepVariant phi_variant(int p) {
  switch (p) {
    case 0: return VprepVariant::Phi0;
    case 1: return VprepVariant::Phi1;
    case 2: return VprepVariant::Phi2;
    case 3: return VprepVariant::Phi3;
    default: throw BoundsError("phi_p variant needs p in 0..3");
  }
}

void Circuit::validate() const {
  auto in_range = [&](int q) {
    if (q < 0 || q >= n_qubits) {
      throw BoundsError("circuit gate on qubit " + std::to_string(q) + " outside 0.." +
                        std::to_string(n_qubits - 1));
    }
  };
  for (const auto& g : gates) {
    std::visit(
        [&](const auto& gate) {
          using T = std::decay_t<decltype(gate)>;
          if constexpr (std::is_same_v<T, PauliXGate> || std::is_same_v<T, BasisRotationGate>) {
            in_range(gate.q);
          } else {
            in_range(gate.q1);
            in_range(gate.q2);
            if (gate.q1 == gate.q2) throw ContractViolation("two-qubit gate needs distinct qubits");
          }
        },
        g);
  }
}

QubitState::QubitState(int n_qubits) : n_(n_qubits) {
  if (n_qubits < 0 || n_qubits > 30) throw BoundsError("unsupported register size");
  amps_.assign(std::size_t{1} << n_qubits, 0.0);
  amps_[0] = 1.0;
}

QubitState QubitState::basis(int n_qubits, std::uint64_t bits) {
  QubitState s(n_qubits);
  if (bits >= s.dim()) throw BoundsError("basis index outside register");
  s.amps_[0] = 0.0;
  s.amps_[bits] = 1.0;
  return s;
}

QubitState QubitState::from_amplitudes(std::vector<Complex> amps) {
  const int n = std::countr_zero(amps.size());
  if (amps.empty() || (std::size_t{1} << n) != amps.size()) {
    throw ContractViolation("amplitude vector length must be a power of two");
  }
  QubitState s(n);
  s.amps_ = std::move(amps);
  return s;
}

double QubitState::norm_squared() const {
  double acc = 0.0;
  for (const auto& a : amps_) acc += std::norm(a);
  return acc;
}

void apply_hop_gate(QubitState& s, double theta, int q1, int q2) {
  check_pair(s, q1, q2);
  const double c = std::cos(theta);
  const double sn = std::sin(theta);
  auto& v = s.amplitudes();
  const std::size_t b1 = std::size_t{1} << q1;
  const std::size_t b2 = std::size_t{1} << q2;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i & (b1 | b2)) continue;
    // i has q1 = q2 = 0.
    const std::size_t i01 = i | b2;  // q1 = 0, q2 = 1
    const std::size_t i10 = i | b1;  // q1 = 1, q2 = 0
    const std::size_t i11 = i | b1 | b2;
    const Complex a01 = v[i01];
    const Complex a10 = v[i10];
    v[i01] = c * a01 + sn * a10;
    v[i10] = sn * a01 - c * a10;
    v[i11] = -v[i11];
  }
}

void apply_vprep(QubitState& s, int q1, int q2, VprepVariant variant) {
  check_pair(s, q1, q2);
  switch (variant) {
    case VprepVariant::Ten:
      apply_1q(s, q1, 0.0, 1.0, 1.0, 0.0);
      return;
    case VprepVariant::ZeroOne:
      apply_1q(s, q2, 0.0, 1.0, 1.0, 0.0);
      return;
    default:
      break;
  }
  // (|10> + |01>)/sqrt2 from |00>: H on q1, CNOT q1->q2, X on q2.
  apply_h(s, q1);
  apply_cnot(s, q1, q2);
  apply_1q(s, q2, 0.0, 1.0, 1.0, 0.0);
  // R_p on q1: I, ZS, Z, S for p = 0..3.
  switch (variant) {
    case VprepVariant::Phi1: apply_phase(s, q1, Complex(0.0, -1.0)); break;
    case VprepVariant::Phi2: apply_phase(s, q1, -1.0); break;
    case VprepVariant::Phi3: apply_phase(s, q1, Complex(0.0, 1.0)); break;
    default: break;
  }
}

void apply_pauli_x(QubitState& s, int q) {
  check_qubit(s, q);
  apply_1q(s, q, 0.0, 1.0, 1.0, 0.0);
}

void apply_basis_rotation(QubitState& s, int q, Axis axis) {
  check_qubit(s, q);
  switch (axis) {
    case Axis::X: apply_h(s, q); break;
    case Axis::Y:
      apply_phase(s, q, Complex(0.0, -1.0));
      apply_h(s, q);
      break;
    case Axis::Z: break;
  }
}

void apply_gate(QubitState& s, const Gate& g) {
  std::visit(
      [&](const auto& gate) {
        using T = std::decay_t<decltype(gate)>;
        if constexpr (std::is_same_v<T, PauliXGate>) {
          apply_pauli_x(s, gate.q);
        } else if constexpr (std::is_same_v<T, VprepGate>) {
          apply_vprep(s, gate.q1, gate.q2, gate.variant);
        } else if constexpr (std::is_same_v<T, HopGate>) {
          apply_hop_gate(s, gate.theta, gate.q1, gate.q2);
        } else {
          apply_basis_rotation(s, gate.q, gate.axis);
        }
      },
      g);
}

QubitState run_circuit(const Circuit& c) {
  c.validate();
  QubitState s(c.n_qubits);
  for (const auto& g : c.gates) apply_gate(s, g);
  return s;
}

Complex pauli_expectation(const QubitState& s, const PauliString& p) {
  if ((p.support() >> s.n_qubits()) != 0) throw BoundsError("Pauli string exceeds register");
  const auto& v = s.amplitudes();
  Complex acc = 0.0;
  for (std::size_t b = 0; b < v.size(); ++b) {
    const double sign = (std::popcount(b & p.z) & 1) ? -1.0 : 1.0;
    acc += std::conj(v[b ^ p.x]) * v[b] * sign;
  }
  return acc * i_power(std::popcount(p.x & p.z));
}

double expectation(const QubitState& s, const PauliSum& op) {
  if (op.n_qubits() != s.n_qubits()) throw ContractViolation("operator and state sizes differ");
  if (!op.is_hermitian()) throw ContractViolation("expectation needs a Hermitian Pauli sum");
  Complex acc = 0.0;
  for (const auto& [p, c] : op.terms()) acc += c * pauli_expectation(s, p);
  return acc.real();
}

std::vector<Complex> all_pauli_traces(const Eigen::MatrixXcd& m) {
  const std::size_t dim = static_cast<std::size_t>(m.rows());
  const int n = std::countr_zero(dim);
  std::vector<Complex> out(dim * dim);
  std::vector<Complex> f(dim);
  for (std::size_t x = 0; x < dim; ++x) {
    for (std::size_t c = 0; c < dim; ++c) {
      f[c] = m(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c ^ x));
    }
    walsh_hadamard(f);
    for (std::size_t z = 0; z < dim; ++z) {
      out[(x << n) | z] = f[z] * i_power(std::popcount(x & z));
    }
  }
  return out;
}

std::vector<Complex> all_pauli_expectations(const QubitState& s) {
  const auto& v = s.amplitudes();
  const std::size_t dim = v.size();
  const int n = s.n_qubits();
  std::vector<Complex> out(dim * dim);
  std::vector<Complex> f(dim);
  for (std::size_t x = 0; x < dim; ++x) {
    for (std::size_t c = 0; c < dim; ++c) f[c] = v[c] * std::conj(v[c ^ x]);
    walsh_hadamard(f);
    for (std::size_t z = 0; z < dim; ++z) {
      out[(x << n) | z] = f[z] * i_power(std::popcount(x & z));
    }
  }
  return out;
}

Eigen::MatrixXcd matrix_from_pauli_traces(const std::vector<Complex>& traces, int n_qubits) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (traces.size() != dim * dim) throw ContractViolation("trace vector has the wrong length");
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  std::vector<Complex> f(dim);
  const double scale = 1.0 / static_cast<double>(dim);
  for (std::size_t x = 0; x < dim; ++x) {
    for (std::size_t z = 0; z < dim; ++z) {
      f[z] = traces[(x << n_qubits) | z] * i_power(-std::popcount(x & z));
    }
    walsh_hadamard(f);
    for (std::size_t c = 0; c < dim; ++c) {
      m(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c ^ x)) = f[c] * scale;
    }
  }
  return m;
}

std::uint64_t histogram_total(const Histogram& h) {
  std::uint64_t t = 0;
  for (auto c : h) t += c;
  return t;
}

std::string bitstring(std::uint64_t bits, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int i = 0; i < n; ++i) {
    if ((bits >> i) & 1u) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

std::uint64_t parse_bitstring(const std::string& s) {
  if (s.size() > 63) throw BoundsError("bitstring longer than 63 characters");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1') {
      bits |= std::uint64_t{1} << i;
    } else if (s[i] != '0') {
      throw ParseError("bitstring '" + s + "' contains a character other than 0/1");
    }
  }
  return bits;
}

Histogram sample_multinomial(const std::vector<double>& probs, std::uint64_t shots,
                             std::mt19937_64& rng) {
  Histogram h(probs.size(), 0);
  double mass = 0.0;
  for (double p : probs) mass += p;
  std::uint64_t left = shots;
  for (std::size_t i = 0; i < probs.size() && left > 0; ++i) {
    if (i + 1 == probs.size()) {
      h[i] = left;
      break;
    }
    const double p = probs[i];
    if (p <= 0.0) {
      mass -= p;
      continue;
    }
    const double frac = mass > 0.0 ? std::min(1.0, p / mass) : 1.0;
    std::binomial_distribution<std::uint64_t> draw(left, frac);
    const std::uint64_t k = frac >= 1.0 ? left : draw(rng);
    h[i] = k;
    left -= k;
    mass -= p;
  }
  return h;
}

Histogram sample_counts(const QubitState& s, const std::vector<Axis>& bases, std::uint64_t shots,
                        std::uint64_t seed) {
  if (shots == 0) throw ContractViolation("sample_counts needs at least one shot");
  if (static_cast<int>(bases.size()) != s.n_qubits()) {
    throw ContractViolation("one measurement axis per qubit is required");
  }
  QubitState rotated = s;
  for (int q = 0; q < s.n_qubits(); ++q) apply_basis_rotation(rotated, q, bases[static_cast<std::size_t>(q)]);
  std::vector<double> probs(rotated.dim());
  for (std::size_t b = 0; b < probs.size(); ++b) probs[b] = std::norm(rotated[b]);
  std::mt19937_64 rng(seed);
  return sample_multinomial(probs, shots, rng);
}

}  // namespace efqse

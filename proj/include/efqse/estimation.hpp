#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "efqse/noise.hpp"
#include "efqse/statevector.hpp"

namespace efqse {

enum class ExecutionMode : std::uint8_t { Exact, Sampled, Noisy };

std::string_view mode_name(ExecutionMode m);
ExecutionMode parse_mode(std::string_view name);

/// Which mitigation stages run in noisy mode. Order is fixed: twirl, then
/// post-selection, then rescaling by the calibrated attenuation.
struct MitigationOptions {
  bool twirl = true;
  bool post_select = true;
  bool rescale = true;

  static MitigationOptions off() { return {false, false, false}; }
};

struct SamplingOptions {
  ExecutionMode mode = ExecutionMode::Sampled;
  std::uint64_t shots = 100000;
  std::uint64_t seed = 0;
  ReadoutModel noise;
  MitigationOptions mitigation;
  int threads = 0;
};

/// Measurement settings (one axis per qubit) and the Pauli strings each
/// setting is responsible for. Every listed Pauli belongs to exactly one
/// setting; the identity is never measured.
struct MeasurementPlan {
  struct Member {
    std::size_t pauli_index;  // PauliString::index
    std::uint32_t support;
  };

  int n_qubits = 0;
  std::vector<std::vector<Axis>> settings;
  std::vector<std::vector<Member>> members;

  /// All 3^N settings. A Pauli with I on qubit q is read from the setting
  /// that has Z there.
  static MeasurementPlan tomography(int n_qubits);
  /// Greedy qubit-wise-commuting grouping; unused qubits are measured in Z.
  static MeasurementPlan grouped(int n_qubits, const std::vector<PauliString>& paulis);

  std::size_t n_members() const;
  static bool all_z(const std::vector<Axis>& setting);
};

/// A prepared N-qubit state to be measured, with the Hamming weight that
/// number conservation guarantees for its computational-basis outcomes.
struct CircuitJob {
  QubitState state;
  int expected_weight = 0;
};

/// Finite-shot estimates of every planned Pauli on every circuit, with the
/// processed histograms kept for variance propagation.
class PauliEstimates {
 public:
  struct SettingRecord {
    Histogram counts;  // after noise and mitigation
    std::uint64_t kept = 0;
    double acceptance_rate = 1.0;
    bool post_selected = false;
  };

  int n_qubits() const { return n_; }
  std::size_t n_circuits() const { return estimates_.size(); }
  const MeasurementPlan& plan() const { return *plan_; }
  const ReadoutCalibration& calibration() const { return calibration_; }

  /// Estimate of <P> on circuit c (1 for the identity, 0 if unplanned).
  double value(std::size_t circuit, std::size_t pauli_index) const {
    return estimates_[circuit][pauli_index];
  }
  const std::vector<double>& values(std::size_t circuit) const { return estimates_[circuit]; }
  bool measured(std::size_t pauli_index) const { return measured_[pauli_index] != 0; }
  const SettingRecord& record(std::size_t circuit, std::size_t setting) const {
    return records_[circuit][setting];
  }
  double mean_acceptance() const;

  /// First-order variance of a linear functional sum_c sum_P g[c][P] <P>_c.
  /// Uses the empirical per-setting shot variance, so correlations between
  /// Paulis read from the same setting are included.
  double variance(const std::vector<std::vector<double>>& gradient) const;

  friend PauliEstimates measure(const std::vector<CircuitJob>& jobs,
                                std::shared_ptr<const MeasurementPlan> plan,
                                const SamplingOptions& options, std::uint64_t stream);

 private:
  int n_ = 0;
  std::shared_ptr<const MeasurementPlan> plan_;
  ReadoutCalibration calibration_;
  std::vector<std::vector<SettingRecord>> records_;
  std::vector<std::vector<double>> estimates_;
  std::vector<char> measured_;
  std::vector<std::vector<double>> attenuation_;  // [setting][member]
};

/// Samples every (circuit, setting) pair. Streams are seeded from
/// (options.seed, stream, circuit, setting) so results do not depend on
/// the thread count.
PauliEstimates measure(const std::vector<CircuitJob>& jobs, std::shared_ptr<const MeasurementPlan> plan,
                       const SamplingOptions& options, std::uint64_t stream);

}  // namespace efqse

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "efqse/statevector.hpp"

namespace efqse {

/// Independent per-qubit readout flips.
struct ReadoutModel {
  std::vector<double> p01;  // P(read 1 | true 0)
  std::vector<double> p10;  // P(read 0 | true 1)

  static ReadoutModel uniform(int n_qubits, double p);
  static ReadoutModel none(int n_qubits) { return uniform(n_qubits, 0.0); }
  int n_qubits() const { return static_cast<int>(p01.size()); }
  bool is_noiseless() const;
  /// Throws ConfigError unless every rate lies in [0, 1/2).
  void validate() const;
};

/// Flips every recorded bit independently with the model's rates. The shot
/// total is preserved.
Histogram corrupt_counts(const Histogram& counts, const ReadoutModel& model, std::mt19937_64& rng);
Histogram corrupt_counts(const Histogram& counts, const ReadoutModel& model, std::uint64_t seed);

/// Random X layer before readout, noisy readout, then the recorded X layer
/// undone on the classical bits. Turns the channel into a symmetric one.
Histogram twirled_readout(const Histogram& ideal, const ReadoutModel& model, std::mt19937_64& rng);

struct PostSelection {
  Histogram counts;
  double acceptance_rate = 0.0;
};

/// Keeps outcomes with the given Hamming weight. Throws NumericalError if
/// nothing survives.
PostSelection post_select(const Histogram& counts, int expected_hamming_weight);

/// Symmetrized per-qubit flip rates from all-0 and all-1 calibration
/// circuits, and the attenuation factors 1 - 2 p_q they imply.
struct ReadoutCalibration {
  std::vector<double> flip_rate;
  std::vector<double> attenuation;

  static ReadoutCalibration ideal(int n_qubits);
  /// Product of attenuations over the qubits in `support`.
  double attenuation_of(std::uint64_t support) const;
};

ReadoutCalibration calibrate_readout(const ReadoutModel& model, std::uint64_t shots, bool twirl,
                                     std::uint64_t seed);

/// Smallest attenuation accepted before mitigation is declared unreliable.
inline constexpr double kMinAttenuation = 0.1;

struct MitigatedValue {
  double value = 0.0;
  double sigma = 0.0;
  double raw_value = 0.0;
  double raw_sigma = 0.0;
};

/// Executor returning ideal computational-basis counts for `shots` shots.
using CountsExecutor = std::function<Histogram(std::uint64_t shots, std::uint64_t seed)>;

/// Twirled readout mitigation of the parity observable Z^support: runs the
/// executor, applies the twirled noisy readout, calibrates with two extra
/// circuits at the same budget, and rescales by the calibrated attenuation.
/// raw_* report the same data without the rescaling.
MitigatedValue twirled_readout_mitigation(const CountsExecutor& executor, std::uint64_t support,
                                          const ReadoutModel& model, std::uint64_t shots,
                                          std::uint64_t seed);

/// Mean and standard error of (-1)^{|o & support|} under a histogram.
std::pair<double, double> parity_mean_and_error(const Histogram& counts, std::uint64_t support);

}  // namespace efqse

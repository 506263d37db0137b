#include "efqse/noise.hpp"

#include <bit>
#include <cmath>

#include "efqse/errors.hpp"
#include "efqse/parallel.hpp"

namespace efqse {

ReadoutModel ReadoutModel::uniform(int n_qubits, double p) {
  ReadoutModel m;
  m.p01.assign(static_cast<std::size_t>(n_qubits), p);
  m.p10.assign(static_cast<std::size_t>(n_qubits), p);
  m.validate();
  return m;
}

bool ReadoutModel::is_noiseless() const {
  for (std::size_t q = 0; q < p01.size(); ++q) {
    if (p01[q] != 0.0 || p10[q] != 0.0) return false;
  }
  return true;
}

void ReadoutModel::validate() const {
  if (p01.size() != p10.size()) throw ConfigError("readout model rate lists differ in length");
  for (std::size_t q = 0; q < p01.size(); ++q) {
    for (double p : {p01[q], p10[q]}) {
      if (!(p >= 0.0 && p < 0.5)) {
        throw ConfigError("readout error rate " + std::to_string(p) + " on qubit " +
                          std::to_string(q) + " outside [0, 0.5)");
      }
    }
  }
}

Histogram corrupt_counts(const Histogram& counts, const ReadoutModel& model, std::mt19937_64& rng) {
  const int n = model.n_qubits();
  if (counts.size() != (std::size_t{1} << n)) {
    throw ContractViolation("histogram size does not match the readout model");
  }
  Histogram cur = counts;
  for (int q = 0; q < n; ++q) {
    const double p01 = model.p01[static_cast<std::size_t>(q)];
    const double p10 = model.p10[static_cast<std::size_t>(q)];
    if (p01 == 0.0 && p10 == 0.0) continue;
    const std::size_t bit = std::size_t{1} << q;
    Histogram next(cur.size(), 0);
    for (std::size_t b = 0; b < cur.size(); ++b) {
      const std::uint64_t c = cur[b];
      if (c == 0) continue;
      const double p = (b & bit) ? p10 : p01;
      std::uint64_t flips = 0;
      if (p > 0.0) {
        std::binomial_distribution<std::uint64_t> draw(c, p);
        flips = draw(rng);
      }
      next[b] += c - flips;
      next[b ^ bit] += flips;
    }
    cur = std::move(next);
  }
  return cur;
}

Histogram corrupt_counts(const Histogram& counts, const ReadoutModel& model, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return corrupt_counts(counts, model, rng);
}

Histogram twirled_readout(const Histogram& ideal, const ReadoutModel& model, std::mt19937_64& rng) {
  const std::size_t dim = ideal.size();
  const std::vector<double> uniform(dim, 1.0 / static_cast<double>(dim));
  // shots_by_mask[m][o]: shots with true outcome o measured under X mask m.
  std::vector<Histogram> by_mask(dim, Histogram(dim, 0));
  for (std::size_t o = 0; o < dim; ++o) {
    if (ideal[o] == 0) continue;
    const Histogram split = sample_multinomial(uniform, ideal[o], rng);
    for (std::size_t m = 0; m < dim; ++m) by_mask[m][o ^ m] += split[m];
  }
  Histogram out(dim, 0);
  for (std::size_t m = 0; m < dim; ++m) {
    if (histogram_total(by_mask[m]) == 0) continue;
    const Histogram noisy = corrupt_counts(by_mask[m], model, rng);
    for (std::size_t o = 0; o < dim; ++o) out[o ^ m] += noisy[o];
  }
  return out;
}

PostSelection post_select(const Histogram& counts, int expected_hamming_weight) {
  PostSelection out;
  out.counts.assign(counts.size(), 0);
  std::uint64_t total = 0, kept = 0;
  for (std::size_t b = 0; b < counts.size(); ++b) {
    total += counts[b];
    if (std::popcount(b) == expected_hamming_weight) {
      out.counts[b] = counts[b];
      kept += counts[b];
    }
  }
  if (kept == 0) {
    throw NumericalError("post-selection rejected every shot (expected weight " +
                         std::to_string(expected_hamming_weight) + ")");
  }
  out.acceptance_rate = static_cast<double>(kept) / static_cast<double>(total);
  return out;
}

ReadoutCalibration ReadoutCalibration::ideal(int n_qubits) {
  ReadoutCalibration c;
  c.flip_rate.assign(static_cast<std::size_t>(n_qubits), 0.0);
  c.attenuation.assign(static_cast<std::size_t>(n_qubits), 1.0);
  return c;
}

double ReadoutCalibration::attenuation_of(std::uint64_t support) const {
  double a = 1.0;
  for (std::size_t q = 0; q < attenuation.size(); ++q) {
    if ((support >> q) & 1u) a *= attenuation[q];
  }
  return a;
}

ReadoutCalibration calibrate_readout(const ReadoutModel& model, std::uint64_t shots, bool twirl,
                                     std::uint64_t seed) {
  const int n = model.n_qubits();
  const std::size_t dim = std::size_t{1} << n;
  ReadoutCalibration cal = ReadoutCalibration::ideal(n);
  if (shots == 0) throw ContractViolation("calibration needs at least one shot");
  std::vector<double> p01(static_cast<std::size_t>(n)), p10(static_cast<std::size_t>(n));
  for (int which = 0; which < 2; ++which) {
    const std::size_t prepared = which == 0 ? 0 : dim - 1;
    Histogram ideal(dim, 0);
    ideal[prepared] = shots;
    std::mt19937_64 rng(derive_seed(seed, {static_cast<std::uint64_t>(which)}));
    const Histogram read = twirl ? twirled_readout(ideal, model, rng) : corrupt_counts(ideal, model, rng);
    for (int q = 0; q < n; ++q) {
      std::uint64_t flipped = 0;
      for (std::size_t b = 0; b < dim; ++b) {
        if (((b >> q) & 1u) != ((prepared >> q) & 1u)) flipped += read[b];
      }
      const double rate = static_cast<double>(flipped) / static_cast<double>(shots);
      (which == 0 ? p01 : p10)[static_cast<std::size_t>(q)] = rate;
    }
  }
  for (std::size_t q = 0; q < static_cast<std::size_t>(n); ++q) {
    cal.flip_rate[q] = 0.5 * (p01[q] + p10[q]);
    cal.attenuation[q] = 1.0 - 2.0 * cal.flip_rate[q];
  }
  return cal;
}

std::pair<double, double> parity_mean_and_error(const Histogram& counts, std::uint64_t support) {
  double sum = 0.0;
  std::uint64_t total = 0;
  for (std::size_t b = 0; b < counts.size(); ++b) {
    if (counts[b] == 0) continue;
    const double v = (std::popcount(b & support) & 1) ? -1.0 : 1.0;
    sum += v * static_cast<double>(counts[b]);
    total += counts[b];
  }
  if (total == 0) throw ContractViolation("empty histogram");
  const double mean = sum / static_cast<double>(total);
  const double var = std::max(0.0, 1.0 - mean * mean);
  return {mean, std::sqrt(var / static_cast<double>(total))};
}

MitigatedValue twirled_readout_mitigation(const CountsExecutor& executor, std::uint64_t support,
                                          const ReadoutModel& model, std::uint64_t shots,
                                          std::uint64_t seed) {
  model.validate();
  const Histogram ideal = executor(shots, derive_seed(seed, {0}));
  std::mt19937_64 rng(derive_seed(seed, {1}));
  const Histogram read = twirled_readout(ideal, model, rng);
  const ReadoutCalibration cal = calibrate_readout(model, shots, true, derive_seed(seed, {2}));
  const double att = cal.attenuation_of(support);
  if (att < kMinAttenuation) {
    throw NumericalError("calibrated readout attenuation " + std::to_string(att) +
                         " is below the reliability floor");
  }
  const auto [mean, err] = parity_mean_and_error(read, support);
  MitigatedValue out;
  out.raw_value = mean;
  out.raw_sigma = err;
  out.value = mean / att;
  out.sigma = err / att;
  return out;
}

}  // namespace efqse

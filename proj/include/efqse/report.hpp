#pragma once

#include <optional>
#include <string>
#include <vector>

#include "efqse/spectrum.hpp"

namespace efqse {

/// Extra fields written next to a spectrum.
struct SpectrumMetadata {
  std::string mode;      // "casci", "exact", "sampled", "noisy"
  std::string molecule;  // may be empty
  std::optional<std::uint64_t> shots;
  std::optional<double> ground_energy;  // forged ground-state energy
  std::optional<double> ground_sigma;
  std::optional<double> eps_m;
  std::optional<double> eps_s;
};

std::string spectrum_to_json(const LabeledSpectrum& s, const SpectrumMetadata& meta);
/// Reads back the states, method and warnings written by spectrum_to_json.
LabeledSpectrum spectrum_from_json(const std::string& text, SpectrumMetadata* meta = nullptr);

/// Aligned-column CSV of one spectrum: label, S, irrep, energy, dE and sigma.
std::string excitation_report(const LabeledSpectrum& s);

/// dE per labeled state across several spectra, one column pair per spectrum.
std::string excitation_table(const std::vector<std::string>& labels, const std::vector<const LabeledSpectrum*>& spectra,
                             const std::vector<std::string>& names);

/// Labels of up to `per_class` excited states of every (spin, irrep) class,
/// in ascending energy, excluding the ground state.
std::vector<std::string> comparison_labels(const LabeledSpectrum& reference, int per_class);

/// Min / max / mean of ddE = dE_B - dE_A over the aligned labels, the mean
/// sigma of B, and chi^2 with sigma_i^2 = sigma_A^2 + sigma_B^2 (absent when
/// any combined sigma is zero).
struct DeviationSummary {
  std::string first;
  std::string second;
  std::size_t n = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double mean_sigma = 0.0;
  std::optional<double> chi2;
  std::vector<double> deviations;  // per label, eV
};

/// Throws AlignmentError naming every label missing from either spectrum.
DeviationSummary deviation_report(const std::string& first_name, const LabeledSpectrum& first,
                                  const std::string& second_name, const LabeledSpectrum& second,
                                  const std::vector<std::string>& labels);

std::string comparison_csv(const std::vector<DeviationSummary>& rows);

/// Renders rows of cells as comma-separated, right-aligned columns.
std::string aligned_csv(const std::vector<std::vector<std::string>>& rows);

/// Fixed-point formatting with the given number of decimals.
std::string fixed(double v, int decimals);

}  // namespace efqse

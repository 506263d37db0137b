#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "efqse/chemio.hpp"
#include "efqse/errors.hpp"
#include "efqse/estimation.hpp"
#include "efqse/forging.hpp"
#include "efqse/qse.hpp"
#include "efqse/report.hpp"

namespace efqse {

struct RunConfig {
  std::string fcidump;                     // resolved against base_dir when relative
  std::string orbsym_convention = "standard";
  std::vector<int> active_orbitals;        // 1-based; empty = all orbitals
  std::vector<int> frozen_orbitals;        // 1-based
  std::optional<int> active_electrons;
  std::string molecule;
  ExecutionMode mode = ExecutionMode::Exact;
  std::uint64_t shots = 100000;
  std::optional<std::uint64_t> seed;

  std::optional<double> readout_error;     // uniform p01 = p10
  std::vector<double> p01, p10;            // per qubit
  MitigationOptions mitigation;

  OptimizerOptions optimizer;
  std::vector<std::string> bitstrings;     // character i = qubit i
  std::vector<std::pair<int, int>> hop_layout;
  std::optional<int> n_hops;

  std::optional<double> eps_m;
  double eps_s = 0.1;
  int states_per_class = 2;
  int bootstrap_resamples = 200;
  Irrep reference_irrep = Irrep::A1;
  int casci_states = 0;

  std::string output_dir = "efqse-out";
  int threads = 0;
  std::string base_dir;

  /// Mode-dependent checks, run after command-line overrides.
  void validate() const;
  bool has_noise() const { return readout_error.has_value() || !p01.empty(); }
  std::string fcidump_path() const;
};

/// Parses and schema-checks a JSON run configuration. Unknown keys, wrong
/// types and out-of-range values raise ConfigError.
RunConfig parse_run_config(const std::string& text, const std::string& base_dir = "");
RunConfig read_run_config(const std::string& path);
std::string run_config_to_json(const RunConfig& c);

/// Error raised by a pipeline stage; `exit_code` is 2 for configuration
/// and input problems, 3 for numerical failures.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what, int exit_code)
      : Error(stage + ": " + what), stage_(std::move(stage)), exit_code_(exit_code) {}
  const std::string& stage() const { return stage_; }
  int exit_code() const { return exit_code_; }

 private:
  std::string stage_;
  int exit_code_;
};

/// Active-space integrals selected by the configuration.
MolecularIntegrals load_integrals(const RunConfig& c);

/// Starting ansatz (defaults plus configured overrides).
ForgedAnsatz initial_ansatz(const RunConfig& c, const MolecularIntegrals& ints);

struct ModeResult {
  ExecutionMode mode = ExecutionMode::Exact;
  Estimate ground;
  QseResult qse;
};

struct RunArtifacts {
  MolecularIntegrals integrals;
  LabeledSpectrum casci;
  OptimizationResult forged;
  std::vector<ModeResult> modes;
  std::vector<DeviationSummary> comparison;
  std::vector<std::string> labels;
};

/// Modes evaluated for a requested mode: exact; exact and sampled; or all
/// three for noisy.
std::vector<ExecutionMode> mode_cascade(ExecutionMode m);

LabeledSpectrum run_casci(const RunConfig& c, const MolecularIntegrals& ints);
OptimizationResult run_forge(const RunConfig& c, const MolecularIntegrals& ints);
ModeResult run_qse(const RunConfig& c, const MolecularIntegrals& ints, const ForgedAnsatz& a, ExecutionMode mode);
std::vector<DeviationSummary> run_compare(const RunConfig& c, const LabeledSpectrum* casci,
                                          const std::vector<std::pair<ExecutionMode, const LabeledSpectrum*>>& modes,
                                          std::vector<std::string>* labels = nullptr);

/// Whole chain; every finished stage writes its outputs before the next
/// one starts, so a failure leaves the earlier files in place.
RunArtifacts run_pipeline(const RunConfig& c);

/// Single-stage entry points used by the command-line subcommands. Each
/// reads earlier outputs from the output directory when present.
void stage_casci(const RunConfig& c);
void stage_forge(const RunConfig& c);
void stage_qse(const RunConfig& c);
void stage_compare(const RunConfig& c);
/// Writes excitations.csv and returns a printable summary.
std::string stage_report(const RunConfig& c);

}  // namespace efqse

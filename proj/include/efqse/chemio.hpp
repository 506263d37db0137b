#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "efqse/irrep.hpp"

namespace efqse {

/// Hartree to electron-volt.
inline constexpr double kHartreeToEv = 27.211386245988;

/// Active-space (or full) electronic Hamiltonian integrals.
///
/// Two-electron integrals are in chemists' notation (pq|rs) and are stored
/// once per 8-fold symmetry class; eri() resolves any index permutation.
class MolecularIntegrals {
 public:
  MolecularIntegrals() = default;
  explicit MolecularIntegrals(int n_orbitals);

  int n_orbitals() const { return n_orbitals_; }
  int n_alpha = 0;
  int n_beta = 0;
  double core_energy = 0.0;
  std::vector<Irrep> orbital_irreps;
  std::string point_group = "C2v";

  double h(int p, int q) const { return h_(p, q); }
  /// Sets h_pq and h_qp.
  void set_h(int p, int q, double value);
  const Eigen::MatrixXd& one_body() const { return h_; }

  double eri(int p, int q, int r, int s) const { return eri_[eri_index(p, q, r, s)]; }
  /// Sets (pq|rs) and all of its symmetry images.
  void set_eri(int p, int q, int r, int s, double value);

  std::size_t packed_eri_size() const { return eri_.size(); }
  static std::size_t eri_index(int p, int q, int r, int s);

  /// Throws ContractViolation if dimensions or electron counts are inconsistent.
  void validate() const;

 private:
  int n_orbitals_ = 0;
  Eigen::MatrixXd h_;
  std::vector<double> eri_;
};

/// Selection of active orbitals (0-based indices into the full MO set).
struct ActiveSpaceSpec {
  std::vector<int> active_orbital_indices;
  int n_active_electrons = 0;

  void validate(int n_full_orbitals) const;
};

struct FcidumpOptions {
  OrbsymConvention convention = OrbsymConvention::standard();
};

MolecularIntegrals parse_fcidump(std::string_view text, const FcidumpOptions& options = {});
MolecularIntegrals read_fcidump(const std::string& path, const FcidumpOptions& options = {});

/// Serializes every symmetry-unique nonzero integral with shortest
/// round-trip formatting, so parse(write(x)) reproduces x bit for bit.
std::string write_fcidump(const MolecularIntegrals& ints, const FcidumpOptions& options = {});

/// Frozen-core embedding: folds doubly occupied `frozen_occupied` orbitals
/// into the core energy and effective one-electron integrals, and returns
/// integrals over the active orbitals only. Orbitals in neither set are
/// discarded.
MolecularIntegrals freeze_core(const MolecularIntegrals& full, const ActiveSpaceSpec& spec,
                               const std::vector<int>& frozen_occupied);

struct OrbitalRecord {
  int index = 0;  // 1-based MO index as tabulated
  Irrep irrep = Irrep::A1;
  int occupancy = 0;
  std::string character;  // "pi", "n", "pi*"
  double energy_ev = 0.0;
};

/// Bundled active-orbital metadata for furan, pyrrole, pyridine and
/// pyrimidine. Throws ConfigError for other names.
std::vector<OrbitalRecord> orbital_metadata_table(std::string_view molecule);

/// Parses the plain-text metadata format (see data/orbital_metadata.tsv).
std::vector<std::pair<std::string, OrbitalRecord>> parse_orbital_metadata(std::string_view text);

}  // namespace efqse

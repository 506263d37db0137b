#pragma once

#include <optional>
#include <string>
#include <vector>

#include "efqse/irrep.hpp"

namespace efqse {

/// One eigenstate tagged by total spin and irrep. `ordinal` counts states
/// of the same (spin, irrep) class from 1 in ascending energy, so the
/// ground state of a closed-shell molecule is 1^1A1.
struct LabeledState {
  double energy = 0.0;         // Hartree
  double excitation_ev = 0.0;  // (E - E_ground) in eV
  double sigma_ev = 0.0;       // uncertainty of excitation_ev
  int spin = 0;                // total spin S
  double s2 = 0.0;             // measured <S^2>
  Irrep irrep = Irrep::A1;
  int ordinal = 0;
  bool unstable = false;  // label not reproduced in every bootstrap resample

  std::string label() const;
};

std::string state_label(int ordinal, int spin, Irrep irrep);

struct LabeledSpectrum {
  std::string method;
  std::vector<LabeledState> states;  // ascending energy
  std::vector<std::string> warnings;

  const LabeledState& ground() const;
  const LabeledState* find(const std::string& label) const;
  const LabeledState* find(int spin, Irrep irrep, int ordinal) const;
};

/// Sorts by energy (ties within 1e-9 Hartree broken by spin, then irrep),
/// assigns ordinals per (spin, irrep) class and fills excitation energies
/// relative to the lowest state.
void finalize_spectrum(LabeledSpectrum& s);

/// Nearest S with S(S+1) to the given <S^2>, or nullopt when the distance
/// exceeds `tolerance`.
std::optional<int> spin_from_s2(double s2, double tolerance);

}  // namespace efqse

#include "efqse/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "efqse/chemio.hpp"
#include "efqse/errors.hpp"

namespace efqse {

std::string state_label(int ordinal, int spin, Irrep irrep) {
  return std::to_string(ordinal) + "^" + std::to_string(2 * spin + 1) + std::string(irrep_name(irrep));
}

std::string LabeledState::label() const { return state_label(ordinal, spin, irrep); }

const LabeledState& LabeledSpectrum::ground() const {
  if (states.empty()) throw ContractViolation("empty spectrum has no ground state");
  return states.front();
}

const LabeledState* LabeledSpectrum::find(const std::string& label) const {
  for (const auto& s : states)
    if (s.label() == label) return &s;
  return nullptr;
}

const LabeledState* LabeledSpectrum::find(int spin, Irrep irrep, int ordinal) const {
  for (const auto& s : states)
    if (s.spin == spin && s.irrep == irrep && s.ordinal == ordinal) return &s;
  return nullptr;
}

void finalize_spectrum(LabeledSpectrum& s) {
  std::stable_sort(s.states.begin(), s.states.end(), [](const LabeledState& a, const LabeledState& b) {
    if (std::abs(a.energy - b.energy) > 1e-9) return a.energy < b.energy;
    if (a.spin != b.spin) return a.spin < b.spin;
    return static_cast<int>(a.irrep) < static_cast<int>(b.irrep);
  });
  std::map<std::pair<int, int>, int> counter;
  for (auto& st : s.states) st.ordinal = ++counter[{st.spin, static_cast<int>(st.irrep)}];
  if (s.states.empty()) return;
  const double e0 = s.states.front().energy;
  for (auto& st : s.states) st.excitation_ev = (st.energy - e0) * kHartreeToEv;
}

std::optional<int> spin_from_s2(double s2, double tolerance) {
  // Only integer S arises for the even-electron, Sz = 0 sectors handled here.
  const double s = 0.5 * (std::sqrt(1.0 + 4.0 * std::max(0.0, s2)) - 1.0);
  const int nearest = static_cast<int>(std::lround(s));
  if (std::abs(s2 - nearest * (nearest + 1.0)) > tolerance) return std::nullopt;
  return nearest;
}

}  // namespace efqse

#include "efqse/irrep.hpp"

#include <cctype>

#include "efqse/errors.hpp"

namespace efqse {

std::string_view irrep_name(Irrep r) {
  switch (r) {
    case Irrep::A1: return "A1";
    case Irrep::A2: return "A2";
    case Irrep::B1: return "B1";
    case Irrep::B2: return "B2";
  }
  return "?";
}

Irrep parse_irrep(std::string_view label) {
  std::string up;
  for (char c : label) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (up == "A1") return Irrep::A1;
  if (up == "A2") return Irrep::A2;
  if (up == "B1") return Irrep::B1;
  if (up == "B2") return Irrep::B2;
  throw ParseError("unknown C2v irrep label '" + std::string(label) + "'");
}

OrbsymConvention OrbsymConvention::standard() {
  return {{Irrep::A1, Irrep::A2, Irrep::B1, Irrep::B2}};
}

OrbsymConvention OrbsymConvention::molpro() {
  return {{Irrep::A1, Irrep::B1, Irrep::B2, Irrep::A2}};
}

OrbsymConvention OrbsymConvention::by_name(std::string_view name) {
  if (name == "standard") return standard();
  if (name == "molpro") return molpro();
  throw ConfigError("unknown ORBSYM convention '" + std::string(name) +
                    "' (expected 'standard' or 'molpro')");
}

Irrep OrbsymConvention::to_irrep(int orbsym) const {
  if (orbsym < 1 || orbsym > 4) {
    throw BoundsError("ORBSYM value " + std::to_string(orbsym) + " outside 1..4 for C2v");
  }
  return table[static_cast<std::size_t>(orbsym - 1)];
}

int OrbsymConvention::to_orbsym(Irrep r) const {
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i] == r) return static_cast<int>(i) + 1;
  }
  return 1;
}

}  // namespace efqse

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace efqse {

/// Irreducible representations of C2v. The underlying values form the
/// group Z2 x Z2 under XOR, so the direct product is a bitwise xor.
enum class Irrep : std::uint8_t { A1 = 0, B1 = 1, B2 = 2, A2 = 3 };

inline constexpr std::array<Irrep, 4> kAllIrreps = {Irrep::A1, Irrep::A2, Irrep::B1,
                                                    Irrep::B2};

constexpr Irrep irrep_product(Irrep a, Irrep b) {
  return static_cast<Irrep>(static_cast<std::uint8_t>(a) ^ static_cast<std::uint8_t>(b));
}

std::string_view irrep_name(Irrep r);

/// Accepts "A1", "a1", "B2", ... Throws ParseError on anything else.
Irrep parse_irrep(std::string_view label);

/// Integer ORBSYM code to irrep. Index 0 of the table is ORBSYM=1.
struct OrbsymConvention {
  std::array<Irrep, 4> table;

  /// 1->A1, 2->A2, 3->B1, 4->B2.
  static OrbsymConvention standard();
  /// MOLPRO / PySCF ordering: 1->A1, 2->B1, 3->B2, 4->A2.
  static OrbsymConvention molpro();
  static OrbsymConvention by_name(std::string_view name);

  Irrep to_irrep(int orbsym) const;
  int to_orbsym(Irrep r) const;
};

}  // namespace efqse

#include <array>
#include <string_view>

#include "chemkd/error.hpp"
#include "chemkd/molgraph.hpp"

namespace chemkd {
namespace {

constexpr std::array<std::string_view, 119> kSymbols = {
    "",   "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na",
    "Mg", "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",
    "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br",
    "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag",
    "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr",
    "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu",
    "Hf", "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi",
    "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am",
    "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh",
    "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
};

constexpr std::array<std::uint8_t, 10> kOrganicSubset = {5, 6, 7, 8, 15, 16, 9, 17, 35, 53};

}  // namespace

std::optional<std::uint8_t> atomic_number(std::string_view symbol) {
  for (std::size_t z = 1; z < kSymbols.size(); ++z) {
    if (kSymbols[z] == symbol) return static_cast<std::uint8_t>(z);
  }
  return std::nullopt;
}

std::string_view element_symbol(std::uint8_t z) {
  if (z == 0 || z >= kSymbols.size()) {
    throw InvalidArgument("atomic number out of range: " + std::to_string(z));
  }
  return kSymbols[z];
}

bool has_aromatic_form(std::uint8_t z) {
  return z == 5 || z == 6 || z == 7 || z == 8 || z == 15 || z == 16 || z == 33 || z == 34;
}

std::span<const std::uint8_t> organic_subset() { return kOrganicSubset; }

std::string_view bond_order_name(BondOrder order) {
  switch (order) {
    case BondOrder::kSingle: return "single";
    case BondOrder::kDouble: return "double";
    case BondOrder::kTriple: return "triple";
    case BondOrder::kAromatic: return "aromatic";
  }
  return "?";
}

}  // namespace chemkd

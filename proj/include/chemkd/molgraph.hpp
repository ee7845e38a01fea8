#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chemkd {

/// Bond order labels. The numeric values double as the hashing code used by
/// the circular fingerprints.
enum class BondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

std::string_view bond_order_name(BondOrder order);

/// Atomic number for a chemical symbol ("C", "Cl", ...); std::nullopt if unknown.
std::optional<std::uint8_t> atomic_number(std::string_view symbol);

/// Chemical symbol for an atomic number in [1, 118].
std::string_view element_symbol(std::uint8_t atomic_number);

/// True for the elements with a lowercase aromatic SMILES form (b c n o p s, plus se and as).
bool has_aromatic_form(std::uint8_t atomic_number);

/// The SMILES organic subset B, C, N, O, P, S, F, Cl, Br, I in that order.
std::span<const std::uint8_t> organic_subset();

struct Atom {
  std::uint8_t element = 6;
  std::int8_t charge = 0;
  bool aromatic = false;

  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Bond {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  BondOrder order = BondOrder::kSingle;

  friend bool operator==(const Bond&, const Bond&) = default;
};

struct AdjacentAtom {
  std::uint32_t atom;
  BondOrder order;
};

/// Connected, loop-free labeled graph of heavy atoms.
///
/// The constructor enforces every invariant (at least one atom, endpoints in
/// range, no self loops, no duplicate bonds, connected) and throws DataError
/// otherwise, so every MolecularGraph value in the program is valid.
class MolecularGraph {
 public:
  MolecularGraph(std::vector<Atom> atoms, std::vector<Bond> bonds,
                 std::string source = {});

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Bond>& bonds() const { return bonds_; }
  const Atom& atom(std::size_t i) const { return atoms_.at(i); }
  std::size_t atom_count() const { return atoms_.size(); }
  std::size_t bond_count() const { return bonds_.size(); }

  /// Original SMILES text when the graph came from the parser.
  const std::string& source() const { return source_; }

  std::span<const AdjacentAtom> neighbors(std::size_t i) const;
  std::size_t degree(std::size_t i) const { return neighbors(i).size(); }

  /// Order of the bond between i and j, if any.
  std::optional<BondOrder> bond_between(std::size_t i, std::size_t j) const;

  /// Number of independent cycles: bonds - atoms + 1.
  std::size_t cycle_rank() const { return bonds_.size() + 1 - atoms_.size(); }

  /// Structural equality: same atoms and bonds in the same order. The source
  /// text is ignored.
  friend bool operator==(const MolecularGraph& x, const MolecularGraph& y) {
    return x.atoms_ == y.atoms_ && x.bonds_ == y.bonds_;
  }

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::string source_;
  std::vector<std::size_t> adjacency_offsets_;
  std::vector<AdjacentAtom> adjacency_;
};

}  // namespace chemkd

#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "chemkd/error.hpp"
#include "chemkd/molgraph.hpp"

namespace chemkd {

enum class SmilesErrorKind {
  kEmpty,
  kSyntax,
  kUnbalancedParenthesis,
  kUnmatchedRingClosure,
  kUnknownElement,
  kUnsupportedFeature,
  kDisconnected,
  kInvalidBond,
};

std::string_view smiles_error_kind_name(SmilesErrorKind kind);

/// Parse failure with the offending byte offset.
class SmilesError : public DataError {
 public:
  SmilesError(SmilesErrorKind kind, std::size_t position, const std::string& detail);

  SmilesErrorKind kind() const { return kind_; }
  std::size_t position() const { return position_; }

 private:
  SmilesErrorKind kind_;
  std::size_t position_;
};

/// Parses the supported SMILES subset into a heavy-atom graph.
///
/// Supported: organic-subset atoms (B C N O P S F Cl Br I), aromatic b c n o p s,
/// bracket atoms with element, optional H count (discarded) and charge,
/// branches, ring closures (digits and %nn) and the bond symbols - = # :.
/// Stereo marks, isotopes, atom classes, explicit hydrogen atoms, wildcards
/// and '.' disconnection are rejected. Aromatic atoms joined without a bond
/// symbol get an aromatic bond; everything else defaults to single.
MolecularGraph parse_smiles(std::string_view text);

/// Writes a SMILES string in the same subset. parse_smiles of the result is
/// isomorphic to the input (atoms come back in depth-first order).
std::string write_smiles(const MolecularGraph& graph);

}  // namespace chemkd

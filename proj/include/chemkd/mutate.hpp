#pragma once

#include <cstdint>
#include <string_view>

#include "chemkd/molgraph.hpp"

namespace chemkd {

/// The three atom-level edits that produce a graph at edit distance one
/// (node plus its edge for addition and deletion). None of them changes the
/// cycle rank or disconnects the graph.
enum class MutationKind { kAddition, kSubstitution, kDeletion };

std::string_view mutation_kind_name(MutationKind kind);

/// Changes the element of one atom. Throws InvalidArgument for a bad index or
/// a no-op substitution. An aromatic atom stays aromatic only if the new
/// element has an aromatic form.
MolecularGraph mutate_substitution(const MolecularGraph& graph, std::size_t atom_index,
                                   std::uint8_t new_element);

/// Appends a new atom bonded to `attach_index`. `order` must be single, double or triple.
MolecularGraph mutate_addition(const MolecularGraph& graph, std::size_t attach_index,
                               std::uint8_t new_element, BondOrder order = BondOrder::kSingle);

/// Removes a degree-1 atom and its bond. Remaining atoms keep their relative order.
MolecularGraph mutate_deletion(const MolecularGraph& graph, std::size_t atom_index);

struct Mutant {
  MolecularGraph graph;
  MutationKind kind;
};

/// Applies one feasible edit drawn from a deterministic stream seeded by `seed`.
///
/// The kind is uniform over the feasible kinds (deletion needs a degree-1
/// atom), the target atom is uniform, additions use a single bond and a
/// uniform organic-subset element, and substitutions draw uniformly from the
/// organic subset minus the current element. The result depends only on
/// (graph, seed), on every platform.
Mutant random_mutant(const MolecularGraph& graph, std::uint64_t seed);

}  // namespace chemkd

#include "chemkd/mutate.hpp"

#include <random>
#include <vector>

#include "chemkd/error.hpp"
#include "chemkd/random.hpp"

namespace chemkd {

std::string_view mutation_kind_name(MutationKind kind) {
  switch (kind) {
    case MutationKind::kAddition: return "addition";
    case MutationKind::kSubstitution: return "substitution";
    case MutationKind::kDeletion: return "deletion";
  }
  return "?";
}

MolecularGraph mutate_substitution(const MolecularGraph& graph, std::size_t atom_index,
                                   std::uint8_t new_element) {
  if (atom_index >= graph.atom_count()) throw InvalidArgument("substitution index out of range");
  if (new_element == 0 || new_element > 118) throw InvalidArgument("invalid element for substitution");
  std::vector<Atom> atoms = graph.atoms();
  Atom& atom = atoms[atom_index];
  if (atom.element == new_element) {
    throw InvalidArgument("no-op substitution: atom " + std::to_string(atom_index) + " is already " +
                          std::string(element_symbol(new_element)));
  }
  atom.element = new_element;
  atom.aromatic = atom.aromatic && has_aromatic_form(new_element);
  return MolecularGraph(std::move(atoms), graph.bonds());
}

MolecularGraph mutate_addition(const MolecularGraph& graph, std::size_t attach_index,
                               std::uint8_t new_element, BondOrder order) {
  if (attach_index >= graph.atom_count()) throw InvalidArgument("addition index out of range");
  if (new_element == 0 || new_element > 118) throw InvalidArgument("invalid element for addition");
  if (order == BondOrder::kAromatic) throw InvalidArgument("addition bond must be single, double or triple");
  std::vector<Atom> atoms = graph.atoms();
  std::vector<Bond> bonds = graph.bonds();
  const auto added = static_cast<std::uint32_t>(atoms.size());
  atoms.push_back({new_element, 0, false});
  bonds.push_back({static_cast<std::uint32_t>(attach_index), added, order});
  return MolecularGraph(std::move(atoms), std::move(bonds));
}

MolecularGraph mutate_deletion(const MolecularGraph& graph, std::size_t atom_index) {
  if (atom_index >= graph.atom_count()) throw InvalidArgument("deletion index out of range");
  if (graph.atom_count() < 2) throw InvalidArgument("deletion would leave an empty graph");
  if (graph.degree(atom_index) != 1) {
    throw InvalidArgument("atom " + std::to_string(atom_index) + " is not singly-attached");
  }
  std::vector<Atom> atoms;
  atoms.reserve(graph.atom_count() - 1);
  for (std::size_t i = 0; i < graph.atom_count(); ++i) {
    if (i != atom_index) atoms.push_back(graph.atom(i));
  }
  const auto removed = static_cast<std::uint32_t>(atom_index);
  auto remap = [removed](std::uint32_t i) { return i > removed ? i - 1 : i; };
  std::vector<Bond> bonds;
  bonds.reserve(graph.bond_count() - 1);
  for (const Bond& bond : graph.bonds()) {
    if (bond.a == removed || bond.b == removed) continue;
    bonds.push_back({remap(bond.a), remap(bond.b), bond.order});
  }
  return MolecularGraph(std::move(atoms), std::move(bonds));
}

Mutant random_mutant(const MolecularGraph& graph, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto organic = organic_subset();

  std::vector<std::size_t> leaves;
  if (graph.atom_count() >= 2) {
    for (std::size_t i = 0; i < graph.atom_count(); ++i) {
      if (graph.degree(i) == 1) leaves.push_back(i);
    }
  }
  std::vector<MutationKind> kinds{MutationKind::kAddition, MutationKind::kSubstitution};
  if (!leaves.empty()) kinds.push_back(MutationKind::kDeletion);

  switch (kinds[uniform_index(rng, kinds.size())]) {
    case MutationKind::kAddition: {
      const std::size_t attach = uniform_index(rng, graph.atom_count());
      const std::uint8_t element = organic[uniform_index(rng, organic.size())];
      return {mutate_addition(graph, attach, element, BondOrder::kSingle), MutationKind::kAddition};
    }
    case MutationKind::kSubstitution: {
      const std::size_t index = uniform_index(rng, graph.atom_count());
      std::vector<std::uint8_t> choices;
      for (std::uint8_t z : organic) {
        if (z != graph.atom(index).element) choices.push_back(z);
      }
      const std::uint8_t element = choices[uniform_index(rng, choices.size())];
      return {mutate_substitution(graph, index, element), MutationKind::kSubstitution};
    }
    case MutationKind::kDeletion: {
      const std::size_t index = leaves[uniform_index(rng, leaves.size())];
      return {mutate_deletion(graph, index), MutationKind::kDeletion};
    }
  }
  throw InvalidArgument("unreachable mutation kind");
}

}  // namespace chemkd

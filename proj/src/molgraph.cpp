#include "chemkd/molgraph.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "chemkd/error.hpp"

namespace chemkd {

MolecularGraph::MolecularGraph(std::vector<Atom> atoms, std::vector<Bond> bonds,
                               std::string source)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)), source_(std::move(source)) {
  const std::size_t n = atoms_.size();
  if (n == 0) throw DataError("molecular graph has no atoms");
  for (const Atom& atom : atoms_) {
    if (atom.element == 0 || atom.element > 118) {
      throw DataError("atom has invalid atomic number " + std::to_string(atom.element));
    }
    if (atom.aromatic && !has_aromatic_form(atom.element)) {
      throw DataError("element " + std::string(element_symbol(atom.element)) +
                      " cannot be aromatic");
    }
  }

  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  std::vector<std::size_t> degree(n, 0);
  for (const Bond& bond : bonds_) {
    if (bond.a >= n || bond.b >= n) throw DataError("bond endpoint out of range");
    if (bond.a == bond.b) throw DataError("self-loop bond on atom " + std::to_string(bond.a));
    const auto key = std::minmax(bond.a, bond.b);
    if (!seen.insert(key).second) {
      throw DataError("duplicate bond between atoms " + std::to_string(key.first) + " and " +
                      std::to_string(key.second));
    }
    ++degree[bond.a];
    ++degree[bond.b];
  }

  adjacency_offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) adjacency_offsets_[i + 1] = adjacency_offsets_[i] + degree[i];
  adjacency_.resize(adjacency_offsets_[n]);
  std::vector<std::size_t> fill(adjacency_offsets_.begin(), adjacency_offsets_.end() - 1);
  for (const Bond& bond : bonds_) {
    adjacency_[fill[bond.a]++] = {bond.b, bond.order};
    adjacency_[fill[bond.b]++] = {bond.a, bond.order};
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(adjacency_offsets_[i]),
              adjacency_.begin() + static_cast<std::ptrdiff_t>(adjacency_offsets_[i + 1]),
              [](const AdjacentAtom& x, const AdjacentAtom& y) { return x.atom < y.atom; });
  }

  // Connectivity by iterative flood fill.
  std::vector<bool> reached(n, false);
  std::vector<std::uint32_t> stack{0};
  reached[0] = true;
  std::size_t reached_count = 1;
  while (!stack.empty()) {
    const std::uint32_t u = stack.back();
    stack.pop_back();
    for (const AdjacentAtom& nb : neighbors(u)) {
      if (!reached[nb.atom]) {
        reached[nb.atom] = true;
        ++reached_count;
        stack.push_back(nb.atom);
      }
    }
  }
  if (reached_count != n) throw DataError("molecular graph is disconnected");
}

std::span<const AdjacentAtom> MolecularGraph::neighbors(std::size_t i) const {
  if (i >= atoms_.size()) throw InvalidArgument("atom index out of range");
  return {adjacency_.data() + adjacency_offsets_[i],
          adjacency_offsets_[i + 1] - adjacency_offsets_[i]};
}

std::optional<BondOrder> MolecularGraph::bond_between(std::size_t i, std::size_t j) const {
  const auto nbs = neighbors(i);
  const auto it = std::lower_bound(nbs.begin(), nbs.end(), j,
                                   [](const AdjacentAtom& a, std::size_t v) { return a.atom < v; });
  if (it != nbs.end() && it->atom == j) return it->order;
  return std::nullopt;
}

}  // namespace chemkd

#include <algorithm>
#include <string>
#include <vector>

#include "chemkd/smiles.hpp"

namespace chemkd {
namespace {

constexpr std::uint32_t kNone = ~std::uint32_t{0};

std::string atom_token(const Atom& atom) {
  const std::string_view symbol = element_symbol(atom.element);
  std::string name(symbol);
  if (atom.aromatic) name[0] = static_cast<char>(name[0] - 'A' + 'a');

  const bool organic = std::find(organic_subset().begin(), organic_subset().end(), atom.element) !=
                       organic_subset().end();
  const bool bare_aromatic = atom.aromatic && name.size() == 1;
  if (atom.charge == 0 && ((organic && !atom.aromatic) || bare_aromatic)) return name;

  std::string token = "[" + name;
  if (atom.charge != 0) {
    token += atom.charge > 0 ? '+' : '-';
    const int magnitude = atom.charge > 0 ? atom.charge : -atom.charge;
    if (magnitude > 1) token += std::to_string(magnitude);
  }
  token += ']';
  return token;
}

// Symbol needed so that the parser's implicit rule reproduces `order`.
std::string_view bond_token(const MolecularGraph& g, std::uint32_t a, std::uint32_t b,
                            BondOrder order) {
  const bool both_aromatic = g.atom(a).aromatic && g.atom(b).aromatic;
  const BondOrder implicit = both_aromatic ? BondOrder::kAromatic : BondOrder::kSingle;
  if (order == implicit) return "";
  switch (order) {
    case BondOrder::kSingle: return "-";
    case BondOrder::kDouble: return "=";
    case BondOrder::kTriple: return "#";
    case BondOrder::kAromatic: return ":";
  }
  return "";
}

std::string ring_label(int number) {
  if (number < 10) return std::to_string(number);
  if (number > 99) throw InvalidArgument("more than 99 simultaneously open ring bonds");
  return "%" + std::to_string(number);
}

}  // namespace

std::string write_smiles(const MolecularGraph& g) {
  const std::size_t n = g.atom_count();

  // Pass 1: depth-first spanning tree from atom 0, neighbors in ascending order.
  std::vector<std::uint32_t> preorder(n, kNone);
  std::vector<std::uint32_t> parent(n, kNone);
  std::vector<std::vector<std::uint32_t>> children(n);
  {
    std::uint32_t counter = 0;
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
    preorder[0] = counter++;
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      const auto nbs = g.neighbors(u);
      if (next == nbs.size()) {
        stack.pop_back();
        continue;
      }
      const std::uint32_t v = nbs[next++].atom;
      if (preorder[v] == kNone) {
        preorder[v] = counter++;
        parent[v] = u;
        children[u].push_back(v);
        stack.emplace_back(v, 0);
      }
    }
  }

  // Non-tree edges become ring closures: opened at the endpoint written first.
  struct RingEdge {
    std::uint32_t other;
    BondOrder order;
    std::size_t id;
  };
  std::vector<std::vector<RingEdge>> opens(n), closes(n);
  std::size_t ring_count = 0;
  for (const Bond& bond : g.bonds()) {
    if (parent[bond.a] == bond.b || parent[bond.b] == bond.a) continue;
    const auto [first, second] =
        preorder[bond.a] < preorder[bond.b] ? std::pair{bond.a, bond.b} : std::pair{bond.b, bond.a};
    opens[first].push_back({second, bond.order, ring_count});
    closes[second].push_back({first, bond.order, ring_count});
    ++ring_count;
  }
  for (auto& list : opens) {
    std::sort(list.begin(), list.end(),
              [&](const RingEdge& x, const RingEdge& y) { return preorder[x.other] < preorder[y.other]; });
  }
  for (auto& list : closes) {
    std::sort(list.begin(), list.end(),
              [&](const RingEdge& x, const RingEdge& y) { return preorder[x.other] < preorder[y.other]; });
  }

  // Pass 2: emit with an explicit task stack so long chains cannot exhaust the call stack.
  struct Task {
    std::uint32_t atom;  // kNone for literal text
    std::string text;
  };
  std::vector<int> label_of(ring_count, 0);
  std::vector<bool> label_in_use(100, false);
  std::string out;
  std::vector<Task> tasks{{0, {}}};
  while (!tasks.empty()) {
    Task task = std::move(tasks.back());
    tasks.pop_back();
    if (task.atom == kNone) {
      out += task.text;
      continue;
    }
    const std::uint32_t u = task.atom;
    out += atom_token(g.atom(u));

    std::vector<int> released;
    for (const RingEdge& edge : closes[u]) {
      out += ring_label(label_of[edge.id]);
      released.push_back(label_of[edge.id]);
    }
    for (const RingEdge& edge : opens[u]) {
      int label = 1;
      while (label < 100 && label_in_use[label]) ++label;
      if (label == 100) throw InvalidArgument("more than 99 simultaneously open ring bonds");
      label_in_use[label] = true;
      label_of[edge.id] = label;
      out += bond_token(g, u, edge.other, edge.order);
      out += ring_label(label);
    }
    for (int label : released) label_in_use[label] = false;

    const auto& kids = children[u];
    // Push in reverse so the first child is emitted first; all but the last are branches.
    for (std::size_t i = kids.size(); i-- > 0;) {
      const std::uint32_t v = kids[i];
      const std::string bond(bond_token(g, u, v, *g.bond_between(u, v)));
      const bool branch = i + 1 < kids.size();
      if (branch) tasks.push_back({kNone, ")"});
      tasks.push_back({v, {}});
      tasks.push_back({kNone, branch ? "(" + bond : bond});
    }
  }
  return out;
}

}  // namespace chemkd

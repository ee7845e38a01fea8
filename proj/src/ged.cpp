#include <algorithm>
#include <array>
#include <bit>
#include <tuple>

#include "chemkd/error.hpp"
#include "chemkd/ged.hpp"

namespace chemkd {

namespace {

// Bond orders are 1..4, so a count array indexed by order covers every label.
using OrderCounts = std::array<int, 5>;

OrderCounts incident_orders(const MolecularGraph& g, std::size_t i) {
  OrderCounts counts{};
  for (const AdjacentAtom& n : g.neighbors(i)) ++counts[static_cast<std::size_t>(n.order)];
  return counts;
}

// Optimal unit-cost matching of two label multisets: pair equal labels first,
// then substitute or insert/delete the rest.
int multiset_edit_cost(const OrderCounts& a, const OrderCounts& b, int size_a, int size_b) {
  int shared = 0;
  for (std::size_t l = 0; l < a.size(); ++l) shared += std::min(a[l], b[l]);
  return std::max(size_a, size_b) - shared;
}

// Orders graph pairs so approx_ged sees the same orientation both ways round.
bool graph_less(const MolecularGraph& a, const MolecularGraph& b) {
  const auto size_a = std::make_tuple(a.atom_count(), a.bond_count());
  const auto size_b = std::make_tuple(b.atom_count(), b.bond_count());
  if (size_a != size_b) return size_a < size_b;
  for (std::size_t i = 0; i < a.atom_count(); ++i) {
    const Atom& x = a.atoms()[i];
    const Atom& y = b.atoms()[i];
    const auto kx = std::make_tuple(x.element, x.charge, x.aromatic);
    const auto ky = std::make_tuple(y.element, y.charge, y.aromatic);
    if (kx != ky) return kx < ky;
  }
  for (std::size_t i = 0; i < a.bond_count(); ++i) {
    const Bond& x = a.bonds()[i];
    const Bond& y = b.bonds()[i];
    const auto kx = std::make_tuple(x.a, x.b, static_cast<int>(x.order));
    const auto ky = std::make_tuple(y.a, y.b, static_cast<int>(y.order));
    if (kx != ky) return kx < ky;
  }
  return false;
}

}  // namespace

std::vector<double> ged_cost_matrix(const MolecularGraph& g1, const MolecularGraph& g2) {
  const std::size_t n1 = g1.atom_count();
  const std::size_t n2 = g2.atom_count();
  const std::size_t m = n1 + n2;
  std::vector<double> c(m * m, kForbidden);
  std::vector<OrderCounts> orders2(n2);
  for (std::size_t j = 0; j < n2; ++j) orders2[j] = incident_orders(g2, j);
  for (std::size_t i = 0; i < n1; ++i) {
    const OrderCounts orders1 = incident_orders(g1, i);
    const int deg1 = static_cast<int>(g1.degree(i));
    for (std::size_t j = 0; j < n2; ++j) {
      const int label = g1.atoms()[i].element != g2.atoms()[j].element ? 1 : 0;
      c[i * m + j] = label + multiset_edit_cost(orders1, orders2[j], deg1, static_cast<int>(g2.degree(j)));
    }
    c[i * m + n2 + i] = 1.0 + deg1;
  }
  for (std::size_t j = 0; j < n2; ++j) c[(n1 + j) * m + j] = 1.0 + static_cast<double>(g2.degree(j));
  for (std::size_t i = n1; i < m; ++i) {
    for (std::size_t j = n2; j < m; ++j) c[i * m + j] = 0.0;
  }
  return c;
}

int induced_edit_cost(const MolecularGraph& g1, const MolecularGraph& g2, std::span<const int> mapping) {
  if (mapping.size() != g1.atom_count()) throw InvalidArgument("node map has the wrong length");
  std::vector<char> image_used(g2.atom_count(), 0);
  int cost = 0;
  for (std::size_t i = 0; i < mapping.size(); ++i) {
    const int j = mapping[i];
    if (j < 0) {
      ++cost;
      continue;
    }
    if (static_cast<std::size_t>(j) >= g2.atom_count() || image_used[j]) {
      throw InvalidArgument("node map is not injective");
    }
    image_used[j] = 1;
    if (g1.atoms()[i].element != g2.atoms()[j].element) ++cost;
  }
  for (char used : image_used) {
    if (!used) ++cost;
  }
  int matched_edges = 0;
  for (const Bond& b : g1.bonds()) {
    const int ja = mapping[b.a];
    const int jb = mapping[b.b];
    const auto image = (ja < 0 || jb < 0) ? std::nullopt : g2.bond_between(ja, jb);
    if (!image) {
      ++cost;  // deleted
      continue;
    }
    ++matched_edges;
    if (*image != b.order) ++cost;
  }
  cost += static_cast<int>(g2.bond_count()) - matched_edges;  // inserted
  return cost;
}

double approx_ged(const MolecularGraph& a, const MolecularGraph& b) {
  const bool swap = graph_less(b, a);
  const MolecularGraph& g1 = swap ? b : a;
  const MolecularGraph& g2 = swap ? a : b;
  const std::size_t n1 = g1.atom_count();
  const std::size_t n2 = g2.atom_count();
  const std::size_t m = n1 + n2;
  std::vector<double> costs = ged_cost_matrix(g1, g2);

  // Among equal-cost node maps prefer substituting atom i by atom i. The
  // penalty is a power of two so sums stay exact, and all penalties together
  // are below one unit, so a cheaper map always wins.
  const double epsilon = 1.0 / static_cast<double>(std::bit_ceil(4 * m));
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      if (i != j) costs[i * m + j] += epsilon;
    }
  }
  const Assignment assignment = assignment_solve(costs, m);
  std::vector<int> mapping(n1, -1);
  for (std::size_t i = 0; i < n1; ++i) {
    if (assignment.row_to_col[i] < n2) mapping[i] = static_cast<int>(assignment.row_to_col[i]);
  }
  return induced_edit_cost(g1, g2, mapping);
}

}  // namespace chemkd

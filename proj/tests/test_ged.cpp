#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "chemkd/error.hpp"
#include "chemkd/ged.hpp"
#include "chemkd/mutate.hpp"
#include "chemkd/random.hpp"
#include "chemkd/smiles.hpp"

using namespace chemkd;

namespace {

double brute_force_assignment(const std::vector<double>& c, std::size_t m) {
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  double best = kForbidden;
  do {
    double total = 0;
    for (std::size_t i = 0; i < m; ++i) total += c[i * m + perm[i]];
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Connected random graph: random tree plus a few extra bonds.
MolecularGraph random_graph(std::mt19937_64& rng, std::size_t max_atoms) {
  static const std::uint8_t elements[] = {6, 6, 6, 7, 8};
  static const BondOrder orders[] = {BondOrder::kSingle, BondOrder::kSingle, BondOrder::kDouble, BondOrder::kAromatic};
  const std::size_t n = 1 + uniform_index(rng, max_atoms);
  std::vector<Atom> atoms(n);
  for (auto& a : atoms) a.element = elements[uniform_index(rng, 5)];
  std::vector<Bond> bonds;
  for (std::uint32_t i = 1; i < n; ++i) {
    bonds.push_back({static_cast<std::uint32_t>(uniform_index(rng, i)), i, orders[uniform_index(rng, 4)]});
  }
  const std::size_t extra = uniform_index(rng, 3);
  for (std::size_t e = 0; e < extra && n >= 3; ++e) {
    const auto a = static_cast<std::uint32_t>(uniform_index(rng, n));
    const auto b = static_cast<std::uint32_t>(uniform_index(rng, n));
    const bool exists = std::any_of(bonds.begin(), bonds.end(), [&](const Bond& x) {
      return (x.a == a && x.b == b) || (x.a == b && x.b == a);
    });
    if (a != b && !exists) bonds.push_back({a, b, orders[uniform_index(rng, 4)]});
  }
  return MolecularGraph(std::move(atoms), std::move(bonds));
}

MolecularGraph relabel(const MolecularGraph& g, std::mt19937_64& rng) {
  std::vector<std::uint32_t> perm(g.atom_count());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Atom> atoms(g.atom_count());
  for (std::size_t i = 0; i < perm.size(); ++i) atoms[perm[i]] = g.atom(i);
  std::vector<Bond> bonds;
  for (const auto& b : g.bonds()) bonds.push_back({perm[b.b], perm[b.a], b.order});
  std::shuffle(bonds.begin(), bonds.end(), rng);
  return MolecularGraph(std::move(atoms), std::move(bonds));
}

}  // namespace

TEST(Assignment, SmallExamples) {
  auto a = assignment_solve(std::vector<double>{0, 1, 1, 0}, 2);
  EXPECT_EQ(a.total, 0.0);
  EXPECT_EQ(a.row_to_col, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(assignment_solve(std::vector<double>{1, 2, 2, 1}, 2).total, 2.0);
  EXPECT_EQ(assignment_solve(std::vector<double>{5}, 1).total, 5.0);
}

TEST(Assignment, MatchesExhaustivePermutationOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 1 + trial % 6;
    std::vector<double> c(m * m);
    for (auto& v : c) v = static_cast<double>(rng() % 10);
    if (trial % 2) {
      // forbid a few off-diagonal cells; the diagonal stays feasible
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          if (i != j && rng() % 3 == 0) c[i * m + j] = kForbidden;
        }
      }
    }
    const auto got = assignment_solve(c, m);
    EXPECT_EQ(got.total, brute_force_assignment(c, m));
    double check = 0;
    std::vector<bool> used(m, false);
    for (std::size_t i = 0; i < m; ++i) {
      ASSERT_FALSE(used[got.row_to_col[i]]);
      used[got.row_to_col[i]] = true;
      check += c[i * m + got.row_to_col[i]];
    }
    EXPECT_EQ(check, got.total);
  }
}

TEST(Assignment, Errors) {
  EXPECT_THROW(assignment_solve(std::vector<double>{1, 2, 3}, 2), InvalidArgument);
  EXPECT_THROW(assignment_solve(std::vector<double>{kForbidden, kForbidden, 1, 1}, 2), InvalidArgument);
  EXPECT_THROW(assignment_solve(std::vector<double>{kForbidden, 1, kForbidden, 1}, 2), InvalidArgument);
  EXPECT_THROW(assignment_solve(std::vector<double>{-1, 0, 0, 0}, 2), InvalidArgument);
  // feasible rows and columns but no perfect matching
  EXPECT_THROW(assignment_solve(std::vector<double>{1, kForbidden, kForbidden, 1, kForbidden, kForbidden, 1, 1, 1}, 3),
               InvalidArgument);
}

TEST(CostMatrix, StructureUnderUnitCosts) {
  const auto g1 = parse_smiles("CO");
  const auto g2 = parse_smiles("C=C");
  const auto c = ged_cost_matrix(g1, g2);
  ASSERT_EQ(c.size(), 16U);
  // C(-) vs C(=): same element, one edge substitution
  EXPECT_EQ(c[0 * 4 + 0], 1.0);
  // O(-) vs C(=): label change plus edge substitution
  EXPECT_EQ(c[1 * 4 + 0], 2.0);
  // deletions on the diagonal: 1 + degree
  EXPECT_EQ(c[0 * 4 + 2], 2.0);
  EXPECT_EQ(c[0 * 4 + 3], kForbidden);
  EXPECT_EQ(c[2 * 4 + 0], 2.0);
  EXPECT_EQ(c[3 * 4 + 0], kForbidden);
  EXPECT_EQ(c[2 * 4 + 3], 0.0);
}

TEST(ExactGed, MatchesNetworkxOracle) {
  // Values from tests/oracles/ged_oracle.py (networkx.graph_edit_distance).
  const struct {
    const char* a;
    const char* b;
    int ged;
  } cases[] = {
      {"C", "CC", 2},        {"CCO", "CCN", 1},           {"CCO", "OCC", 0}, {"C1CC1", "CCC", 1},
      {"CC=O", "CCO", 1},    {"CC(C)C", "CCCC", 2},       {"c1ccccc1", "C1CCCCC1", 6},
      {"CCN", "NCCO", 2},    {"O", "CCC", 5},
  };
  for (const auto& c : cases) {
    const auto a = parse_smiles(c.a);
    const auto b = parse_smiles(c.b);
    EXPECT_EQ(exact_ged_tiny(a, b), c.ged) << c.a << " vs " << c.b;
    EXPECT_EQ(exact_ged_tiny(b, a), c.ged) << c.b << " vs " << c.a;
    EXPECT_GE(approx_ged(a, b), c.ged);
  }
}

TEST(ExactGed, RejectsLargeGraphs) {
  EXPECT_THROW(exact_ged_tiny(parse_smiles("CCCCCCCCC"), parse_smiles("C")), InvalidArgument);
  EXPECT_NO_THROW(exact_ged_tiny(parse_smiles("CCCCCCCCC"), parse_smiles("C"), 9));
}

TEST(ExactGed, RelabelledGraphsAreAtDistanceZero) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    const auto g = random_graph(rng, 7);
    EXPECT_EQ(exact_ged_tiny(g, relabel(g, rng)), 0);
  }
}

TEST(ApproxGed, Examples) {
  const auto ethanol = parse_smiles("CCO");
  EXPECT_EQ(approx_ged(ethanol, ethanol), 0.0);
  EXPECT_EQ(approx_ged(ethanol, parse_smiles("CC")), 2.0);
  EXPECT_EQ(approx_ged(parse_smiles("C"), parse_smiles("CC")), 2.0);
  EXPECT_EQ(approx_ged(ethanol, parse_smiles("CCN")), 1.0);
}

TEST(ApproxGed, UpperBoundSymmetryAndIdentityOnRandomTinyGraphs) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 400; ++t) {
    const auto a = random_graph(rng, 6);
    const auto b = t % 5 == 0 ? relabel(a, rng) : random_graph(rng, 6);
    const double ab = approx_ged(a, b);
    const int exact = exact_ged_tiny(a, b);
    EXPECT_GE(ab, exact);
    EXPECT_EQ(ab, approx_ged(b, a));
    EXPECT_EQ(exact, exact_ged_tiny(b, a));
    EXPECT_EQ(approx_ged(a, a), 0.0);
    if (ab == 0.0) EXPECT_EQ(exact, 0);
  }
}

TEST(ApproxGed, InducedCostOfIdentityMapIsZero) {
  const auto g = parse_smiles("CC(=O)Oc1ccccc1C(=O)O");
  std::vector<int> identity(g.atom_count());
  std::iota(identity.begin(), identity.end(), 0);
  EXPECT_EQ(induced_edit_cost(g, g, identity), 0);
  std::vector<int> drop_all(g.atom_count(), -1);
  EXPECT_EQ(induced_edit_cost(g, g, drop_all), 2 * static_cast<int>(g.atom_count() + g.bond_count()));
}

TEST(ApproxGed, AppendixMutantsHaveKnownExactDistance) {
  std::mt19937_64 rng(4);
  int seen = 0;
  for (int t = 0; t < 300; ++t) {
    const auto anchor = random_graph(rng, 6);
    const Mutant m = random_mutant(anchor, rng());
    const int expected = m.kind == MutationKind::kSubstitution ? 1 : 2;
    EXPECT_EQ(exact_ged_tiny(anchor, m.graph), expected);
    EXPECT_GE(approx_ged(anchor, m.graph), expected);
    ++seen;
  }
  EXPECT_EQ(seen, 300);
}

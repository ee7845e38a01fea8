#include <gtest/gtest.h>

#include <random>

#include "chemkd/fingerprint.hpp"
#include "chemkd/ged.hpp"
#include "chemkd/molgraph.hpp"
#include "chemkd/mutate.hpp"
#include "chemkd/smiles.hpp"

using namespace chemkd;

namespace {

SmilesErrorKind parse_error_kind(const std::string& text) {
  try {
    parse_smiles(text);
  } catch (const SmilesError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "'" << text << "' parsed";
  return SmilesErrorKind::kEmpty;
}

bool connected(const MolecularGraph& g) {
  std::vector<bool> seen(g.atom_count(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (const auto& nb : g.neighbors(u)) {
      if (!seen[nb.atom]) {
        seen[nb.atom] = true;
        ++count;
        stack.push_back(nb.atom);
      }
    }
  }
  return count == g.atom_count();
}

const std::vector<std::string> kSmallCorpus = {
    "C",        "CC",        "CCO",       "C1CC1",      "CC(=O)O",   "c1ccccc1", "C#N",     "O=C=O",
    "CC(C)(C)C", "c1ccncc1", "c1ccoc1",   "C1CCNCC1",   "[NH4+]",    "[O-]C=O",  "ClCCBr",  "FC(F)(F)F",
    "C1=CC=CC1", "c1cc[nH]c1", "C%10CC%10", "CC(=O)[O-]", "OCC(O)CO", "S=C=S",   "CN(C)C=O", "N#CC#N",
};

const std::vector<std::string> kLargeCorpus = {
    "CC(=O)Oc1ccccc1C(=O)O",
    "CN1C=NC2=C1C(=O)N(C(=O)N2C)C",
    "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
    "c1ccc2c(c1)ccc1ccccc12",
    "OC(=O)C1CCCCC1C(=O)O",
    "C1CC2CCC1CC2",
    "CCN(CC)CCOC(=O)c1ccc(N)cc1",
    "Cc1ccc(cc1)S(=O)(=O)N",
};

}  // namespace

TEST(ParseSmiles, Ethanol) {
  const auto g = parse_smiles("CCO");
  ASSERT_EQ(g.atom_count(), 3U);
  EXPECT_EQ(g.atom(0).element, 6);
  EXPECT_EQ(g.atom(1).element, 6);
  EXPECT_EQ(g.atom(2).element, 8);
  ASSERT_EQ(g.bond_count(), 2U);
  EXPECT_EQ(g.bond_between(0, 1), BondOrder::kSingle);
  EXPECT_EQ(g.bond_between(1, 2), BondOrder::kSingle);
  EXPECT_FALSE(g.bond_between(0, 2).has_value());
}

TEST(ParseSmiles, RingClosureMakesTriangle) {
  const auto g = parse_smiles("C1CC1");
  ASSERT_EQ(g.atom_count(), 3U);
  ASSERT_EQ(g.bond_count(), 3U);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(g.degree(i), 2U);
  EXPECT_EQ(g.cycle_rank(), 1U);
}

TEST(ParseSmiles, BondSymbolsAndAromaticity) {
  const auto g = parse_smiles("C=CC#N");
  EXPECT_EQ(g.bond_between(0, 1), BondOrder::kDouble);
  EXPECT_EQ(g.bond_between(1, 2), BondOrder::kSingle);
  EXPECT_EQ(g.bond_between(2, 3), BondOrder::kTriple);

  const auto benzene = parse_smiles("c1ccccc1");
  for (const auto& b : benzene.bonds()) EXPECT_EQ(b.order, BondOrder::kAromatic);
  for (const auto& a : benzene.atoms()) EXPECT_TRUE(a.aromatic);

  // An explicit single bond between aromatic atoms stays single.
  const auto biphenyl = parse_smiles("c1ccccc1-c1ccccc1");
  EXPECT_EQ(biphenyl.bond_between(5, 6), BondOrder::kSingle);
  // Aromatic atom next to an aliphatic one defaults to single.
  EXPECT_EQ(parse_smiles("Cc1ccccc1").bond_between(0, 1), BondOrder::kSingle);
  EXPECT_EQ(parse_smiles("c1cc:cc1").bond_between(2, 3), BondOrder::kAromatic);
}

TEST(ParseSmiles, BracketAtoms) {
  const auto g = parse_smiles("C[N+](C)(C)C");
  EXPECT_EQ(g.atom(1).element, 7);
  EXPECT_EQ(g.atom(1).charge, 1);
  EXPECT_EQ(g.degree(1), 4U);
  EXPECT_EQ(parse_smiles("[O-]C").atom(0).charge, -1);
  EXPECT_EQ(parse_smiles("[Fe+2]").atom(0).charge, 2);
  EXPECT_EQ(parse_smiles("[Fe++]").atom(0).charge, 2);
  // H counts are read and dropped.
  const auto ammonium = parse_smiles("[NH4+]");
  EXPECT_EQ(ammonium.atom_count(), 1U);
  EXPECT_EQ(ammonium.atom(0).charge, 1);
  EXPECT_EQ(parse_smiles("c1cc[nH]c1").atom_count(), 5U);
  EXPECT_EQ(parse_smiles("[Na]").atom(0).element, 11);
}

TEST(ParseSmiles, TwoLetterOrganicAtomsAndPercentRings) {
  const auto g = parse_smiles("ClCBr");
  EXPECT_EQ(g.atom(0).element, 17);
  EXPECT_EQ(g.atom(2).element, 35);
  const auto ring = parse_smiles("C%12CCC%12");
  EXPECT_EQ(ring.bond_count(), 4U);
  EXPECT_EQ(ring.cycle_rank(), 1U);
  // A ring digit can be reused once closed.
  EXPECT_EQ(parse_smiles("C1CC1C1CC1").cycle_rank(), 2U);
}

TEST(ParseSmiles, MalformedInputs) {
  EXPECT_EQ(parse_error_kind("C("), SmilesErrorKind::kUnbalancedParenthesis);
  EXPECT_EQ(parse_error_kind("C)C"), SmilesErrorKind::kUnbalancedParenthesis);
  EXPECT_EQ(parse_error_kind("C1CC"), SmilesErrorKind::kUnmatchedRingClosure);
  EXPECT_EQ(parse_error_kind("Xc"), SmilesErrorKind::kUnknownElement);
  EXPECT_EQ(parse_error_kind("[Xx]"), SmilesErrorKind::kUnknownElement);
  EXPECT_EQ(parse_error_kind(""), SmilesErrorKind::kEmpty);
  EXPECT_EQ(parse_error_kind("C=(C)"), SmilesErrorKind::kSyntax);
  EXPECT_EQ(parse_error_kind("C=="), SmilesErrorKind::kSyntax);
  EXPECT_EQ(parse_error_kind("C11"), SmilesErrorKind::kInvalidBond);
  EXPECT_EQ(parse_error_kind("C12CC12"), SmilesErrorKind::kInvalidBond);
}

TEST(ParseSmiles, UnsupportedFeaturesHaveTheirOwnKind) {
  for (const std::string s : {"F/C=C/F", "F\\C=C\\F", "N[C@@H](C)C(=O)O", "[13CH4]", "[H]", "C$C", "*C"}) {
    EXPECT_EQ(parse_error_kind(s), SmilesErrorKind::kUnsupportedFeature) << s;
  }
  EXPECT_EQ(parse_error_kind("C.C"), SmilesErrorKind::kDisconnected);
  EXPECT_EQ(parse_error_kind("[Na+].[Cl-]"), SmilesErrorKind::kDisconnected);
}

TEST(ParseSmiles, ErrorsAreDataErrors) {
  EXPECT_THROW(parse_smiles("C("), DataError);
  try {
    parse_smiles("CC(C");
    FAIL();
  } catch (const SmilesError& e) {
    EXPECT_NE(std::string(e.what()).find("parenthes"), std::string::npos) << e.what();
  }
}

TEST(ParseSmiles, FuzzNeverCrashes) {
  std::mt19937_64 rng(20240611);
  const std::string alphabet = "CNOSPFIBrcl()[]=#-:+123%0@/\\.Hn*$ 9";
  int parsed = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    std::string text;
    const std::size_t len = rng() % 16;
    for (std::size_t i = 0; i < len; ++i) {
      text.push_back(trial % 4 == 0 ? static_cast<char>(rng() & 0xFF) : alphabet[rng() % alphabet.size()]);
    }
    try {
      const auto g = parse_smiles(text);
      ++parsed;
      ASSERT_GE(g.atom_count(), 1U);
      ASSERT_TRUE(connected(g)) << text;
    } catch (const SmilesError&) {
    }
  }
  EXPECT_GT(parsed, 0);
}

TEST(WriteSmiles, SingleAtom) { EXPECT_EQ(write_smiles(parse_smiles("C")), "C"); }

TEST(WriteSmiles, RoundTripSmallCorpusByExactGed) {
  for (const auto& s : kSmallCorpus) {
    const auto g = parse_smiles(s);
    const std::string text = write_smiles(g);
    const auto back = parse_smiles(text);
    ASSERT_LE(g.atom_count(), 8U) << s;
    EXPECT_EQ(exact_ged_tiny(g, back), 0) << s << " -> " << text;
    EXPECT_EQ(ecfc(g), ecfc(back)) << s << " -> " << text;
  }
}

TEST(WriteSmiles, RoundTripKeepsChargesAndAromaticity) {
  for (const std::string s : {"[O-]C=O", "C[N+](C)(C)C", "c1cc[nH]c1", "[Fe+2]", "c1ccsc1"}) {
    const auto g = parse_smiles(s);
    const auto back = parse_smiles(write_smiles(g));
    ASSERT_EQ(back.atom_count(), g.atom_count());
    EXPECT_EQ(ecfc(g), ecfc(back)) << s;
  }
}

TEST(WriteSmiles, RoundTripLargerMolecules) {
  for (const auto& s : kLargeCorpus) {
    const auto g = parse_smiles(s);
    const auto back = parse_smiles(write_smiles(g));
    EXPECT_EQ(back.atom_count(), g.atom_count()) << s;
    EXPECT_EQ(back.bond_count(), g.bond_count()) << s;
    EXPECT_EQ(ecfc(back), ecfc(g)) << s;
    EXPECT_DOUBLE_EQ(approx_ged(g, back), 0.0) << s;
  }
}

TEST(Mutate, Substitution) {
  const auto g = mutate_substitution(parse_smiles("CCO"), 2, 7);
  EXPECT_EQ(g, parse_smiles("CCN"));
  EXPECT_THROW(mutate_substitution(parse_smiles("C"), 0, 6), InvalidArgument);
  EXPECT_THROW(mutate_substitution(parse_smiles("C"), 3, 7), InvalidArgument);
  const auto ring = mutate_substitution(parse_smiles("C1CC1"), 0, 8);
  EXPECT_EQ(ring.atom(0).element, 8);
  EXPECT_EQ(ring.atom(1).element, 6);
  EXPECT_EQ(ring.bonds(), parse_smiles("C1CC1").bonds());
}

TEST(Mutate, Addition) {
  EXPECT_EQ(mutate_addition(parse_smiles("C"), 0, 6, BondOrder::kSingle), parse_smiles("CC"));
  EXPECT_EQ(mutate_addition(parse_smiles("CC"), 1, 8), parse_smiles("CCO"));
  EXPECT_EQ(mutate_addition(parse_smiles("CC"), 1, 8, BondOrder::kDouble), parse_smiles("CC=O"));
  EXPECT_THROW(mutate_addition(parse_smiles("C"), 1, 6), InvalidArgument);
  EXPECT_THROW(mutate_addition(parse_smiles("C"), 0, 6, BondOrder::kAromatic), InvalidArgument);
}

TEST(Mutate, Deletion) {
  EXPECT_EQ(mutate_deletion(parse_smiles("CCO"), 2), parse_smiles("CC"));
  EXPECT_THROW(mutate_deletion(parse_smiles("C1CC1"), 0), InvalidArgument);
  EXPECT_THROW(mutate_deletion(parse_smiles("C"), 0), InvalidArgument);
  // Removing the first atom renumbers the rest in order.
  EXPECT_EQ(mutate_deletion(parse_smiles("OCC"), 0), parse_smiles("CC"));
}

TEST(Mutate, RandomMutantIsDeterministicAndShapePreserving) {
  std::vector<std::string> corpus = kSmallCorpus;
  corpus.insert(corpus.end(), kLargeCorpus.begin(), kLargeCorpus.end());
  int kinds[3] = {0, 0, 0};
  for (const auto& s : corpus) {
    const auto g = parse_smiles(s);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const Mutant a = random_mutant(g, seed);
      const Mutant b = random_mutant(g, seed);
      ASSERT_EQ(a.graph, b.graph);
      ASSERT_EQ(a.kind, b.kind);
      ++kinds[static_cast<int>(a.kind)];
      ASSERT_TRUE(connected(a.graph));
      EXPECT_EQ(a.graph.cycle_rank(), g.cycle_rank()) << s;
      switch (a.kind) {
        case MutationKind::kSubstitution:
          EXPECT_EQ(a.graph.atom_count(), g.atom_count());
          EXPECT_EQ(a.graph.bond_count(), g.bond_count());
          break;
        case MutationKind::kAddition:
          EXPECT_EQ(a.graph.atom_count(), g.atom_count() + 1);
          EXPECT_EQ(a.graph.bond_count(), g.bond_count() + 1);
          break;
        case MutationKind::kDeletion:
          EXPECT_EQ(a.graph.atom_count() + 1, g.atom_count());
          EXPECT_EQ(a.graph.bond_count() + 1, g.bond_count());
          break;
      }
    }
  }
  for (int k : kinds) EXPECT_GT(k, 0);
}

TEST(Mutate, RingOnlyGraphsNeverDelete) {
  const auto g = parse_smiles("C1CCCCC1");
  for (std::uint64_t seed = 0; seed < 200; ++seed) EXPECT_NE(random_mutant(g, seed).kind, MutationKind::kDeletion);
}

TEST(MolecularGraph, RejectsInvalidStructures) {
  EXPECT_THROW(MolecularGraph({}, {}), DataError);
  EXPECT_THROW(MolecularGraph({Atom{}, Atom{}}, {}), DataError);
  EXPECT_THROW(MolecularGraph({Atom{}}, {Bond{0, 0}}), DataError);
  EXPECT_THROW(MolecularGraph({Atom{}, Atom{}}, {Bond{0, 1}, Bond{1, 0}}), DataError);
  EXPECT_THROW(MolecularGraph({Atom{}, Atom{}}, {Bond{0, 2}}), DataError);
}

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "chemkd/error.hpp"
#include "chemkd/fingerprint.hpp"
#include "chemkd/smiles.hpp"

using namespace chemkd;

namespace {

// Sparse ECFC-256 (radius 2) vectors from tests/oracles/fingerprint_oracle.py,
// which hashes hand-written atom/bond tables without going through the parser.
const std::map<std::string, std::vector<std::pair<int, int>>> kOracle = {
    {"C", {{163, 1}}},
    {"CCO", {{66, 1}, {68, 1}, {76, 1}, {111, 1}, {128, 1}, {133, 1}, {194, 1}, {225, 1}}},
    {"CCN", {{46, 1}, {59, 1}, {66, 1}, {104, 1}, {131, 1}, {194, 1}, {217, 1}, {225, 1}}},
    {"C1CC1", {{73, 3}, {225, 3}}},
    {"CC(=O)O", {{22, 1}, {34, 1}, {44, 1}, {66, 1}, {76, 2}, {82, 1}, {88, 1}, {128, 1}, {187, 1}, {193, 1}}},
    {"c1ccccc1", {{11, 6}, {46, 6}, {192, 6}}},
    {"C[N+](C)(C)C", {{66, 4}, {98, 4}, {205, 4}, {231, 1}, {245, 1}}},
    {"CC#N", {{11, 1}, {66, 1}, {82, 1}, {113, 1}, {131, 1}, {182, 1}, {194, 1}, {225, 1}}},
    {"c1ccsc1Cl",
     {{32, 1}, {46, 1}, {73, 1}, {86, 1}, {96, 1}, {108, 1}, {114, 2}, {146, 1}, {149, 1}, {155, 1}, {161, 1},
      {167, 1}, {169, 1}, {192, 3}, {231, 1}}},
    {"[O-]CCCCCC",
     {{12, 1}, {65, 1}, {66, 1}, {73, 4}, {84, 1}, {101, 1}, {120, 1}, {143, 1}, {165, 1}, {194, 1}, {196, 1},
      {198, 1}, {211, 1}, {225, 5}}},
};

std::vector<std::pair<int, int>> sparse(const Fingerprint256& fp) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < 256; ++i) {
    if (fp.values[i] != 0) out.emplace_back(i, fp.values[i]);
  }
  return out;
}

Fingerprint256 binary_from_bits(std::initializer_list<int> bits) {
  Fingerprint256 fp;
  for (int b : bits) fp.values[b] = 1;
  return fp;
}

}  // namespace

TEST(StableHash, FnvOfLoneCarbonInvariant) {
  const std::uint64_t words[] = {6, 0, 0, 0};
  EXPECT_EQ(stable_hash(words), 0x1d0aaab079e74a3ULL);
  EXPECT_EQ(stable_hash({}), 14695981039346656037ULL);
}

TEST(Ecfc, MatchesIndependentOracle) {
  for (const auto& [smiles, expected] : kOracle) {
    EXPECT_EQ(sparse(ecfc(parse_smiles(smiles))), expected) << smiles;
  }
}

TEST(Ecfp, BitsAreSupportOfCounts) {
  for (const auto& [smiles, expected] : kOracle) {
    const auto g = parse_smiles(smiles);
    const auto bits = ecfp(g);
    const auto counts = ecfc(g);
    EXPECT_EQ(bits.kind, FingerprintKind::kBinary);
    EXPECT_EQ(counts.kind, FingerprintKind::kCounts);
    for (int i = 0; i < 256; ++i) EXPECT_EQ(bits.values[i], counts.values[i] ? 1 : 0);
    const auto ids = circular_identifiers(g);
    EXPECT_LE(bits.popcount(), std::set<std::uint64_t>(ids.begin(), ids.end()).size());
    EXPECT_EQ(counts.total(), ids.size());
  }
}

TEST(Ecfp, SingleAtomSetsOneBit) {
  EXPECT_EQ(ecfp(parse_smiles("C")).popcount(), 1U);
  EXPECT_EQ(ecfc(parse_smiles("C")).total(), 1U);
  EXPECT_EQ(ecfc(parse_smiles("[NH4+]")).total(), 1U);
}

TEST(Ecfp, DistinguishesOxygenFromNitrogen) {
  EXPECT_NE(ecfp(parse_smiles("CCO")), ecfp(parse_smiles("CCN")));
}

TEST(Ecfc, TotalBoundedByThreeEmissionsPerAtom) {
  for (const std::string s : {"CC(=O)Oc1ccccc1C(=O)O", "CCCCCCCCCC", "C1CC2CCC1CC2", "CN1C=NC2=C1C(=O)N(C(=O)N2C)C"}) {
    const auto g = parse_smiles(s);
    const auto fp = ecfc(g);
    EXPECT_LE(fp.total(), 3 * g.atom_count()) << s;
    EXPECT_GE(fp.total(), g.atom_count()) << s;
  }
}

TEST(Ecfp, InvariantUnderAtomRenumbering) {
  // The same molecules written from different starting atoms.
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"CCO", "OCC"},
      {"CC(=O)O", "OC(C)=O"},
      {"c1ccsc1Cl", "Clc1sccc1"},
      {"CC(C)Cc1ccc(cc1)C(C)C(=O)O", "OC(=O)C(C)c1ccc(CC(C)C)cc1"},
  };
  for (const auto& [a, b] : pairs) {
    EXPECT_EQ(ecfc(parse_smiles(a)), ecfc(parse_smiles(b))) << a << " vs " << b;
  }
}

TEST(Ecfp, RadiusControlsEmissions) {
  const auto g = parse_smiles("CCCCCC");
  EXPECT_EQ(ecfc(g, 0).total(), 6U);
  EXPECT_LT(ecfc(g, 1).total(), ecfc(g, 2).total());
  EXPECT_THROW(ecfp(g, -1), InvalidArgument);
  EXPECT_THROW(ecfp(g, 9), InvalidArgument);
}

TEST(Tanimoto, DefinitionExamples) {
  const auto a = binary_from_bits({0, 1});
  const auto b = binary_from_bits({1, 2});
  EXPECT_DOUBLE_EQ(tanimoto_distance(a, b), 1.0 - 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(tanimoto_distance(a, a), 0.0);
  EXPECT_DOUBLE_EQ(tanimoto_distance(binary_from_bits({0}), binary_from_bits({5})), 1.0);
}

TEST(Tanimoto, Errors) {
  EXPECT_THROW(tanimoto_distance(Fingerprint256{}, Fingerprint256{}), InvalidArgument);
  Fingerprint256 counts = binary_from_bits({1});
  counts.kind = FingerprintKind::kCounts;
  EXPECT_THROW(tanimoto_distance(binary_from_bits({1}), counts), InvalidArgument);
}

TEST(Tanimoto, SymmetricBoundedAndZeroIffEqual) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    Fingerprint256 a, b;
    for (int i = 0; i < 256; ++i) {
      a.values[i] = (rng() % 7) == 0;
      b.values[i] = trial % 3 == 0 ? a.values[i] : (rng() % 7) == 0;
    }
    a.values[trial % 256] = 1;
    const double ab = tanimoto_distance(a, b);
    EXPECT_EQ(ab, tanimoto_distance(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_EQ(ab == 0.0, a == b);
  }
}

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "chemkd/bruteforce.hpp"
#include "chemkd/error.hpp"
#include "chemkd/formats.hpp"
#include "chemkd/smiles.hpp"
#include "test_util.hpp"

using namespace chemkd;
using chemkd::testing::random_points;
using chemkd::testing::TempDir;

namespace {

// Full sort oracle: every distance, ordered by (distance, id).
std::vector<Neighbor> sort_oracle(const chemkd::testing::Points& p, std::span<const float> q, std::size_t k) {
  std::vector<Neighbor> all;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double s = 0;
    for (std::size_t d = 0; d < p.dim; ++d) {
      const double diff = static_cast<double>(p.coords[i * p.dim + d]) - q[d];
      s += diff * diff;
    }
    all.push_back({p.ids[i], s});
  }
  std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
  });
  all.resize(std::min(k, all.size()));
  for (auto& n : all) n.distance = std::sqrt(n.distance);
  return all;
}

}  // namespace

TEST(Euclidean, Examples) {
  EXPECT_EQ(euclidean_distance(std::vector<double>{0, 0}, std::vector<double>{3, 4}), 5.0);
  EXPECT_EQ(euclidean_distance(std::vector<double>{1.5, -2}, std::vector<double>{1.5, -2}), 0.0);
  EXPECT_THROW(euclidean_distance(std::vector<double>{1}, std::vector<double>{1, 2}), InvalidArgument);
  EXPECT_THROW(euclidean_distance(std::vector<double>{NAN}, std::vector<double>{1}), DataError);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    std::vector<float> a(7), b(7);
    for (auto& v : a) v = static_cast<float>(standard_normal(rng));
    for (auto& v : b) v = static_cast<float>(standard_normal(rng));
    EXPECT_EQ(euclidean_distance(std::span<const float>(a), std::span<const float>(b)),
              euclidean_distance(std::span<const float>(b), std::span<const float>(a)));
  }
}

TEST(TopK, KeepsSmallestWithIdTieBreak) {
  TopK top(3);
  top.offer(1.0, 9);
  top.offer(1.0, 2);
  top.offer(0.5, 7);
  top.offer(1.0, 1);
  top.offer(2.0, 0);
  const auto got = top.take_sorted();
  ASSERT_EQ(got.size(), 3U);
  EXPECT_EQ(got[0].id, 7U);
  EXPECT_EQ(got[1].id, 1U);
  EXPECT_EQ(got[2].id, 2U);
}

TEST(TopK, MergedShardsEqualSinglePass) {
  std::mt19937_64 rng(2);
  TopK whole(10), a(10), b(10), c(10);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double key = static_cast<double>(rng() % 50);
    whole.offer(key, i);
    (i % 3 == 0 ? a : i % 3 == 1 ? b : c).offer(key, i);
  }
  a.merge(b);
  a.merge(c);
  const auto x = whole.take_sorted();
  const auto y = a.take_sorted();
  ASSERT_EQ(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(x[i].key, y[i].key);
    EXPECT_EQ(x[i].id, y[i].id);
  }
}

TEST(BfKnn, MatchesFullSortOracle) {
  const auto p = random_points(2000, 5, 3);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 50; ++t) {
    std::vector<float> q(5);
    for (auto& v : q) v = static_cast<float>(uniform_unit(rng));
    for (std::size_t k : {1, 10, 2500}) EXPECT_EQ(bf_knn(p.ids, p.coords, 5, q, k), sort_oracle(p, q, k));
  }
}

TEST(BfKnn, InputOrderDoesNotMatter) {
  auto p = random_points(500, 2, 5);
  for (std::size_t i = 0; i < p.size(); i += 2) {  // duplicate coordinates under different ids
    p.coords[i * 2] = 0.5F;
    p.coords[i * 2 + 1] = 0.5F;
  }
  const std::vector<float> q = {0.5F, 0.5F};
  const auto expected = bf_knn(p.ids, p.coords, 2, q, 40);
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), std::mt19937_64(6));
  std::vector<std::uint64_t> ids;
  std::vector<float> coords;
  for (std::size_t i : order) {
    ids.push_back(p.ids[i]);
    coords.push_back(p.coords[i * 2]);
    coords.push_back(p.coords[i * 2 + 1]);
  }
  EXPECT_EQ(bf_knn(ids, coords, 2, q, 40), expected);
}

TEST(BfKnn, FileAndBatchVariantsAgree) {
  TempDir dir;
  const auto p = random_points(3000, 4, 7);
  chemkd::testing::write_points(dir / "p.emb", p);
  const auto queries = random_points(20, 4, 8);
  const auto batch = bf_knn_file_batch(dir / "p.emb", queries.coords, 25);
  ASSERT_EQ(batch.size(), 20U);
  for (std::size_t q = 0; q < 20; ++q) {
    const auto query = std::span<const float>(queries.coords).subspan(q * 4, 4);
    const auto direct = bf_knn(p.ids, p.coords, 4, query, 25);
    EXPECT_EQ(bf_knn_file(dir / "p.emb", query, 25), direct);
    EXPECT_EQ(batch[q], direct);
  }
}

TEST(BfKnn, Errors) {
  TempDir dir;
  const auto p = random_points(10, 3, 9);
  EXPECT_THROW(bf_knn(p.ids, p.coords, 3, std::vector<float>(2), 1), InvalidArgument);
  EXPECT_THROW(bf_knn(p.ids, p.coords, 3, std::vector<float>(3), 0), InvalidArgument);
  EXPECT_THROW(bf_knn({}, {}, 3, std::vector<float>(3), 1), DataError);
  chemkd::testing::Points empty;
  empty.dim = 3;
  chemkd::testing::write_points(dir / "empty.emb", empty);
  EXPECT_THROW(bf_knn_file(dir / "empty.emb", std::vector<float>(3), 1), DataError);
  EXPECT_EQ(parse_metric("tanimoto"), Metric::kTanimoto);
  EXPECT_THROW(parse_metric("cosine"), InvalidArgument);
}

TEST(BfKnn, FingerprintMetrics) {
  TempDir dir;
  const std::vector<std::string> smiles = {"CCO", "CCN", "CCC", "c1ccccc1", "CC(=O)O", "CCCO"};
  {
    FingerprintWriter bits(dir / "f.fpb", FingerprintKind::kBinary);
    FingerprintWriter counts(dir / "f.fpc", FingerprintKind::kCounts);
    for (std::size_t i = 0; i < smiles.size(); ++i) {
      bits.add(i, ecfp(parse_smiles(smiles[i])));
      counts.add(i, ecfc(parse_smiles(smiles[i])));
    }
    bits.finish();
    counts.finish();
  }
  const auto query_bits = ecfp(parse_smiles("CCO"));
  const auto t = bf_knn_fingerprints(dir / "f.fpb", query_bits, 6, Metric::kTanimoto);
  ASSERT_EQ(t.size(), 6U);
  EXPECT_EQ(t[0].id, 0U);
  EXPECT_EQ(t[0].distance, 0.0);
  for (const auto& n : t) {
    EXPECT_DOUBLE_EQ(n.distance, tanimoto_distance(query_bits, ecfp(parse_smiles(smiles[n.id]))));
  }
  const auto query_counts = ecfc(parse_smiles("CCO"));
  const auto e = bf_knn_fingerprints(dir / "f.fpc", query_counts, 3, Metric::kEuclidean);
  EXPECT_EQ(e[0].id, 0U);
  EXPECT_EQ(e[0].distance, 0.0);
  EXPECT_DOUBLE_EQ(e[1].distance, euclidean_distance(query_counts.to_reals(), ecfc(parse_smiles(smiles[e[1].id])).to_reals()));
  EXPECT_THROW(bf_knn_fingerprints(dir / "f.fpc", query_counts, 3, Metric::kTanimoto), InvalidArgument);
}

#include <gtest/gtest.h>

#include <cstring>

#include "chemkd/error.hpp"
#include "chemkd/formats.hpp"
#include "chemkd/io.hpp"
#include "test_util.hpp"

using namespace chemkd;
using chemkd::testing::slurp;
using chemkd::testing::TempDir;
using chemkd::testing::write_text;

TEST(Embeddings, ByteLayout) {
  TempDir dir;
  {
    EmbeddingWriter w(dir / "a.emb", 2);
    const float x[] = {1.0F, -2.5F};
    w.add(7, x);
    w.finish();
  }
  const std::string bytes = slurp(dir / "a.emb");
  ASSERT_EQ(bytes.size(), 16U + 8 + 8);
  EXPECT_EQ(bytes.substr(0, 4), "EMB1");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  EXPECT_EQ(le::load<std::uint16_t>(p + 4), 1);
  EXPECT_EQ(le::load<std::uint16_t>(p + 6), 2);
  EXPECT_EQ(le::load<std::uint64_t>(p + 8), 1U);
  EXPECT_EQ(le::load<std::uint64_t>(p + 16), 7U);
  EXPECT_EQ(le::load<float>(p + 24), 1.0F);
  EXPECT_EQ(le::load<float>(p + 28), -2.5F);
}

TEST(Embeddings, RoundTripAndRewind) {
  TempDir dir;
  const auto pts = chemkd::testing::random_points(100, 5, 3);
  chemkd::testing::write_points(dir / "p.emb", pts);
  EmbeddingReader r(dir / "p.emb");
  EXPECT_EQ(r.dim(), 5U);
  EXPECT_EQ(r.count(), 100U);
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<float> x(5);
    std::uint64_t id = 0;
    for (std::size_t i = 0; i < 100; ++i) {
      ASSERT_TRUE(r.next(id, x));
      EXPECT_EQ(id, pts.ids[i]);
      EXPECT_TRUE(std::equal(x.begin(), x.end(), pts.coords.begin() + i * 5));
    }
    EXPECT_FALSE(r.next(id, x));
    r.rewind();
  }
  EXPECT_EQ(sniff_file(dir / "p.emb"), FileKind::kEmbeddings);
}

TEST(Embeddings, RejectsBadInput) {
  TempDir dir;
  EXPECT_THROW(EmbeddingWriter(dir / "z.emb", 0), InvalidArgument);
  EXPECT_THROW(EmbeddingWriter(dir / "z.emb", kMaxEmbeddingDim + 1), InvalidArgument);
  EmbeddingWriter w(dir / "x.emb", 2);
  const float nan[] = {0.0F, std::numeric_limits<float>::quiet_NaN()};
  EXPECT_THROW(w.add(1, nan), DataError);
  const float three[] = {1, 2, 3};
  EXPECT_THROW(w.add(1, three), InvalidArgument);
}

TEST(Embeddings, TruncatedAndWrongMagicAreFormatErrors) {
  TempDir dir;
  chemkd::testing::write_points(dir / "p.emb", chemkd::testing::random_points(10, 3, 1));
  std::string bytes = slurp(dir / "p.emb");
  write_text(dir / "short.emb", bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(
      {
        EmbeddingReader r(dir / "short.emb");
        std::vector<float> x(3);
        std::uint64_t id;
        while (r.next(id, x)) {
        }
      },
      FormatError);
  bytes[0] = 'X';
  write_text(dir / "bad.emb", bytes);
  EXPECT_THROW(EmbeddingReader(dir / "bad.emb"), FormatError);
  write_text(dir / "tiny.emb", "EM");
  EXPECT_THROW(EmbeddingReader(dir / "tiny.emb"), FormatError);
  EXPECT_EQ(sniff_file(dir / "bad.emb"), FileKind::kUnknown);
  EXPECT_THROW(EmbeddingReader(dir / "missing.emb"), IoError);
}

TEST(Fingerprints, BinaryLayoutPacksBitsLsbFirst) {
  TempDir dir;
  Fingerprint256 fp;
  fp.values[0] = 1;
  fp.values[9] = 1;
  fp.values[255] = 1;
  {
    FingerprintWriter w(dir / "f.fpb", FingerprintKind::kBinary);
    w.add(42, fp);
    w.finish();
  }
  const std::string bytes = slurp(dir / "f.fpb");
  ASSERT_EQ(bytes.size(), 14U + 8 + 32);
  EXPECT_EQ(bytes.substr(0, 4), "FPB1");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  EXPECT_EQ(le::load<std::uint64_t>(p + 6), 1U);
  EXPECT_EQ(le::load<std::uint64_t>(p + 14), 42U);
  EXPECT_EQ(p[22], 0x01);
  EXPECT_EQ(p[23], 0x02);
  EXPECT_EQ(p[22 + 31], 0x80);

  FingerprintReader r(dir / "f.fpb");
  Fingerprint256 back;
  std::uint64_t id = 0;
  ASSERT_TRUE(r.next(id, back));
  EXPECT_EQ(id, 42U);
  EXPECT_EQ(back, fp);
}

TEST(Fingerprints, CountRoundTrip) {
  TempDir dir;
  Fingerprint256 fp;
  fp.kind = FingerprintKind::kCounts;
  for (int i = 0; i < 256; ++i) fp.values[i] = static_cast<std::uint16_t>(i * 257);
  {
    FingerprintWriter w(dir / "f.fpc", FingerprintKind::kCounts);
    w.add(1, fp);
    w.add(2, fp);
    w.finish();
  }
  EXPECT_EQ(slurp(dir / "f.fpc").size(), 14U + 2 * (8 + 512));
  EXPECT_EQ(sniff_file(dir / "f.fpc"), FileKind::kCountFingerprints);
  FingerprintReader r(dir / "f.fpc");
  EXPECT_EQ(r.kind(), FingerprintKind::kCounts);
  Fingerprint256 back;
  std::uint64_t id = 0;
  ASSERT_TRUE(r.next(id, back));
  EXPECT_EQ(back, fp);
  ASSERT_TRUE(r.next(id, back));
  EXPECT_EQ(id, 2U);
  EXPECT_FALSE(r.next(id, back));
}

TEST(Fingerprints, KindMismatchOnWrite) {
  TempDir dir;
  FingerprintWriter w(dir / "f.fpb", FingerprintKind::kBinary);
  Fingerprint256 counts;
  counts.kind = FingerprintKind::kCounts;
  EXPECT_THROW(w.add(1, counts), InvalidArgument);
}

TEST(AtomicOutput, NothingAppearsWithoutCommit) {
  TempDir dir;
  {
    EmbeddingWriter w(dir / "never.emb", 2);
    const float x[] = {1, 2};
    w.add(1, x);
  }
  EXPECT_FALSE(std::filesystem::exists(dir / "never.emb"));
  EXPECT_EQ(std::distance(std::filesystem::directory_iterator(dir.path()), std::filesystem::directory_iterator()), 0);
}

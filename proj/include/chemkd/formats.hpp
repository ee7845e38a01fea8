#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>

#include "chemkd/fingerprint.hpp"
#include "chemkd/io.hpp"

namespace chemkd {

inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::size_t kMaxEmbeddingDim = 64;

/// Tagged binary files understood by the toolkit, identified by their magic.
enum class FileKind {
  kUnknown,
  kEmbeddings,           // "EMB1"
  kBinaryFingerprints,   // "FPB1"
  kCountFingerprints,    // "FPC1"
  kPcaModel,             // "PCA1"
  kSparseProjection,     // "SRP1"
  kKdIndex,              // "KDT1"
};

FileKind sniff_file(const std::filesystem::path& path);

// EMB1: magic, u16 version, u16 dim, u64 count, then per record u64 id + dim x f32.

class EmbeddingWriter {
 public:
  EmbeddingWriter(const std::filesystem::path& path, std::size_t dim);
  void add(std::uint64_t id, std::span<const float> coords);
  /// Patches the record count into the header and renames into place.
  void finish();
  std::uint64_t count() const { return count_; }
  std::size_t dim() const { return dim_; }

 private:
  AtomicOutput output_;
  std::optional<BinaryWriter> writer_;
  std::size_t dim_;
  std::uint64_t count_ = 0;
};

class EmbeddingReader {
 public:
  explicit EmbeddingReader(const std::filesystem::path& path);
  std::size_t dim() const { return dim_; }
  std::uint64_t count() const { return count_; }
  /// Reads the next record; false at the end of the file.
  bool next(std::uint64_t& id, std::span<float> coords);
  void rewind();

  static constexpr std::uint64_t kHeaderBytes = 16;

 private:
  BinaryReader reader_;
  std::size_t dim_ = 0;
  std::uint64_t count_ = 0;
  std::uint64_t read_ = 0;
};

// FPB1 / FPC1: magic, u16 version, u64 count, then per record u64 id plus
// 32 packed bytes (bit i in byte i/8, least significant bit first) or 256 x u16.

class FingerprintWriter {
 public:
  FingerprintWriter(const std::filesystem::path& path, FingerprintKind kind);
  void add(std::uint64_t id, const Fingerprint256& fp);
  void finish();
  std::uint64_t count() const { return count_; }

 private:
  AtomicOutput output_;
  std::optional<BinaryWriter> writer_;
  FingerprintKind kind_;
  std::uint64_t count_ = 0;
};

class FingerprintReader {
 public:
  explicit FingerprintReader(const std::filesystem::path& path);
  FingerprintKind kind() const { return kind_; }
  std::uint64_t count() const { return count_; }
  bool next(std::uint64_t& id, Fingerprint256& fp);
  void rewind();

  static constexpr std::uint64_t kHeaderBytes = 14;

 private:
  BinaryReader reader_;
  FingerprintKind kind_ = FingerprintKind::kBinary;
  std::uint64_t count_ = 0;
  std::uint64_t read_ = 0;
};

}  // namespace chemkd

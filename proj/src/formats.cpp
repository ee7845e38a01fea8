#include "chemkd/formats.hpp"

#include <array>
#include <cmath>
#include <cstring>

namespace chemkd {

namespace fs = std::filesystem;

namespace {

void check_magic(BinaryReader& reader, const char* expected) {
  char magic[4];
  reader.read_bytes(magic, 4);
  if (std::memcmp(magic, expected, 4) != 0) {
    throw FormatError(reader.path().string() + " is not a " + std::string(expected, 4) + " file");
  }
}

void check_version(BinaryReader& reader) {
  const auto version = reader.read<std::uint16_t>();
  if (version != kFormatVersion) {
    throw FormatError(reader.path().string() + ": unsupported format version " + std::to_string(version));
  }
}

}  // namespace

FileKind sniff_file(const fs::path& path) {
  FilePtr file = open_file(path, "rb");
  char magic[4] = {};
  if (std::fread(magic, 1, 4, file.get()) != 4) return FileKind::kUnknown;
  const std::string_view m(magic, 4);
  if (m == "EMB1") return FileKind::kEmbeddings;
  if (m == "FPB1") return FileKind::kBinaryFingerprints;
  if (m == "FPC1") return FileKind::kCountFingerprints;
  if (m == "PCA1") return FileKind::kPcaModel;
  if (m == "SRP1") return FileKind::kSparseProjection;
  if (m == "KDT1") return FileKind::kKdIndex;
  return FileKind::kUnknown;
}

EmbeddingWriter::EmbeddingWriter(const fs::path& path, std::size_t dim)
    : output_(path), dim_(dim) {
  if (dim == 0 || dim > kMaxEmbeddingDim) {
    throw InvalidArgument("embedding dimension must be in [1, " + std::to_string(kMaxEmbeddingDim) + "]");
  }
  writer_.emplace(output_.temp_path());
  writer_->write_bytes("EMB1", 4);
  writer_->write<std::uint16_t>(kFormatVersion);
  writer_->write<std::uint16_t>(static_cast<std::uint16_t>(dim));
  writer_->write<std::uint64_t>(0);
}

void EmbeddingWriter::add(std::uint64_t id, std::span<const float> coords) {
  if (coords.size() != dim_) throw InvalidArgument("embedding record has the wrong dimension");
  for (float c : coords) {
    if (!std::isfinite(c)) throw DataError("non-finite coordinate in embedding " + std::to_string(id));
  }
  writer_->write<std::uint64_t>(id);
  writer_->write_floats(coords);
  ++count_;
}

void EmbeddingWriter::finish() {
  unsigned char buf[8];
  le::store<std::uint64_t>(buf, count_);
  writer_->patch(8, buf, 8);
  writer_->close();
  output_.commit();
}

EmbeddingReader::EmbeddingReader(const fs::path& path) : reader_(path) {
  check_magic(reader_, "EMB1");
  check_version(reader_);
  dim_ = reader_.read<std::uint16_t>();
  count_ = reader_.read<std::uint64_t>();
  if (dim_ == 0 || dim_ > kMaxEmbeddingDim) throw FormatError(path.string() + ": bad embedding dimension");
  const std::uint64_t expected = kHeaderBytes + count_ * (8 + 4 * dim_);
  if (reader_.file_size() != expected) {
    throw FormatError(path.string() + ": file size does not match the record count (truncated?)");
  }
}

bool EmbeddingReader::next(std::uint64_t& id, std::span<float> coords) {
  if (read_ == count_) return false;
  if (coords.size() != dim_) throw InvalidArgument("coordinate buffer has the wrong dimension");
  id = reader_.read<std::uint64_t>();
  reader_.read_floats(coords);
  ++read_;
  return true;
}

void EmbeddingReader::rewind() {
  reader_.seek(kHeaderBytes);
  read_ = 0;
}

FingerprintWriter::FingerprintWriter(const fs::path& path, FingerprintKind kind)
    : output_(path), kind_(kind) {
  writer_.emplace(output_.temp_path());
  writer_->write_bytes(kind == FingerprintKind::kBinary ? "FPB1" : "FPC1", 4);
  writer_->write<std::uint16_t>(kFormatVersion);
  writer_->write<std::uint64_t>(0);
}

void FingerprintWriter::add(std::uint64_t id, const Fingerprint256& fp) {
  if (fp.kind != kind_) throw InvalidArgument("fingerprint kind does not match the file kind");
  writer_->write<std::uint64_t>(id);
  if (kind_ == FingerprintKind::kBinary) {
    std::array<unsigned char, kFingerprintLength / 8> packed{};
    for (std::size_t i = 0; i < kFingerprintLength; ++i) {
      if (fp.values[i] != 0) packed[i / 8] |= static_cast<unsigned char>(1U << (i % 8));
    }
    writer_->write_bytes(packed.data(), packed.size());
  } else {
    for (std::uint16_t v : fp.values) writer_->write<std::uint16_t>(v);
  }
  ++count_;
}

void FingerprintWriter::finish() {
  unsigned char buf[8];
  le::store<std::uint64_t>(buf, count_);
  writer_->patch(6, buf, 8);
  writer_->close();
  output_.commit();
}

FingerprintReader::FingerprintReader(const fs::path& path) : reader_(path) {
  char magic[4];
  reader_.read_bytes(magic, 4);
  const std::string_view m(magic, 4);
  if (m == "FPB1") {
    kind_ = FingerprintKind::kBinary;
  } else if (m == "FPC1") {
    kind_ = FingerprintKind::kCounts;
  } else {
    throw FormatError(path.string() + " is not a fingerprint file");
  }
  check_version(reader_);
  count_ = reader_.read<std::uint64_t>();
  const std::uint64_t record = 8 + (kind_ == FingerprintKind::kBinary ? 32 : 512);
  if (reader_.file_size() != kHeaderBytes + count_ * record) {
    throw FormatError(path.string() + ": file size does not match the record count (truncated?)");
  }
}

bool FingerprintReader::next(std::uint64_t& id, Fingerprint256& fp) {
  if (read_ == count_) return false;
  id = reader_.read<std::uint64_t>();
  fp.kind = kind_;
  if (kind_ == FingerprintKind::kBinary) {
    std::array<unsigned char, kFingerprintLength / 8> packed;
    reader_.read_bytes(packed.data(), packed.size());
    for (std::size_t i = 0; i < kFingerprintLength; ++i) {
      fp.values[i] = (packed[i / 8] >> (i % 8)) & 1U;
    }
  } else {
    for (auto& v : fp.values) v = reader_.read<std::uint16_t>();
  }
  ++read_;
  return true;
}

void FingerprintReader::rewind() {
  reader_.seek(kHeaderBytes);
  read_ = 0;
}

}  // namespace chemkd

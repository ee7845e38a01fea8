#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>
#include <span>
#include <string>

#include "chemkd/error.hpp"

namespace chemkd {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

namespace le {

template <typename T>
inline T byteswap_if_big(T value) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    std::memcpy(&value, bytes, sizeof(T));
  }
  return value;
}

/// Stores `value` little-endian at `out`.
template <typename T>
inline void store(unsigned char* out, T value) {
  value = byteswap_if_big(value);
  std::memcpy(out, &value, sizeof(T));
}

/// Loads a little-endian `T` from `in`.
template <typename T>
inline T load(const unsigned char* in) {
  T value;
  std::memcpy(&value, in, sizeof(T));
  return byteswap_if_big(value);
}

}  // namespace le

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

/// fopen that throws IoError (with the errno text) instead of returning null.
FilePtr open_file(const std::filesystem::path& path, const char* mode);

/// Buffered little-endian writer over a FILE*.
class BinaryWriter {
 public:
  BinaryWriter(const std::filesystem::path& path, std::size_t buffer_bytes = 1 << 20);

  void write_bytes(const void* data, std::size_t size);
  template <typename T>
  void write(T value) {
    unsigned char buf[sizeof(T)];
    le::store(buf, value);
    write_bytes(buf, sizeof(T));
  }
  void write_floats(std::span<const float> values);
  void write_doubles(std::span<const double> values);

  /// Overwrites bytes at an absolute offset, then returns to the end.
  void patch(std::uint64_t offset, const void* data, std::size_t size);

  std::uint64_t position() const { return position_; }
  void close();

 private:
  FilePtr file_;
  std::filesystem::path path_;
  std::uint64_t position_ = 0;
};

/// Buffered little-endian reader; any short read is a FormatError (truncation).
class BinaryReader {
 public:
  BinaryReader(const std::filesystem::path& path, std::size_t buffer_bytes = 1 << 20);

  void read_bytes(void* data, std::size_t size);
  template <typename T>
  T read() {
    unsigned char buf[sizeof(T)];
    read_bytes(buf, sizeof(T));
    return le::load<T>(buf);
  }
  void read_floats(std::span<float> out);
  void read_doubles(std::span<double> out);

  void seek(std::uint64_t offset);
  std::uint64_t file_size() const { return size_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  FilePtr file_;
  std::filesystem::path path_;
  std::uint64_t size_ = 0;
};

/// Writes go to a temporary sibling; commit() renames it over the final path.
/// Without commit() the temporary is removed, so a failed run never leaves a
/// partial output under the real name.
class AtomicOutput {
 public:
  explicit AtomicOutput(std::filesystem::path final_path);
  ~AtomicOutput();
  AtomicOutput(const AtomicOutput&) = delete;
  AtomicOutput& operator=(const AtomicOutput&) = delete;

  const std::filesystem::path& temp_path() const { return temp_; }
  const std::filesystem::path& final_path() const { return final_; }
  void commit();

 private:
  std::filesystem::path final_;
  std::filesystem::path temp_;
  bool committed_ = false;
};

/// Removes the file on destruction.
class TempFile {
 public:
  explicit TempFile(std::filesystem::path path) : path_(std::move(path)) {}
  ~TempFile();
  TempFile(TempFile&& other) noexcept : path_(std::move(other.path_)) { other.path_.clear(); }
  TempFile& operator=(TempFile&&) = delete;
  TempFile(const TempFile&) = delete;

  const std::filesystem::path& path() const { return path_; }
  void remove();

 private:
  std::filesystem::path path_;
};

/// A unique sibling name in `dir`, e.g. for temporaries: "<stem>.<pid>.<n>.<suffix>".
std::filesystem::path unique_temp_path(const std::filesystem::path& dir, const std::string& stem,
                                       const std::string& suffix);

}  // namespace chemkd

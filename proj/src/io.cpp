#include "chemkd/io.hpp"

#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <system_error>
#include <vector>

namespace chemkd {

namespace fs = std::filesystem;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr file(std::fopen(path.c_str(), mode));
  if (!file) {
    throw IoError("cannot open " + path.string() + ": " + std::generic_category().message(errno));
  }
  return file;
}

BinaryWriter::BinaryWriter(const fs::path& path, std::size_t buffer_bytes)
    : file_(open_file(path, "wb")), path_(path) {
  std::setvbuf(file_.get(), nullptr, _IOFBF, buffer_bytes);
}

void BinaryWriter::write_bytes(const void* data, std::size_t size) {
  if (size == 0) return;
  if (std::fwrite(data, 1, size, file_.get()) != size) {
    throw IoError("write failed on " + path_.string() + ": " + std::generic_category().message(errno));
  }
  position_ += size;
}

void BinaryWriter::write_floats(std::span<const float> values) {
  if constexpr (std::endian::native == std::endian::little) {
    write_bytes(values.data(), values.size_bytes());
  } else {
    for (float v : values) write(v);
  }
}

void BinaryWriter::write_doubles(std::span<const double> values) {
  if constexpr (std::endian::native == std::endian::little) {
    write_bytes(values.data(), values.size_bytes());
  } else {
    for (double v : values) write(v);
  }
}

void BinaryWriter::patch(std::uint64_t offset, const void* data, std::size_t size) {
  std::FILE* f = file_.get();
  if (std::fflush(f) != 0 || fseeko(f, static_cast<off_t>(offset), SEEK_SET) != 0 ||
      std::fwrite(data, 1, size, f) != size || std::fflush(f) != 0 ||
      fseeko(f, 0, SEEK_END) != 0) {
    throw IoError("patch failed on " + path_.string() + ": " + std::generic_category().message(errno));
  }
}

void BinaryWriter::close() {
  if (!file_) return;
  std::FILE* f = file_.release();
  const bool flushed = std::fflush(f) == 0;
  const bool closed = std::fclose(f) == 0;
  if (!flushed || !closed) {
    throw IoError("close failed on " + path_.string() + ": " + std::generic_category().message(errno));
  }
}

BinaryReader::BinaryReader(const fs::path& path, std::size_t buffer_bytes)
    : file_(open_file(path, "rb")), path_(path) {
  std::setvbuf(file_.get(), nullptr, _IOFBF, buffer_bytes);
  std::error_code ec;
  size_ = fs::file_size(path, ec);
  if (ec) throw IoError("cannot stat " + path.string() + ": " + ec.message());
}

void BinaryReader::read_bytes(void* data, std::size_t size) {
  if (size == 0) return;
  const std::size_t got = std::fread(data, 1, size, file_.get());
  if (got != size) {
    if (std::ferror(file_.get())) {
      throw IoError("read failed on " + path_.string() + ": " + std::generic_category().message(errno));
    }
    throw FormatError("truncated file " + path_.string());
  }
}

void BinaryReader::read_floats(std::span<float> out) {
  read_bytes(out.data(), out.size_bytes());
  if constexpr (std::endian::native == std::endian::big) {
    for (float& v : out) v = le::byteswap_if_big(v);
  }
}

void BinaryReader::read_doubles(std::span<double> out) {
  read_bytes(out.data(), out.size_bytes());
  if constexpr (std::endian::native == std::endian::big) {
    for (double& v : out) v = le::byteswap_if_big(v);
  }
}

void BinaryReader::seek(std::uint64_t offset) {
  if (fseeko(file_.get(), static_cast<off_t>(offset), SEEK_SET) != 0) {
    throw IoError("seek failed on " + path_.string());
  }
}

fs::path unique_temp_path(const fs::path& dir, const std::string& stem, const std::string& suffix) {
  static std::atomic<std::uint64_t> counter{0};
  const std::string name = stem + "." + std::to_string(::getpid()) + "." +
                           std::to_string(counter.fetch_add(1)) + suffix;
  return dir.empty() ? fs::path(name) : dir / name;
}

AtomicOutput::AtomicOutput(fs::path final_path) : final_(std::move(final_path)) {
  const fs::path dir = final_.parent_path();
  temp_ = unique_temp_path(dir, final_.filename().string(), ".partial");
}

AtomicOutput::~AtomicOutput() {
  if (!committed_) {
    std::error_code ec;
    fs::remove(temp_, ec);
  }
}

void AtomicOutput::commit() {
  std::error_code ec;
  fs::rename(temp_, final_, ec);
  if (ec) throw IoError("cannot rename " + temp_.string() + " to " + final_.string() + ": " + ec.message());
  committed_ = true;
}

TempFile::~TempFile() {
  if (!path_.empty()) {
    std::error_code ec;
    fs::remove(path_, ec);
  }
}

void TempFile::remove() {
  if (path_.empty()) return;
  std::error_code ec;
  fs::remove(path_, ec);
  path_.clear();
}

}  // namespace chemkd

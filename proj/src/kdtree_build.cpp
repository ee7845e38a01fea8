#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include "chemkd/error.hpp"
#include "chemkd/formats.hpp"
#include "chemkd/kdtree.hpp"
#include "kdtree_format.hpp"

namespace chemkd {

namespace fs = std::filesystem;

struct EmbeddingFileSource::Impl {
  explicit Impl(const fs::path& path) : reader(path) {}
  EmbeddingReader reader;
};

EmbeddingFileSource::EmbeddingFileSource(const fs::path& path) : impl_(std::make_unique<Impl>(path)) {}
EmbeddingFileSource::~EmbeddingFileSource() = default;
std::size_t EmbeddingFileSource::dim() const { return impl_->reader.dim(); }
std::optional<std::uint64_t> EmbeddingFileSource::size_hint() const { return impl_->reader.count(); }
bool EmbeddingFileSource::next(std::uint64_t& id, std::span<float> coords) {
  return impl_->reader.next(id, coords);
}

MemoryPointSource::MemoryPointSource(std::span<const std::uint64_t> ids, std::span<const float> coords,
                                     std::size_t dim)
    : ids_(ids), coords_(coords), dim_(dim) {
  if (dim == 0 || coords.size() != ids.size() * dim) {
    throw InvalidArgument("coordinate array does not match ids x dim");
  }
}

bool MemoryPointSource::next(std::uint64_t& id, std::span<float> coords) {
  if (pos_ == ids_.size()) return false;
  id = ids_[pos_];
  std::copy_n(coords_.begin() + static_cast<std::ptrdiff_t>(pos_ * dim_), dim_, coords.begin());
  ++pos_;
  return true;
}

namespace {

using kd::Node;

struct Bounds {
  std::vector<float> lo;
  std::vector<float> hi;

  explicit Bounds(std::size_t dim)
      : lo(dim, std::numeric_limits<float>::infinity()), hi(dim, -std::numeric_limits<float>::infinity()) {}

  void add(const unsigned char* rec) {
    for (std::size_t i = 0; i < lo.size(); ++i) {
      const float c = kd::record_coord(rec, i);
      lo[i] = std::min(lo[i], c);
      hi[i] = std::max(hi[i], c);
    }
  }

  std::size_t widest_dim() const {
    std::size_t best = 0;
    double best_spread = -1.0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
      const double spread = static_cast<double>(hi[i]) - static_cast<double>(lo[i]);
      if (spread > best_spread) {
        best_spread = spread;
        best = i;
      }
    }
    return best;
  }
};

class InternalCounter {
 public:
  explicit InternalCounter(std::uint32_t leaf_capacity) : leaf_capacity_(leaf_capacity) {}

  std::uint64_t operator()(std::uint64_t m) {
    if (m <= leaf_capacity_) return 0;
    if (auto it = memo_.find(m); it != memo_.end()) return it->second;
    const std::uint64_t value = 1 + (*this)((m + 1) / 2) + (*this)(m / 2);
    memo_.emplace(m, value);
    return value;
  }

 private:
  std::uint32_t leaf_capacity_;
  std::unordered_map<std::uint64_t, std::uint64_t> memo_;
};

struct Segment {
  TempFile file;
  std::uint64_t count = 0;
};

constexpr std::size_t kChunkRecords = 4096;

class Builder {
 public:
  Builder(std::size_t dim, const BuildOptions& options, const fs::path& out_path)
      : dim_(dim),
        rec_(kd::record_bytes(dim)),
        leaf_capacity_(options.leaf_capacity),
        budget_(options.memory_budget),
        out_path_(out_path),
        temp_dir_(options.temp_dir.empty() ? out_path.parent_path() : options.temp_dir),
        count_internal_(options.leaf_capacity) {
    if (temp_dir_.empty()) temp_dir_ = ".";
  }

  BuildReport run(PointSource& source) {
    const std::uint64_t per_record = rec_ + 4;
    const std::uint64_t spool_capacity = std::min<std::uint64_t>(budget_ / per_record, UINT32_MAX);
    if (spool_capacity < leaf_capacity_) throw_budget(0);

    Bounds bounds(dim_);
    std::optional<Segment> spill;
    std::optional<BinaryWriter> spill_writer;
    std::uint64_t n = 0;
    {
      const std::uint64_t hint = source.size_hint().value_or(spool_capacity);
      buf_.reserve(std::min(hint, spool_capacity) * rec_);
      note_memory();
      std::vector<float> coords(dim_);
      std::vector<unsigned char> rec(rec_);
      std::uint64_t id = 0;
      while (source.next(id, coords)) {
        for (float c : coords) {
          if (!std::isfinite(c)) throw DataError("non-finite coordinate in point " + std::to_string(id));
        }
        le::store<std::uint64_t>(rec.data(), id);
        for (std::size_t i = 0; i < dim_; ++i) le::store<float>(rec.data() + 8 + 4 * i, coords[i]);
        bounds.add(rec.data());
        ++n;
        if (spill_writer) {
          spill_writer->write_bytes(rec.data(), rec_);
          continue;
        }
        if (buf_.size() == spool_capacity * rec_) {
          spill.emplace(new_segment());
          spill_writer.emplace(spill->file.path());
          spill_writer->write_bytes(buf_.data(), buf_.size());
          spill_writer->write_bytes(rec.data(), rec_);
          release_buffers();
          continue;
        }
        if (buf_.size() == buf_.capacity()) {
          buf_.reserve(std::min<std::uint64_t>(spool_capacity, 2 * (buf_.size() / rec_) + 1) * rec_);
          note_memory();
        }
        buf_.insert(buf_.end(), rec.begin(), rec.end());
      }
    }
    if (n == 0) throw DataError("cannot build an index from zero points");

    report_.count = n;
    report_.dim = dim_;
    const std::uint64_t internal = count_internal_(n);
    report_.internal_nodes = internal;
    report_.leaves = internal + 1;
    const std::uint64_t node_bytes = internal * sizeof(Node);
    if (node_bytes >= budget_) throw_budget(node_bytes);
    capacity_ = std::min<std::uint64_t>((budget_ - node_bytes) / per_record, UINT32_MAX);
    if (capacity_ < leaf_capacity_) throw_budget(node_bytes);
    report_.in_memory_capacity = capacity_;

    if (!spill && n > capacity_) {
      spill.emplace(new_segment());
      spill_writer.emplace(spill->file.path());
      spill_writer->write_bytes(buf_.data(), buf_.size());
      release_buffers();
    }
    if (spill) {
      spill_writer->close();
      spill->count = n;
      note_spill(static_cast<std::int64_t>(n * rec_));
      report_.out_of_core = true;
    }

    nodes_.resize(internal);
    note_memory();

    AtomicOutput output(out_path_);
    BinaryWriter writer(output.temp_path());
    out_ = &writer;
    writer.write_bytes(kd::kMagic, 4);
    writer.write<std::uint16_t>(kFormatVersion);
    writer.write<std::uint16_t>(static_cast<std::uint16_t>(dim_));
    writer.write<std::uint64_t>(n);
    writer.write<std::uint32_t>(leaf_capacity_);
    writer.write<std::uint64_t>(internal);
    const std::uint64_t leaf_offset = kd::kHeaderBytes + internal * kd::kNodeBytes;
    writer.write<std::uint64_t>(leaf_offset);
    {
      const std::vector<unsigned char> zeros(std::min<std::uint64_t>(internal * kd::kNodeBytes, 1 << 20), 0);
      for (std::uint64_t left = internal * kd::kNodeBytes; left > 0;) {
        const std::size_t chunk = static_cast<std::size_t>(std::min<std::uint64_t>(left, zeros.size()));
        writer.write_bytes(zeros.data(), chunk);
        left -= chunk;
      }
    }
    next_leaf_ = leaf_offset;

    if (spill) {
      build_file(std::move(*spill), bounds, 0);
    } else {
      perm_.resize(n);
      note_memory();
      std::iota(perm_.begin(), perm_.end(), 0U);
      build_memory(perm_.data(), n, 0);
    }

    std::vector<unsigned char> encoded;
    constexpr std::size_t kNodesPerPatch = 4096;
    for (std::size_t first = 0; first < nodes_.size(); first += kNodesPerPatch) {
      const std::size_t last = std::min(nodes_.size(), first + kNodesPerPatch);
      encoded.assign((last - first) * kd::kNodeBytes, 0);
      for (std::size_t i = first; i < last; ++i) kd::encode_node(nodes_[i], encoded.data() + (i - first) * kd::kNodeBytes);
      writer.patch(kd::kHeaderBytes + first * kd::kNodeBytes, encoded.data(), encoded.size());
    }
    writer.close();
    output.commit();
    return report_;
  }

 private:
  [[noreturn]] void throw_budget(std::uint64_t node_bytes) const {
    const std::uint64_t need = node_bytes + std::uint64_t{leaf_capacity_} * (rec_ + 4);
    throw InvalidArgument("memory budget below one page: need at least " + std::to_string(need) + " bytes, got " +
                          std::to_string(budget_));
  }

  const unsigned char* record(std::uint32_t i) const { return buf_.data() + std::uint64_t{i} * rec_; }

  void note_memory() {
    const std::uint64_t tracked = buf_.capacity() + perm_.capacity() * sizeof(std::uint32_t) +
                                  nodes_.capacity() * sizeof(Node);
    report_.peak_tracked_bytes = std::max(report_.peak_tracked_bytes, tracked);
  }

  void release_buffers() {
    std::vector<unsigned char>().swap(buf_);
    std::vector<std::uint32_t>().swap(perm_);
  }

  Segment new_segment() {
    return Segment{TempFile(unique_temp_path(temp_dir_, out_path_.filename().string(), ".seg")), 0};
  }

  void note_spill(std::int64_t delta) {
    spill_bytes_ = static_cast<std::uint64_t>(static_cast<std::int64_t>(spill_bytes_) + delta);
    report_.peak_spill_bytes = std::max(report_.peak_spill_bytes, spill_bytes_);
  }

  // Calls fn(record) for every record of a segment, in file order.
  template <typename Fn>
  void scan(const Segment& seg, Fn&& fn) {
    BinaryReader reader(seg.file.path());
    std::vector<unsigned char> chunk(kChunkRecords * rec_);
    for (std::uint64_t done = 0; done < seg.count;) {
      const std::size_t take = static_cast<std::size_t>(std::min<std::uint64_t>(kChunkRecords, seg.count - done));
      reader.read_bytes(chunk.data(), take * rec_);
      for (std::size_t i = 0; i < take; ++i) fn(chunk.data() + i * rec_);
      done += take;
    }
  }

  void load(const Segment& seg) {
    if (buf_.capacity() < capacity_ * rec_) {
      release_buffers();
      buf_.reserve(capacity_ * rec_);
      perm_.reserve(capacity_);
      note_memory();
    }
    buf_.clear();
    scan(seg, [&](const unsigned char* rec) { buf_.insert(buf_.end(), rec, rec + rec_); });
    perm_.resize(seg.count);
    std::iota(perm_.begin(), perm_.end(), 0U);
  }

  std::uint64_t write_leaf(std::uint32_t* first, std::size_t m) {
    std::sort(first, first + m, [&](std::uint32_t a, std::uint32_t b) { return kd::leaf_less(record(a), record(b), dim_); });
    const std::uint64_t offset = next_leaf_;
    if (out_->position() != offset) throw Error("internal error: leaf page written out of order");
    out_->write<std::uint64_t>(m);
    for (std::size_t i = 0; i < m; ++i) out_->write_bytes(record(first[i]), rec_);
    next_leaf_ += 8 + m * rec_;
    return kd::kLeafFlag | offset;
  }

  std::uint64_t build_memory(std::uint32_t* first, std::size_t m, std::uint64_t node_index) {
    if (m <= leaf_capacity_) return write_leaf(first, m);
    Bounds bounds(dim_);
    for (std::size_t i = 0; i < m; ++i) bounds.add(record(first[i]));
    const std::size_t sd = bounds.widest_dim();
    const std::size_t lc = (m + 1) / 2;
    std::nth_element(first, first + lc - 1, first + m, [&](std::uint32_t a, std::uint32_t b) {
      return kd::compare_for_split(record(a), record(b), sd, dim_) < 0;
    });
    nodes_[node_index].split_dim = static_cast<std::uint16_t>(sd);
    nodes_[node_index].split = kd::record_coord(record(first[lc - 1]), sd);
    const std::uint64_t left = build_memory(first, lc, node_index + 1);
    const std::uint64_t right = build_memory(first + lc, m - lc, node_index + 1 + count_internal_(lc));
    nodes_[node_index].left = left;
    nodes_[node_index].right = right;
    return node_index;
  }

  std::uint32_t key_digit(const unsigned char* rec, std::size_t sd, std::size_t j) const {
    if (j < 2) {
      const std::uint32_t k = kd::ordered_bits(kd::record_coord(rec, sd));
      return j == 0 ? k >> 16 : k & 0xFFFFU;
    }
    if (j < 6) return static_cast<std::uint32_t>(kd::record_id(rec) >> (16 * (5 - j))) & 0xFFFFU;
    const std::size_t c = (j - 6) / 2;
    const std::uint32_t k = kd::ordered_bits(kd::record_coord(rec, c));
    return (j - 6) % 2 == 0 ? k >> 16 : k & 0xFFFFU;
  }

  struct Selection {
    std::vector<unsigned char> median;
    std::uint64_t less = 0;  // records strictly below the median
  };

  // Finds the record of 0-based rank `target` under compare_for_split(sd)
  // with radix passes over 16-bit key digits, finishing in memory once the
  // candidate set fits.
  Selection select(const Segment& seg, std::size_t sd, std::uint64_t target) {
    const std::size_t digits = 6 + 2 * dim_;
    std::vector<std::uint32_t> prefix;
    std::uint64_t below = 0;
    std::uint64_t candidates = seg.count;
    auto matches = [&](const unsigned char* rec) {
      for (std::size_t j = 0; j < prefix.size(); ++j) {
        if (key_digit(rec, sd, j) != prefix[j]) return false;
      }
      return true;
    };
    while (true) {
      if (candidates <= capacity_) {
        if (buf_.capacity() < capacity_ * rec_) {
          release_buffers();
          buf_.reserve(capacity_ * rec_);
          perm_.reserve(capacity_);
          note_memory();
        }
        buf_.clear();
        scan(seg, [&](const unsigned char* rec) {
          if (matches(rec)) buf_.insert(buf_.end(), rec, rec + rec_);
        });
        ++report_.selection_passes;
        perm_.resize(candidates);
        std::iota(perm_.begin(), perm_.end(), 0U);
        const auto less = [&](std::uint32_t a, std::uint32_t b) {
          return kd::compare_for_split(record(a), record(b), sd, dim_) < 0;
        };
        std::nth_element(perm_.begin(), perm_.begin() + static_cast<std::ptrdiff_t>(target), perm_.end(), less);
        Selection out;
        const unsigned char* m = record(perm_[target]);
        out.median.assign(m, m + rec_);
        out.less = below;
        for (std::uint32_t i : perm_) {
          if (kd::compare_for_split(record(i), m, sd, dim_) < 0) ++out.less;
        }
        return out;
      }
      if (prefix.size() == digits) {
        // Every candidate carries the same full key, i.e. they are identical records.
        Selection out;
        scan(seg, [&](const unsigned char* rec) {
          if (out.median.empty() && matches(rec)) out.median.assign(rec, rec + rec_);
        });
        ++report_.selection_passes;
        out.less = below;
        return out;
      }
      if (histogram_.empty()) histogram_.resize(1 << 16);
      std::fill(histogram_.begin(), histogram_.end(), 0);
      const std::size_t j = prefix.size();
      scan(seg, [&](const unsigned char* rec) {
        if (matches(rec)) ++histogram_[key_digit(rec, sd, j)];
      });
      ++report_.selection_passes;
      std::uint64_t acc = 0;
      std::uint32_t bucket = 0;
      for (; bucket < histogram_.size(); ++bucket) {
        if (target < acc + histogram_[bucket]) break;
        acc += histogram_[bucket];
      }
      below += acc;
      target -= acc;
      candidates = histogram_[bucket];
      prefix.push_back(bucket);
    }
  }

  std::uint64_t build_file(Segment seg, const Bounds& bounds, std::uint64_t node_index) {
    const std::uint64_t m = seg.count;
    if (m <= capacity_) {
      load(seg);
      seg.file.remove();
      note_spill(-static_cast<std::int64_t>(m * rec_));
      return build_memory(perm_.data(), m, node_index);
    }
    const std::size_t sd = bounds.widest_dim();
    const std::uint64_t lc = (m + 1) / 2;
    const Selection sel = select(seg, sd, lc - 1);
    const unsigned char* median = sel.median.data();

    Segment left = new_segment();
    Segment right = new_segment();
    Bounds left_bounds(dim_);
    Bounds right_bounds(dim_);
    {
      BinaryWriter left_writer(left.file.path());
      BinaryWriter right_writer(right.file.path());
      std::uint64_t equal_left = lc - sel.less;
      scan(seg, [&](const unsigned char* rec) {
        const int c = kd::compare_for_split(rec, median, sd, dim_);
        if (c < 0 || (c == 0 && equal_left > 0)) {
          if (c == 0) --equal_left;
          left_writer.write_bytes(rec, rec_);
          left_bounds.add(rec);
          ++left.count;
        } else {
          right_writer.write_bytes(rec, rec_);
          right_bounds.add(rec);
          ++right.count;
        }
      });
      left_writer.close();
      right_writer.close();
    }
    if (left.count != lc) throw Error("internal error: external partition produced the wrong split");
    note_spill(static_cast<std::int64_t>(m * rec_));
    seg.file.remove();
    note_spill(-static_cast<std::int64_t>(m * rec_));

    nodes_[node_index].split_dim = static_cast<std::uint16_t>(sd);
    nodes_[node_index].split = kd::record_coord(median, sd);
    const std::uint64_t right_index = node_index + 1 + count_internal_(lc);
    const std::uint64_t l = build_file(std::move(left), left_bounds, node_index + 1);
    const std::uint64_t r = build_file(std::move(right), right_bounds, right_index);
    nodes_[node_index].left = l;
    nodes_[node_index].right = r;
    return node_index;
  }

  std::size_t dim_;
  std::uint64_t rec_;
  std::uint32_t leaf_capacity_;
  std::uint64_t budget_;
  fs::path out_path_;
  fs::path temp_dir_;
  InternalCounter count_internal_;

  std::uint64_t capacity_ = 0;
  std::vector<unsigned char> buf_;
  std::vector<std::uint32_t> perm_;
  std::vector<Node> nodes_;
  std::vector<std::uint64_t> histogram_;
  BinaryWriter* out_ = nullptr;
  std::uint64_t next_leaf_ = 0;
  std::uint64_t spill_bytes_ = 0;
  BuildReport report_;
};

}  // namespace

std::uint64_t internal_node_count(std::uint64_t m, std::uint32_t leaf_capacity) {
  if (leaf_capacity == 0) throw InvalidArgument("leaf capacity must be at least 1");
  InternalCounter counter(leaf_capacity);
  return counter(m);
}

BuildReport build_index(PointSource& source, const fs::path& out_path, const BuildOptions& options) {
  const std::size_t dim = source.dim();
  if (dim == 0 || dim > kMaxEmbeddingDim) {
    throw InvalidArgument("index dimension must be in [1, " + std::to_string(kMaxEmbeddingDim) + "]");
  }
  if (options.leaf_capacity == 0) throw InvalidArgument("leaf capacity must be at least 1");
  Builder builder(dim, options, out_path);
  return builder.run(source);
}

}  // namespace chemkd

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "chemkd/distance.hpp"

namespace chemkd {

inline constexpr std::uint32_t kDefaultLeafCapacity = 256;
inline constexpr std::uint64_t kDefaultMemoryBudget = std::uint64_t{2} << 30;
/// Dimensions above this still work but a k-d tree degrades towards a scan.
inline constexpr std::size_t kRecommendedMaxDim = 20;

/// Streaming input for the index builder.
class PointSource {
 public:
  virtual ~PointSource() = default;
  virtual std::size_t dim() const = 0;
  /// Number of records, if known in advance (used only to size buffers).
  virtual std::optional<std::uint64_t> size_hint() const { return std::nullopt; }
  virtual bool next(std::uint64_t& id, std::span<float> coords) = 0;
};

/// Reads an EMB1 file record by record.
class EmbeddingFileSource : public PointSource {
 public:
  explicit EmbeddingFileSource(const std::filesystem::path& path);
  ~EmbeddingFileSource() override;
  std::size_t dim() const override;
  std::optional<std::uint64_t> size_hint() const override;
  bool next(std::uint64_t& id, std::span<float> coords) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Points held by the caller: ids[i] with coords[i*dim, (i+1)*dim).
class MemoryPointSource : public PointSource {
 public:
  MemoryPointSource(std::span<const std::uint64_t> ids, std::span<const float> coords, std::size_t dim);
  std::size_t dim() const override { return dim_; }
  std::optional<std::uint64_t> size_hint() const override { return ids_.size(); }
  bool next(std::uint64_t& id, std::span<float> coords) override;

 private:
  std::span<const std::uint64_t> ids_;
  std::span<const float> coords_;
  std::size_t dim_;
  std::size_t pos_ = 0;
};

struct BuildOptions {
  std::uint32_t leaf_capacity = kDefaultLeafCapacity;
  /// Bytes available for points in memory plus the internal-node array.
  /// Read/write buffers and the selection histogram (a few MiB) come on top.
  std::uint64_t memory_budget = kDefaultMemoryBudget;
  /// Where spill files go; defaults to the output file's directory.
  std::filesystem::path temp_dir;
};

struct BuildReport {
  std::uint64_t count = 0;
  std::size_t dim = 0;
  std::uint64_t internal_nodes = 0;
  std::uint64_t leaves = 0;
  bool out_of_core = false;
  /// Largest number of records held in memory at once.
  std::uint64_t in_memory_capacity = 0;
  /// Peak of the accounted allocations (point buffer, permutation, nodes).
  std::uint64_t peak_tracked_bytes = 0;
  /// Radix-selection passes over spill files.
  std::uint64_t selection_passes = 0;
  std::uint64_t peak_spill_bytes = 0;
};

/// Bulk-builds an index file.
///
/// Each internal node splits on the dimension of largest spread (lowest
/// dimension on ties) at the lower median: the left child receives the
/// ceil(m/2) smallest points under the order (coordinate, id, all coordinates),
/// so duplicates never stall the recursion. Leaves are stored sorted by
/// (id, coordinates). The file is a function of the input multiset, leaf
/// capacity and dimension only; input order and memory budget do not change a
/// byte of it.
BuildReport build_index(PointSource& source, const std::filesystem::path& out_path,
                        const BuildOptions& options = {});

/// Number of internal nodes of a tree over m points.
std::uint64_t internal_node_count(std::uint64_t m, std::uint32_t leaf_capacity);

struct KnnStats {
  std::uint64_t distance_computations = 0;
  std::uint64_t leaves_visited = 0;
  std::uint64_t nodes_visited = 0;
};

struct IndexStats {
  std::uint64_t count = 0;
  std::size_t dim = 0;
  std::uint32_t leaf_capacity = 0;
  std::uint64_t internal_nodes = 0;
  std::uint64_t leaves = 0;
  std::uint64_t height = 0;
  std::uint64_t bytes = 0;
};

/// Read-only handle on an index file. Internal nodes are loaded at open;
/// leaf pages are read on demand with pread, so one handle can serve any
/// number of threads.
class KdIndex {
 public:
  static KdIndex open(const std::filesystem::path& path);
  ~KdIndex();
  KdIndex(KdIndex&&) noexcept;
  KdIndex& operator=(KdIndex&&) noexcept;

  std::size_t dim() const;
  std::uint64_t count() const;
  std::uint32_t leaf_capacity() const;
  std::uint64_t internal_nodes() const;

  /// Exact k nearest neighbours ordered by (distance, id).
  std::vector<Neighbor> knn(std::span<const float> query, std::size_t k, KnnStats* stats = nullptr) const;

  /// Ids of the points inside the closed box [lo, hi], ascending.
  std::vector<std::uint64_t> range(std::span<const float> lo, std::span<const float> hi) const;

  /// Counts from a walk of the internal nodes (no leaf reads).
  IndexStats stats() const;

  /// Reads every leaf and checks the split-plane invariant, leaf sizes, page
  /// layout and total count. Throws FormatError on the first violation.
  IndexStats audit() const;

  /// Bytes a query keeps resident: node array plus one leaf page buffer.
  std::uint64_t resident_bytes() const;

  struct Impl;

 private:
  explicit KdIndex(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

}  // namespace chemkd

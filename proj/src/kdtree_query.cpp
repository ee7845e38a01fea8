#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <string>
#include <system_error>

#include "chemkd/error.hpp"
#include "chemkd/formats.hpp"
#include "chemkd/kdtree.hpp"
#include "kdtree_format.hpp"

namespace chemkd {

namespace fs = std::filesystem;

namespace {

using kd::Node;

bool is_leaf(std::uint64_t ref) { return (ref & kd::kLeafFlag) != 0; }
std::uint64_t leaf_offset(std::uint64_t ref) { return ref & ~kd::kLeafFlag; }

void check_query(std::span<const float> q, std::size_t dim, const char* what) {
  if (q.size() != dim) {
    throw InvalidArgument(std::string(what) + " has dimension " + std::to_string(q.size()) + ", index has " +
                          std::to_string(dim));
  }
  for (float c : q) {
    if (!std::isfinite(c)) throw InvalidArgument(std::string(what) + " has a non-finite coordinate");
  }
}

}  // namespace

struct KdIndex::Impl {
  fs::path path;
  int fd = -1;
  std::size_t dim = 0;
  std::uint64_t count = 0;
  std::uint32_t leaf_capacity = 0;
  std::uint64_t leaf_section = 0;
  std::uint64_t file_size = 0;
  std::uint64_t rec = 0;
  std::vector<Node> nodes;

  ~Impl() {
    if (fd >= 0) ::close(fd);
  }

  std::uint64_t root() const { return nodes.empty() ? (kd::kLeafFlag | leaf_section) : 0; }

  void pread_exact(void* out, std::size_t size, std::uint64_t offset) const {
    auto* p = static_cast<unsigned char*>(out);
    while (size > 0) {
      const ssize_t got = ::pread(fd, p, size, static_cast<off_t>(offset));
      if (got < 0) {
        if (errno == EINTR) continue;
        throw IoError("read failed on " + path.string() + ": " + std::generic_category().message(errno));
      }
      if (got == 0) throw FormatError("truncated index " + path.string());
      p += got;
      size -= static_cast<std::size_t>(got);
      offset += static_cast<std::uint64_t>(got);
    }
  }

  // Reads one leaf page into `page` and returns its record count.
  std::uint64_t read_leaf(std::uint64_t ref, std::vector<unsigned char>& page) const {
    const std::uint64_t offset = leaf_offset(ref);
    unsigned char head[8];
    pread_exact(head, 8, offset);
    const std::uint64_t n = le::load<std::uint64_t>(head);
    if (n == 0 || n > leaf_capacity || offset + 8 + n * rec > file_size) {
      throw FormatError("corrupt leaf page at offset " + std::to_string(offset) + " in " + path.string());
    }
    page.resize(n * rec);
    pread_exact(page.data(), page.size(), offset + 8);
    return n;
  }

  const Node& node(std::uint64_t ref) const { return nodes[ref]; }
};

KdIndex::KdIndex(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
KdIndex::~KdIndex() = default;
KdIndex::KdIndex(KdIndex&&) noexcept = default;
KdIndex& KdIndex::operator=(KdIndex&&) noexcept = default;

KdIndex KdIndex::open(const fs::path& path) {
  auto impl = std::make_unique<Impl>();
  impl->path = path;
  impl->fd = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
  if (impl->fd < 0) throw IoError("cannot open " + path.string() + ": " + std::generic_category().message(errno));
  struct stat st {};
  if (::fstat(impl->fd, &st) != 0) throw IoError("cannot stat " + path.string());
  impl->file_size = static_cast<std::uint64_t>(st.st_size);
  if (impl->file_size < kd::kHeaderBytes) throw FormatError(path.string() + " is too short to be an index");

  unsigned char header[kd::kHeaderBytes];
  impl->pread_exact(header, sizeof header, 0);
  if (std::memcmp(header, kd::kMagic, 4) != 0) throw FormatError(path.string() + " is not a KDT1 index");
  const auto version = le::load<std::uint16_t>(header + 4);
  if (version != kFormatVersion) {
    throw FormatError(path.string() + ": unsupported index version " + std::to_string(version));
  }
  impl->dim = le::load<std::uint16_t>(header + 6);
  impl->count = le::load<std::uint64_t>(header + 8);
  impl->leaf_capacity = le::load<std::uint32_t>(header + 16);
  const auto internal = le::load<std::uint64_t>(header + 20);
  impl->leaf_section = le::load<std::uint64_t>(header + 28);
  impl->rec = kd::record_bytes(impl->dim);

  if (impl->dim == 0 || impl->dim > kMaxEmbeddingDim || impl->count == 0 || impl->leaf_capacity == 0) {
    throw FormatError(path.string() + ": invalid index header");
  }
  if (internal >= impl->count || impl->leaf_section != kd::kHeaderBytes + internal * kd::kNodeBytes) {
    throw FormatError(path.string() + ": inconsistent node section");
  }
  // A binary tree with I internal nodes has I + 1 leaves, so the size is fixed.
  const std::uint64_t expected = impl->leaf_section + (internal + 1) * 8 + impl->count * impl->rec;
  if (impl->file_size != expected) {
    throw FormatError(path.string() + ": file size " + std::to_string(impl->file_size) + " does not match header (" +
                      std::to_string(expected) + "); truncated or corrupt");
  }

  impl->nodes.resize(internal);
  std::vector<unsigned char> chunk;
  constexpr std::uint64_t kNodesPerRead = 4096;
  for (std::uint64_t first = 0; first < internal; first += kNodesPerRead) {
    const std::uint64_t n = std::min(kNodesPerRead, internal - first);
    chunk.resize(n * kd::kNodeBytes);
    impl->pread_exact(chunk.data(), chunk.size(), kd::kHeaderBytes + first * kd::kNodeBytes);
    for (std::uint64_t i = 0; i < n; ++i) {
      Node node = kd::decode_node(chunk.data() + i * kd::kNodeBytes);
      for (std::uint64_t child : {node.left, node.right}) {
        const bool ok = is_leaf(child) ? (leaf_offset(child) >= impl->leaf_section && leaf_offset(child) < impl->file_size)
                                       : (child > first + i && child < internal);
        if (!ok) throw FormatError(path.string() + ": corrupt child reference in node " + std::to_string(first + i));
      }
      if (node.split_dim >= impl->dim || !std::isfinite(node.split)) {
        throw FormatError(path.string() + ": corrupt split in node " + std::to_string(first + i));
      }
      impl->nodes[first + i] = node;
    }
  }
  return KdIndex(std::move(impl));
}

std::size_t KdIndex::dim() const { return impl_->dim; }
std::uint64_t KdIndex::count() const { return impl_->count; }
std::uint32_t KdIndex::leaf_capacity() const { return impl_->leaf_capacity; }
std::uint64_t KdIndex::internal_nodes() const { return impl_->nodes.size(); }

std::uint64_t KdIndex::resident_bytes() const {
  return impl_->nodes.capacity() * sizeof(Node) + std::uint64_t{impl_->leaf_capacity} * impl_->rec;
}

namespace {

class KnnSearch {
 public:
  KnnSearch(const KdIndex::Impl& index, std::span<const float> query, std::size_t k)
      : index_(index), query_(query), top_(k), gap_(index.dim, 0.0) {}

  void run(std::uint64_t ref) {
    ++stats.nodes_visited;
    if (is_leaf(ref)) {
      ++stats.leaves_visited;
      const std::uint64_t n = index_.read_leaf(ref, page_);
      std::vector<float>& coords = coords_;
      coords.resize(index_.dim);
      for (std::uint64_t i = 0; i < n; ++i) {
        const unsigned char* rec = page_.data() + i * index_.rec;
        for (std::size_t c = 0; c < index_.dim; ++c) coords[c] = kd::record_coord(rec, c);
        top_.offer(squared_distance(query_, coords), kd::record_id(rec));
      }
      stats.distance_computations += n;
      return;
    }
    const Node& node = index_.node(ref);
    const std::size_t sd = node.split_dim;
    const double diff = static_cast<double>(query_[sd]) - static_cast<double>(node.split);
    const std::uint64_t near = diff <= 0.0 ? node.left : node.right;
    const std::uint64_t far = diff <= 0.0 ? node.right : node.left;
    run(near);

    // Lower bound on the squared distance to any point of the far cell. It is
    // summed in the same order and precision as squared_distance, so by
    // monotone rounding it never exceeds a computed distance in that cell, and
    // the strict comparison keeps equal-distance candidates (ties by id) reachable.
    const double saved = gap_[sd];
    gap_[sd] = diff * diff;
    double bound = 0.0;
    for (double g : gap_) bound += g;
    if (!top_.full() || bound <= top_.worst_key()) run(far);
    gap_[sd] = saved;
  }

  std::vector<Neighbor> result() { return to_euclidean_neighbors(top_.take_sorted()); }

  KnnStats stats;

 private:
  const KdIndex::Impl& index_;
  std::span<const float> query_;
  TopK top_;
  std::vector<double> gap_;
  std::vector<unsigned char> page_;
  std::vector<float> coords_;
};

}  // namespace

std::vector<Neighbor> KdIndex::knn(std::span<const float> query, std::size_t k, KnnStats* stats) const {
  check_query(query, impl_->dim, "query");
  if (k == 0) throw InvalidArgument("k must be at least 1");
  KnnSearch search(*impl_, query, std::min<std::uint64_t>(k, impl_->count));
  search.run(impl_->root());
  if (stats) *stats = search.stats;
  return search.result();
}

std::vector<std::uint64_t> KdIndex::range(std::span<const float> lo, std::span<const float> hi) const {
  check_query(lo, impl_->dim, "lower bound");
  check_query(hi, impl_->dim, "upper bound");
  for (std::size_t i = 0; i < impl_->dim; ++i) {
    if (lo[i] > hi[i]) throw InvalidArgument("inverted bounds in dimension " + std::to_string(i));
  }
  std::vector<std::uint64_t> ids;
  std::vector<unsigned char> page;
  std::vector<std::uint64_t> stack{impl_->root()};
  while (!stack.empty()) {
    const std::uint64_t ref = stack.back();
    stack.pop_back();
    if (is_leaf(ref)) {
      const std::uint64_t n = impl_->read_leaf(ref, page);
      for (std::uint64_t i = 0; i < n; ++i) {
        const unsigned char* rec = page.data() + i * impl_->rec;
        bool inside = true;
        for (std::size_t c = 0; c < impl_->dim && inside; ++c) {
          const float v = kd::record_coord(rec, c);
          inside = lo[c] <= v && v <= hi[c];
        }
        if (inside) ids.push_back(kd::record_id(rec));
      }
      continue;
    }
    const Node& node = impl_->node(ref);
    if (hi[node.split_dim] >= node.split) stack.push_back(node.right);
    if (lo[node.split_dim] <= node.split) stack.push_back(node.left);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

IndexStats KdIndex::stats() const {
  IndexStats s;
  s.count = impl_->count;
  s.dim = impl_->dim;
  s.leaf_capacity = impl_->leaf_capacity;
  s.internal_nodes = impl_->nodes.size();
  s.bytes = impl_->file_size;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> stack{{impl_->root(), 0}};
  while (!stack.empty()) {
    const auto [ref, depth] = stack.back();
    stack.pop_back();
    if (is_leaf(ref)) {
      ++s.leaves;
      s.height = std::max(s.height, depth);
      continue;
    }
    stack.emplace_back(impl_->node(ref).right, depth + 1);
    stack.emplace_back(impl_->node(ref).left, depth + 1);
  }
  if (s.leaves != s.internal_nodes + 1) throw FormatError(impl_->path.string() + ": node graph is not a binary tree");
  return s;
}

IndexStats KdIndex::audit() const {
  IndexStats s = stats();
  const std::string where = impl_->path.string() + ": ";
  struct Frame {
    std::uint64_t ref;
    std::vector<float> lo;  // points must satisfy lo <= coord <= hi
    std::vector<float> hi;
  };
  const float inf = std::numeric_limits<float>::infinity();
  std::vector<Frame> stack;
  stack.push_back({impl_->root(), std::vector<float>(impl_->dim, -inf), std::vector<float>(impl_->dim, inf)});
  std::vector<unsigned char> page;
  std::uint64_t points = 0;
  std::uint64_t expected_offset = impl_->leaf_section;
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (is_leaf(f.ref)) {
      if (leaf_offset(f.ref) != expected_offset) throw FormatError(where + "leaf pages are not stored in tree order");
      const std::uint64_t n = impl_->read_leaf(f.ref, page);
      for (std::uint64_t i = 0; i < n; ++i) {
        const unsigned char* rec = page.data() + i * impl_->rec;
        for (std::size_t c = 0; c < impl_->dim; ++c) {
          const float v = kd::record_coord(rec, c);
          if (!std::isfinite(v)) throw FormatError(where + "non-finite coordinate in a leaf");
          if (v < f.lo[c] || v > f.hi[c]) {
            throw FormatError(where + "point " + std::to_string(kd::record_id(rec)) + " violates a split plane");
          }
        }
        if (i > 0 && kd::leaf_less(rec, rec - impl_->rec, impl_->dim)) {
          throw FormatError(where + "leaf records are not in canonical order");
        }
      }
      points += n;
      expected_offset += 8 + n * impl_->rec;
      continue;
    }
    const Node& node = impl_->node(f.ref);
    Frame right{node.right, f.lo, f.hi};
    right.lo[node.split_dim] = std::max(right.lo[node.split_dim], node.split);
    Frame left{node.left, std::move(f.lo), std::move(f.hi)};
    left.hi[node.split_dim] = std::min(left.hi[node.split_dim], node.split);
    stack.push_back(std::move(right));
    stack.push_back(std::move(left));
  }
  if (points != impl_->count) {
    throw FormatError(where + "leaves hold " + std::to_string(points) + " points, header says " +
                      std::to_string(impl_->count));
  }
  if (expected_offset != impl_->file_size) throw FormatError(where + "unexpected bytes after the last leaf");
  return s;
}

}  // namespace chemkd

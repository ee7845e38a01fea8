#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace chemkd {

/// Sum of squared coordinate differences, accumulated in double. The k-d tree
/// and the brute-force scan both rank by this value so their orderings agree
/// bit for bit. Lengths must match (unchecked).
inline double squared_distance(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return acc;
}

/// Checked Euclidean distance: throws InvalidArgument on a length mismatch and
/// DataError on non-finite input.
double euclidean_distance(std::span<const double> a, std::span<const double> b);
double euclidean_distance(std::span<const float> a, std::span<const float> b);

struct Neighbor {
  std::uint64_t id = 0;
  double distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Bounded max-heap keeping the k smallest (key, id) pairs. The key is any
/// monotone transform of the distance (squared Euclidean, Tanimoto).
class TopK {
 public:
  explicit TopK(std::size_t k);

  std::size_t k() const { return k_; }
  std::size_t size() const { return heap_.size(); }
  bool full() const { return heap_.size() == k_; }
  /// Key of the current k-th best; only meaningful when full().
  double worst_key() const { return heap_.front().key; }

  /// Offers a candidate; returns true if it was kept.
  bool offer(double key, std::uint64_t id);
  void merge(const TopK& other);

  struct Entry {
    double key;
    std::uint64_t id;
  };
  /// Entries sorted by (key, id) ascending. Leaves the heap empty.
  std::vector<Entry> take_sorted();

 private:
  std::size_t k_;
  std::vector<Entry> heap_;
};

/// Converts sorted squared-distance entries into Neighbors (distance = sqrt(key)).
std::vector<Neighbor> to_euclidean_neighbors(const std::vector<TopK::Entry>& entries);

}  // namespace chemkd

#include "chemkd/distance.hpp"

#include <algorithm>
#include <cmath>

#include "chemkd/error.hpp"

namespace chemkd {

namespace {

bool entry_less(const TopK::Entry& a, const TopK::Entry& b) {
  return a.key < b.key || (a.key == b.key && a.id < b.id);
}

template <typename T>
double checked_euclidean(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) throw InvalidArgument("vectors have different lengths");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) throw DataError("non-finite coordinate");
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  return checked_euclidean(a, b);
}

double euclidean_distance(std::span<const float> a, std::span<const float> b) {
  return checked_euclidean(a, b);
}

TopK::TopK(std::size_t k) : k_(k) {
  if (k == 0) throw InvalidArgument("k must be at least 1");
  heap_.reserve(std::min<std::size_t>(k, 1 << 16));
}

bool TopK::offer(double key, std::uint64_t id) {
  const Entry e{key, id};
  if (heap_.size() < k_) {
    heap_.push_back(e);
    std::push_heap(heap_.begin(), heap_.end(), entry_less);
    return true;
  }
  if (!entry_less(e, heap_.front())) return false;
  std::pop_heap(heap_.begin(), heap_.end(), entry_less);
  heap_.back() = e;
  std::push_heap(heap_.begin(), heap_.end(), entry_less);
  return true;
}

void TopK::merge(const TopK& other) {
  for (const Entry& e : other.heap_) offer(e.key, e.id);
}

std::vector<TopK::Entry> TopK::take_sorted() {
  std::vector<Entry> out = std::move(heap_);
  heap_.clear();
  std::sort(out.begin(), out.end(), entry_less);
  return out;
}

std::vector<Neighbor> to_euclidean_neighbors(const std::vector<TopK::Entry>& entries) {
  std::vector<Neighbor> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back({e.id, std::sqrt(e.key)});
  return out;
}

}  // namespace chemkd

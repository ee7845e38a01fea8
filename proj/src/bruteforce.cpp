#include "chemkd/bruteforce.hpp"

#include <cmath>
#include <string>

#include "chemkd/error.hpp"
#include "chemkd/formats.hpp"

namespace chemkd {

namespace fs = std::filesystem;

namespace {

void check_finite(std::span<const float> v) {
  for (float c : v) {
    if (!std::isfinite(c)) throw InvalidArgument("query has a non-finite coordinate");
  }
}

double squared_distance_reals(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

std::string_view metric_name(Metric metric) {
  return metric == Metric::kEuclidean ? "euclidean" : "tanimoto";
}

Metric parse_metric(std::string_view name) {
  if (name == "euclidean") return Metric::kEuclidean;
  if (name == "tanimoto") return Metric::kTanimoto;
  throw InvalidArgument("unknown metric '" + std::string(name) + "' (expected euclidean or tanimoto)");
}

std::vector<Neighbor> bf_knn(std::span<const std::uint64_t> ids, std::span<const float> coords, std::size_t dim,
                             std::span<const float> query, std::size_t k) {
  if (dim == 0 || coords.size() != ids.size() * dim) throw InvalidArgument("coordinate array does not match ids x dim");
  if (query.size() != dim) throw InvalidArgument("query dimension does not match the database");
  if (ids.empty()) throw DataError("empty database");
  check_finite(query);
  TopK top(k);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    top.offer(squared_distance(query, coords.subspan(i * dim, dim)), ids[i]);
  }
  return to_euclidean_neighbors(top.take_sorted());
}

std::vector<Neighbor> bf_knn_file(const fs::path& embeddings, std::span<const float> query, std::size_t k) {
  auto result = bf_knn_file_batch(embeddings, query, k);
  return std::move(result.front());
}

std::vector<std::vector<Neighbor>> bf_knn_file_batch(const fs::path& embeddings, std::span<const float> queries,
                                                     std::size_t k) {
  EmbeddingReader reader(embeddings);
  const std::size_t dim = reader.dim();
  if (queries.empty() || queries.size() % dim != 0) {
    throw InvalidArgument("query dimension does not match the database dimension " + std::to_string(dim));
  }
  check_finite(queries);
  if (reader.count() == 0) throw DataError("empty database " + embeddings.string());
  const std::size_t nq = queries.size() / dim;
  std::vector<TopK> tops(nq, TopK(k));
  std::vector<float> coords(dim);
  std::uint64_t id = 0;
  while (reader.next(id, coords)) {
    for (std::size_t q = 0; q < nq; ++q) tops[q].offer(squared_distance(queries.subspan(q * dim, dim), coords), id);
  }
  std::vector<std::vector<Neighbor>> out;
  out.reserve(nq);
  for (TopK& top : tops) out.push_back(to_euclidean_neighbors(top.take_sorted()));
  return out;
}

std::vector<Neighbor> bf_knn_fingerprints(const fs::path& fingerprints, const Fingerprint256& query, std::size_t k,
                                          Metric metric) {
  FingerprintReader reader(fingerprints);
  if (metric == Metric::kTanimoto &&
      (reader.kind() != FingerprintKind::kBinary || query.kind != FingerprintKind::kBinary)) {
    throw InvalidArgument("tanimoto distance needs binary fingerprints on both sides");
  }
  if (reader.count() == 0) throw DataError("empty database " + fingerprints.string());
  TopK top(k);
  Fingerprint256 fp;
  std::uint64_t id = 0;
  if (metric == Metric::kTanimoto) {
    while (reader.next(id, fp)) top.offer(tanimoto_distance(query, fp), id);
    std::vector<Neighbor> out;
    for (const auto& e : top.take_sorted()) out.push_back({e.id, e.key});
    return out;
  }
  const std::vector<double> q = query.to_reals();
  while (reader.next(id, fp)) top.offer(squared_distance_reals(q, fp.to_reals()), id);
  return to_euclidean_neighbors(top.take_sorted());
}

}  // namespace chemkd

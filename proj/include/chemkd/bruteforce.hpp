#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "chemkd/distance.hpp"
#include "chemkd/fingerprint.hpp"

namespace chemkd {

enum class Metric { kEuclidean, kTanimoto };

std::string_view metric_name(Metric metric);
/// "euclidean" or "tanimoto"; throws InvalidArgument otherwise.
Metric parse_metric(std::string_view name);

/// Exact k nearest neighbours by linear scan, ordered by (distance, id).
/// Memory is O(k); the ordering matches KdIndex::knn bit for bit.
std::vector<Neighbor> bf_knn(std::span<const std::uint64_t> ids, std::span<const float> coords,
                             std::size_t dim, std::span<const float> query, std::size_t k);

/// Streams an EMB1 file once per call.
std::vector<Neighbor> bf_knn_file(const std::filesystem::path& embeddings, std::span<const float> query,
                                  std::size_t k);

/// One streaming pass over an EMB1 file answering every query (row-major,
/// dim floats each). Memory is O(queries x k).
std::vector<std::vector<Neighbor>> bf_knn_file_batch(const std::filesystem::path& embeddings,
                                                     std::span<const float> queries, std::size_t k);

/// Streams an FPB1/FPC1 file. Tanimoto needs binary fingerprints on both
/// sides; Euclidean treats either kind as a 256-d real vector. Throws
/// InvalidArgument on a metric/type mismatch.
std::vector<Neighbor> bf_knn_fingerprints(const std::filesystem::path& fingerprints, const Fingerprint256& query,
                                          std::size_t k, Metric metric);

}  // namespace chemkd

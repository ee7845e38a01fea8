#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chemkd/molgraph.hpp"

namespace chemkd {

// ---- query-hit GED curves ----

/// value[k-1] = mean over queries of the mean approx_ged(query, hit) over the
/// first k hits. Throws InvalidArgument if a hit list is shorter than k_max.
std::vector<double> ged_curve(std::span<const MolecularGraph> queries,
                              std::span<const std::vector<MolecularGraph>> hits, std::size_t k_max);

/// Trailing running average over `window` points, for plotting only.
std::vector<double> running_average(std::span<const double> series, std::size_t window);

// ---- virtual screening AUROC ----

enum class Label : std::uint8_t { kActive, kDecoy };

struct LabeledEmbeddings {
  std::size_t dim = 0;
  std::vector<std::uint64_t> ids;
  std::vector<float> coords;  // ids.size() x dim, row-major
  std::vector<Label> labels;

  std::size_t size() const { return ids.size(); }
  std::span<const float> point(std::size_t i) const { return {coords.data() + i * dim, dim}; }
  void add(std::uint64_t id, std::span<const float> x, Label label);
};

/// Mann-Whitney AUROC kept as the exact fraction numerator / denominator,
/// where numerator = 2 * (active-over-decoy pairs) + tied pairs and
/// denominator = 2 * actives * decoys.
struct Auroc {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;
  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
};

/// Higher score ranks first. Throws InvalidArgument if either class is empty.
Auroc auroc_from_scores(std::span<const double> active_scores, std::span<const double> decoy_scores);

/// Scores every database record by its distance to the nearest query active
/// (closer is better) and returns the AUROC of actives against decoys.
Auroc vs_auroc(const LabeledEmbeddings& database, std::span<const float> query_actives);

LabeledEmbeddings swap_labels(LabeledEmbeddings data);

struct ScreeningSplit {
  LabeledEmbeddings database;
  std::vector<float> queries;  // row-major
};

/// Moves a seeded random fraction of the actives (at least one, leaving at
/// least one) out of the database to serve as queries.
ScreeningSplit split_query_actives(const LabeledEmbeddings& data, double query_fraction, std::uint64_t seed);

/// Actives uniform in [0,1]^d, decoys uniform in [10,11]^d: any query drawn
/// from the active box ranks every active above every decoy.
LabeledEmbeddings synthetic_separable(std::size_t actives, std::size_t decoys, std::size_t dim, std::uint64_t seed);

/// Gaussian points whose labels are assigned independently of position.
LabeledEmbeddings synthetic_shuffled(std::size_t n, std::size_t dim, double active_fraction, std::uint64_t seed);

/// Reads an EMB1 file plus a TSV of (id, label) rows; labels are
/// active/decoy or 1/0. Every embedding id must have exactly one label.
LabeledEmbeddings load_labeled_embeddings(const std::filesystem::path& embeddings,
                                          const std::filesystem::path& labels);

// ---- timing ----

enum class SearchMethod { kKdTree, kBruteForce };

std::string_view search_method_name(SearchMethod method);

struct TimingReport {
  std::string method;
  std::uint64_t n = 0;
  std::size_t dim = 0;
  std::size_t k = 0;
  std::vector<double> samples;  // seconds per query
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation

  /// method, n, d, k, mean_s, std_s separated by tabs.
  std::string tsv_row() const;
};

inline constexpr std::string_view kTimingHeader = "method\tn\td\tk\tmean_s\tstd_s";

/// Times each query `repeats` times after one untimed warm-up pass, on the
/// calling thread. `data` is a KDT1 index for kKdTree or an EMB1 file for
/// kBruteForce.
TimingReport timing_run(SearchMethod method, const std::filesystem::path& data, std::span<const float> queries,
                        std::size_t k, std::size_t repeats);

// ---- synthetic data ----

std::vector<float> uniform_points(std::size_t n, std::size_t dim, std::uint64_t seed);
std::vector<float> gaussian_points(std::size_t n, std::size_t dim, std::uint64_t seed);

}  // namespace chemkd

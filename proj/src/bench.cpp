#include "chemkd/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <unordered_map>

#include "chemkd/bruteforce.hpp"
#include "chemkd/distance.hpp"
#include "chemkd/error.hpp"
#include "chemkd/formats.hpp"
#include "chemkd/ged.hpp"
#include "chemkd/kdtree.hpp"
#include "chemkd/random.hpp"

namespace chemkd {

namespace fs = std::filesystem;

std::vector<double> ged_curve(std::span<const MolecularGraph> queries,
                              std::span<const std::vector<MolecularGraph>> hits, std::size_t k_max) {
  if (queries.empty()) throw InvalidArgument("ged_curve needs at least one query");
  if (hits.size() != queries.size()) throw InvalidArgument("need one hit list per query");
  if (k_max == 0) throw InvalidArgument("k_max must be at least 1");
  for (std::size_t q = 0; q < hits.size(); ++q) {
    if (hits[q].size() < k_max) {
      throw InvalidArgument("hit list for query " + std::to_string(q) + " has " + std::to_string(hits[q].size()) +
                            " entries, fewer than k_max = " + std::to_string(k_max));
    }
  }
  std::vector<double> curve(k_max, 0.0);
  for (std::size_t q = 0; q < queries.size(); ++q) {
    double prefix = 0.0;
    for (std::size_t k = 0; k < k_max; ++k) {
      prefix += approx_ged(queries[q], hits[q][k]);
      curve[k] += prefix / static_cast<double>(k + 1);
    }
  }
  for (double& v : curve) v /= static_cast<double>(queries.size());
  return curve;
}

std::vector<double> running_average(std::span<const double> series, std::size_t window) {
  if (window == 0) throw InvalidArgument("window must be at least 1");
  std::vector<double> out(series.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    sum += series[i];
    if (i >= window) sum -= series[i - window];
    out[i] = sum / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

void LabeledEmbeddings::add(std::uint64_t id, std::span<const float> x, Label label) {
  if (x.size() != dim) throw InvalidArgument("labeled point has the wrong dimension");
  ids.push_back(id);
  coords.insert(coords.end(), x.begin(), x.end());
  labels.push_back(label);
}

Auroc auroc_from_scores(std::span<const double> active_scores, std::span<const double> decoy_scores) {
  if (active_scores.empty() || decoy_scores.empty()) {
    throw InvalidArgument("AUROC needs at least one active and one decoy");
  }
  std::vector<double> decoys(decoy_scores.begin(), decoy_scores.end());
  std::sort(decoys.begin(), decoys.end());
  std::uint64_t numerator = 0;
  for (double a : active_scores) {
    const auto lower = std::lower_bound(decoys.begin(), decoys.end(), a);
    const auto upper = std::upper_bound(lower, decoys.end(), a);
    numerator += 2 * static_cast<std::uint64_t>(lower - decoys.begin()) + static_cast<std::uint64_t>(upper - lower);
  }
  return Auroc{numerator, 2 * static_cast<std::uint64_t>(active_scores.size()) * decoy_scores.size()};
}

Auroc vs_auroc(const LabeledEmbeddings& database, std::span<const float> query_actives) {
  const std::size_t dim = database.dim;
  if (dim == 0 || database.coords.size() != database.size() * dim || database.labels.size() != database.size()) {
    throw InvalidArgument("malformed labeled embeddings");
  }
  if (query_actives.empty() || query_actives.size() % dim != 0) {
    throw InvalidArgument("query actives do not match the database dimension");
  }
  const std::size_t nq = query_actives.size() / dim;
  std::vector<double> active_scores;
  std::vector<double> decoy_scores;
  for (std::size_t i = 0; i < database.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < nq; ++q) {
      best = std::min(best, squared_distance(query_actives.subspan(q * dim, dim), database.point(i)));
    }
    // Squared distance ranks exactly like distance and avoids sqrt rounding ties.
    (database.labels[i] == Label::kActive ? active_scores : decoy_scores).push_back(-best);
  }
  return auroc_from_scores(active_scores, decoy_scores);
}

LabeledEmbeddings swap_labels(LabeledEmbeddings data) {
  for (Label& l : data.labels) l = l == Label::kActive ? Label::kDecoy : Label::kActive;
  return data;
}

ScreeningSplit split_query_actives(const LabeledEmbeddings& data, double query_fraction, std::uint64_t seed) {
  if (!(query_fraction > 0.0 && query_fraction < 1.0)) throw InvalidArgument("query fraction must be in (0, 1)");
  std::vector<std::size_t> actives;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.labels[i] == Label::kActive) actives.push_back(i);
  }
  if (actives.size() < 2) throw InvalidArgument("need at least two actives to split off queries");
  std::size_t take = static_cast<std::size_t>(std::llround(query_fraction * static_cast<double>(actives.size())));
  take = std::clamp<std::size_t>(take, 1, actives.size() - 1);
  // Partial Fisher-Yates with the portable index sampler.
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < take; ++i) {
    std::swap(actives[i], actives[i + uniform_index(rng, actives.size() - i)]);
  }
  std::vector<char> is_query(data.size(), 0);
  for (std::size_t i = 0; i < take; ++i) is_query[actives[i]] = 1;

  ScreeningSplit split;
  split.database.dim = data.dim;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (is_query[i]) {
      const auto p = data.point(i);
      split.queries.insert(split.queries.end(), p.begin(), p.end());
    } else {
      split.database.add(data.ids[i], data.point(i), data.labels[i]);
    }
  }
  return split;
}

LabeledEmbeddings synthetic_separable(std::size_t actives, std::size_t decoys, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw InvalidArgument("dimension must be positive");
  std::mt19937_64 rng(seed);
  LabeledEmbeddings out;
  out.dim = dim;
  std::vector<float> x(dim);
  for (std::size_t i = 0; i < actives + decoys; ++i) {
    const bool active = i < actives;
    for (float& c : x) c = static_cast<float>(uniform_unit(rng) + (active ? 0.0 : 10.0));
    out.add(i, x, active ? Label::kActive : Label::kDecoy);
  }
  return out;
}

LabeledEmbeddings synthetic_shuffled(std::size_t n, std::size_t dim, double active_fraction, std::uint64_t seed) {
  if (dim == 0) throw InvalidArgument("dimension must be positive");
  std::mt19937_64 rng(seed);
  LabeledEmbeddings out;
  out.dim = dim;
  std::vector<float> x(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (float& c : x) c = static_cast<float>(standard_normal(rng));
    out.add(i, x, uniform_unit(rng) < active_fraction ? Label::kActive : Label::kDecoy);
  }
  return out;
}

LabeledEmbeddings load_labeled_embeddings(const fs::path& embeddings, const fs::path& labels) {
  std::ifstream in(labels);
  if (!in) throw IoError("cannot open " + labels.string());
  std::unordered_map<std::uint64_t, Label> by_id;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    const std::string_view id_text = std::string_view(line).substr(0, tab);
    std::uint64_t id = 0;
    const auto [ptr, ec] = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
    if (ec != std::errc() || ptr != id_text.data() + id_text.size() || tab == std::string::npos) {
      if (line_no == 1) continue;  // header row
      throw DataError(labels.string() + ":" + std::to_string(line_no) + ": expected <id>\\t<label>");
    }
    const std::string_view text = std::string_view(line).substr(tab + 1);
    Label label;
    if (text == "active" || text == "1") {
      label = Label::kActive;
    } else if (text == "decoy" || text == "0") {
      label = Label::kDecoy;
    } else {
      throw DataError(labels.string() + ":" + std::to_string(line_no) + ": unknown label '" + std::string(text) + "'");
    }
    if (!by_id.emplace(id, label).second) {
      throw DataError(labels.string() + ":" + std::to_string(line_no) + ": duplicate id " + std::to_string(id));
    }
  }
  EmbeddingReader reader(embeddings);
  LabeledEmbeddings out;
  out.dim = reader.dim();
  std::vector<float> x(out.dim);
  std::uint64_t id = 0;
  while (reader.next(id, x)) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw DataError("embedding id " + std::to_string(id) + " has no label");
    out.add(id, x, it->second);
  }
  return out;
}

std::string_view search_method_name(SearchMethod method) {
  return method == SearchMethod::kKdTree ? "kdtree" : "bruteforce";
}

std::string TimingReport::tsv_row() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s\t%llu\t%zu\t%zu\t%.9f\t%.9f", method.c_str(),
                static_cast<unsigned long long>(n), dim, k, mean, stddev);
  return buf;
}

TimingReport timing_run(SearchMethod method, const fs::path& data, std::span<const float> queries, std::size_t k,
                        std::size_t repeats) {
  if (repeats == 0) throw InvalidArgument("repeats must be at least 1");
  if (k == 0) throw InvalidArgument("k must be at least 1");
  TimingReport report;
  report.method = std::string(search_method_name(method));
  report.k = k;

  std::optional<KdIndex> index;
  if (method == SearchMethod::kKdTree) {
    index.emplace(KdIndex::open(data));
    report.n = index->count();
    report.dim = index->dim();
  } else {
    EmbeddingReader header(data);
    report.n = header.count();
    report.dim = header.dim();
  }
  if (queries.empty() || queries.size() % report.dim != 0) {
    throw InvalidArgument("queries do not match the data dimension " + std::to_string(report.dim));
  }
  const std::size_t nq = queries.size() / report.dim;
  auto search = [&](std::size_t q) {
    const auto query = queries.subspan(q * report.dim, report.dim);
    return index ? index->knn(query, k) : bf_knn_file(data, query, k);
  };

  for (std::size_t q = 0; q < nq; ++q) search(q);  // warm-up, not recorded
  using Clock = std::chrono::steady_clock;
  for (std::size_t r = 0; r < repeats; ++r) {
    for (std::size_t q = 0; q < nq; ++q) {
      const auto start = Clock::now();
      const auto result = search(q);
      const auto stop = Clock::now();
      if (result.empty()) throw Error("internal error: empty search result");
      report.samples.push_back(std::chrono::duration<double>(stop - start).count());
    }
  }
  const double count = static_cast<double>(report.samples.size());
  report.mean = std::accumulate(report.samples.begin(), report.samples.end(), 0.0) / count;
  if (report.samples.size() > 1) {
    double ss = 0.0;
    for (double s : report.samples) ss += (s - report.mean) * (s - report.mean);
    report.stddev = std::sqrt(ss / (count - 1.0));
  }
  return report;
}

std::vector<float> uniform_points(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<float> out(n * dim);
  for (float& c : out) c = static_cast<float>(uniform_unit(rng));
  return out;
}

std::vector<float> gaussian_points(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<float> out(n * dim);
  for (float& c : out) c = static_cast<float>(standard_normal(rng));
  return out;
}

}  // namespace chemkd

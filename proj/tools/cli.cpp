#include "chemkd/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "chemkd/bench.hpp"
#include "chemkd/bruteforce.hpp"
#include "chemkd/error.hpp"
#include "chemkd/fingerprint.hpp"
#include "chemkd/formats.hpp"
#include "chemkd/ged.hpp"
#include "chemkd/kdtree.hpp"
#include "chemkd/mutate.hpp"
#include "chemkd/reduce.hpp"
#include "chemkd/smiles.hpp"

namespace chemkd::cli {

namespace fs = std::filesystem;

namespace {

// ---- small helpers ----

/// Text output that lands under its final name only on commit(); "-" means `out`.
class TextOutput {
 public:
  TextOutput(const std::string& path, std::ostream& out) {
    if (path == "-") {
      stream_ = &out;
      return;
    }
    atomic_.emplace(path);
    file_.open(atomic_->temp_path(), std::ios::binary);
    if (!file_) throw IoError("cannot create " + atomic_->temp_path().string());
    stream_ = &file_;
  }

  std::ostream& stream() { return *stream_; }

  void commit() {
    if (!atomic_) {
      stream_->flush();
      return;
    }
    file_.close();
    if (file_.fail()) throw IoError("write failed on " + atomic_->temp_path().string());
    atomic_->commit();
  }

 private:
  std::optional<AtomicOutput> atomic_;
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

std::optional<std::uint64_t> parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

/// "2G", "256M", "64K" or a plain byte count.
std::uint64_t parse_bytes(const std::string& text) {
  if (text.empty()) throw InvalidArgument("empty memory size");
  std::uint64_t scale = 1;
  std::string digits = text;
  switch (std::toupper(static_cast<unsigned char>(text.back()))) {
    case 'K': scale = 1ULL << 10; break;
    case 'M': scale = 1ULL << 20; break;
    case 'G': scale = 1ULL << 30; break;
    case 'T': scale = 1ULL << 40; break;
    default: scale = 0;
  }
  if (scale != 0) {
    digits.pop_back();
  } else {
    scale = 1;
  }
  const auto value = parse_u64(digits);
  if (!value) throw InvalidArgument("cannot parse memory size '" + text + "'");
  return *value * scale;
}

std::vector<float> parse_point(const std::string& text) {
  std::vector<float> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stof(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument("cannot parse coordinate '" + item + "'");
    }
  }
  return out;
}

struct SmilesLine {
  std::size_t line = 0;
  std::uint64_t id = 0;
  std::string name;  // non-numeric id text, if any
  std::string smiles;
};

/// Streams "SMILES[<TAB>id]" lines. A numeric id becomes the record id;
/// otherwise the 1-based line number is used and the text kept as a name.
template <typename Fn>
void for_each_smiles(const std::string& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string text;
  SmilesLine rec;
  while (std::getline(in, text)) {
    ++rec.line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) continue;
    const auto tab = text.find('\t');
    rec.smiles = text.substr(0, tab);
    rec.name.clear();
    rec.id = rec.line;
    if (tab != std::string::npos) {
      std::string field = text.substr(tab + 1);
      field = field.substr(0, field.find('\t'));
      if (const auto id = parse_u64(field)) {
        rec.id = *id;
      } else {
        rec.name = std::move(field);
      }
    }
    fn(rec);
  }
  if (in.bad()) throw IoError("read failed on " + path);
}

/// Calls fn(id, row) for every record of an FPB1/FPC1/EMB1 file, as doubles.
template <typename Fn>
std::size_t for_each_row(const fs::path& path, Fn&& fn) {
  switch (sniff_file(path)) {
    case FileKind::kBinaryFingerprints:
    case FileKind::kCountFingerprints: {
      FingerprintReader reader(path);
      Fingerprint256 fp;
      std::uint64_t id = 0;
      while (reader.next(id, fp)) fn(id, std::span<const double>(fp.to_reals()));
      return kFingerprintLength;
    }
    case FileKind::kEmbeddings: {
      EmbeddingReader reader(path);
      std::vector<float> x(reader.dim());
      std::vector<double> row(reader.dim());
      std::uint64_t id = 0;
      while (reader.next(id, x)) {
        std::copy(x.begin(), x.end(), row.begin());
        fn(id, std::span<const double>(row));
      }
      return reader.dim();
    }
    default:
      throw FormatError(path.string() + " is not a fingerprint or embedding file");
  }
}

std::size_t row_dim(const fs::path& path) {
  switch (sniff_file(path)) {
    case FileKind::kBinaryFingerprints:
    case FileKind::kCountFingerprints: return kFingerprintLength;
    case FileKind::kEmbeddings: return EmbeddingReader(path).dim();
    default: throw FormatError(path.string() + " is not a fingerprint or embedding file");
  }
}

struct QuerySet {
  std::size_t dim = 0;
  std::vector<std::uint64_t> ids;
  std::vector<float> coords;
};

QuerySet read_embeddings(const fs::path& path) {
  EmbeddingReader reader(path);
  QuerySet q;
  q.dim = reader.dim();
  std::vector<float> x(q.dim);
  std::uint64_t id = 0;
  while (reader.next(id, x)) {
    q.ids.push_back(id);
    q.coords.insert(q.coords.end(), x.begin(), x.end());
  }
  return q;
}

void write_neighbors(std::ostream& os, std::uint64_t query_id, const std::vector<Neighbor>& hits) {
  char buf[96];
  for (std::size_t r = 0; r < hits.size(); ++r) {
    std::snprintf(buf, sizeof buf, "%llu\t%zu\t%llu\t%.6f\n", static_cast<unsigned long long>(query_id), r + 1,
                  static_cast<unsigned long long>(hits[r].id), hits[r].distance);
    os << buf;
  }
}

constexpr const char* kNeighborHeader = "query_id\trank\tneighbor_id\tdistance\n";

void warn_dims(std::size_t dims, std::ostream& err) {
  if (dims > kRecommendedMaxDim) {
    err << "warning: " << dims << " dimensions; k-d tree pruning is weak above " << kRecommendedMaxDim << "\n";
  }
}

// ---- subcommands ----

struct FingerprintArgs {
  std::string input, output, rejects, kind = "binary";
  int radius = kDefaultFingerprintRadius;
};

int cmd_fingerprint(const FingerprintArgs& a, std::ostream& out, std::ostream& err) {
  const FingerprintKind kind = a.kind == "binary" ? FingerprintKind::kBinary : FingerprintKind::kCounts;
  FingerprintWriter writer(a.output, kind);
  TextOutput rejects(a.rejects.empty() ? a.output + ".rejects.tsv" : a.rejects, out);
  rejects.stream() << "line\terror\n";
  std::optional<TextOutput> names;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  for_each_smiles(a.input, [&](const SmilesLine& rec) {
    try {
      const MolecularGraph g = parse_smiles(rec.smiles);
      writer.add(rec.id, kind == FingerprintKind::kBinary ? ecfp(g, a.radius) : ecfc(g, a.radius));
      ++accepted;
      if (!rec.name.empty()) {
        if (!names) {
          names.emplace(a.output + ".names.tsv", out);
          names->stream() << "id\tname\n";
        }
        names->stream() << rec.id << '\t' << rec.name << '\n';
      }
    } catch (const DataError& e) {
      rejects.stream() << rec.line << '\t' << e.what() << '\n';
      ++rejected;
    }
  });
  writer.finish();
  rejects.commit();
  if (names) names->commit();
  err << "fingerprinted " << accepted << " molecules, rejected " << rejected << "\n";
  return rejected > 0 ? kDataError : kOk;
}

struct ReduceArgs {
  std::string input, output, model;
  std::size_t dims = 8;
  std::size_t input_dim = kFingerprintLength;
  std::uint64_t seed = 0;
};

int cmd_fit_pca(const ReduceArgs& a, std::ostream& err) {
  warn_dims(a.dims, err);
  CovarianceAccumulator stats(row_dim(a.input));
  for_each_row(a.input, [&](std::uint64_t, std::span<const double> row) { stats.add(row); });
  const PcaModel model = pca_fit(stats, a.dims);
  save_pca(model, a.output);
  err << "fitted PCA " << model.d_in << " -> " << model.d_out << " on " << stats.count() << " rows\n";
  return kOk;
}

int cmd_make_srp(const ReduceArgs& a, std::ostream& err) {
  warn_dims(a.dims, err);
  save_srp(SparseProjection(a.input_dim, a.dims, a.seed), a.output);
  return kOk;
}

int cmd_apply(const ReduceArgs& a, std::ostream& err) {
  const Reducer reducer = load_reducer(a.model);
  const std::size_t d_in = reducer_input_dim(reducer);
  const std::size_t d_out = reducer_output_dim(reducer);
  if (row_dim(a.input) != d_in) {
    throw InvalidArgument("model expects " + std::to_string(d_in) + "-d input, " + a.input + " has " +
                          std::to_string(row_dim(a.input)));
  }
  EmbeddingWriter writer(a.output, d_out);
  std::vector<float> y(d_out);
  for_each_row(a.input, [&](std::uint64_t id, std::span<const double> row) {
    reduce_into(reducer, row, y);
    writer.add(id, y);
  });
  writer.finish();
  err << "wrote " << writer.count() << " " << d_out << "-d embeddings\n";
  return kOk;
}

struct IndexArgs {
  std::string input, output = "-", index, queries, lo, hi, temp_dir, memory = "2G";
  std::uint32_t leaf_capacity = kDefaultLeafCapacity;
  std::size_t k = 10;
  unsigned threads = 1;
  bool audit = false;
};

int cmd_build(const IndexArgs& a, std::ostream& err) {
  BuildOptions options;
  options.leaf_capacity = a.leaf_capacity;
  options.memory_budget = parse_bytes(a.memory);
  options.temp_dir = a.temp_dir;
  EmbeddingFileSource source(a.input);
  warn_dims(source.dim(), err);
  const BuildReport r = build_index(source, a.output, options);
  err << "indexed " << r.count << " points (" << r.internal_nodes << " internal nodes, " << r.leaves << " leaves"
      << (r.out_of_core ? ", out of core" : "") << ")\n";
  return kOk;
}

int cmd_query(const IndexArgs& a, std::ostream& out) {
  const KdIndex index = KdIndex::open(a.index);
  const QuerySet q = read_embeddings(a.queries);
  if (q.dim != index.dim()) {
    throw InvalidArgument("queries are " + std::to_string(q.dim) + "-d, index is " + std::to_string(index.dim()) + "-d");
  }
  const std::size_t nq = q.ids.size();
  std::vector<std::vector<Neighbor>> results(nq);
  const unsigned threads = std::max(1U, std::min<unsigned>(a.threads, static_cast<unsigned>(std::max<std::size_t>(nq, 1))));
  auto work = [&](unsigned t) {
    for (std::size_t i = t; i < nq; i += threads) {
      results[i] = index.knn(std::span<const float>(q.coords).subspan(i * q.dim, q.dim), a.k);
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          work(t);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  TextOutput output(a.output, out);
  output.stream() << kNeighborHeader;
  for (std::size_t i = 0; i < nq; ++i) write_neighbors(output.stream(), q.ids[i], results[i]);
  output.commit();
  return kOk;
}

int cmd_range(const IndexArgs& a, std::ostream& out) {
  const KdIndex index = KdIndex::open(a.index);
  const std::vector<float> lo = parse_point(a.lo);
  const std::vector<float> hi = parse_point(a.hi);
  const auto ids = index.range(lo, hi);
  TextOutput output(a.output, out);
  output.stream() << "id\n";
  for (std::uint64_t id : ids) output.stream() << id << '\n';
  output.commit();
  return kOk;
}

int cmd_stats(const IndexArgs& a, std::ostream& out) {
  const KdIndex index = KdIndex::open(a.index);
  const IndexStats s = a.audit ? index.audit() : index.stats();
  out << "count\t" << s.count << "\ndim\t" << s.dim << "\nleaf_capacity\t" << s.leaf_capacity << "\ninternal_nodes\t"
      << s.internal_nodes << "\nleaves\t" << s.leaves << "\nheight\t" << s.height << "\nbytes\t" << s.bytes << '\n';
  if (a.audit) out << "audit\tok\n";
  return kOk;
}

struct BenchArgs {
  std::string queries, database, neighbors, output = "-", embeddings, labels, method = "kdtree", data,
                                             metric = "euclidean", distribution = "uniform";
  std::size_t k = 100;
  std::size_t smooth = 0;
  std::size_t repeats = 3;
  std::size_t n = 1000;
  std::size_t dim = 8;
  std::size_t max_queries = 0;
  double query_fraction = 0.5;
  double active_fraction = 0.5;
  std::uint64_t seed = 0;
  bool no_header = false;
};

std::unordered_map<std::uint64_t, MolecularGraph> load_graphs(const std::string& path,
                                                              const std::unordered_set<std::uint64_t>& wanted) {
  std::unordered_map<std::uint64_t, MolecularGraph> out;
  for_each_smiles(path, [&](const SmilesLine& rec) {
    if (!wanted.count(rec.id)) return;
    try {
      out.insert_or_assign(rec.id, parse_smiles(rec.smiles));
    } catch (const SmilesError& e) {
      throw DataError(path + ":" + std::to_string(rec.line) + ": " + e.what());
    }
  });
  for (std::uint64_t id : wanted) {
    if (!out.count(id)) throw DataError(path + " has no molecule with id " + std::to_string(id));
  }
  return out;
}

int cmd_bench_ged(const BenchArgs& a, std::ostream& out) {
  // Ranked neighbour lists from an `index query` / `bench bruteforce` TSV.
  std::map<std::uint64_t, std::vector<std::pair<std::size_t, std::uint64_t>>> ranked;
  {
    std::ifstream in(a.neighbors);
    if (!in) throw IoError("cannot open " + a.neighbors);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line_no == 1 && line.rfind("query_id", 0) == 0) continue;
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string qid, rank, nid;
      std::getline(ss, qid, '\t');
      std::getline(ss, rank, '\t');
      std::getline(ss, nid, '\t');
      const auto q = parse_u64(qid);
      const auto r = parse_u64(rank);
      const auto id = parse_u64(nid);
      if (!q || !r || !id) throw DataError(a.neighbors + ":" + std::to_string(line_no) + ": malformed neighbor row");
      ranked[*q].emplace_back(*r, *id);
    }
  }
  if (ranked.empty()) throw DataError(a.neighbors + " lists no neighbors");
  std::unordered_set<std::uint64_t> query_ids;
  std::unordered_set<std::uint64_t> hit_ids;
  for (auto& [q, list] : ranked) {
    std::sort(list.begin(), list.end());
    query_ids.insert(q);
    for (std::size_t i = 0; i < std::min(a.k, list.size()); ++i) hit_ids.insert(list[i].second);
  }
  const auto query_graphs = load_graphs(a.queries, query_ids);
  const auto hit_graphs = load_graphs(a.database, hit_ids);
  std::vector<MolecularGraph> queries;
  std::vector<std::vector<MolecularGraph>> hits;
  for (const auto& [q, list] : ranked) {
    queries.push_back(query_graphs.at(q));
    hits.emplace_back();
    for (std::size_t i = 0; i < std::min(a.k, list.size()); ++i) hits.back().push_back(hit_graphs.at(list[i].second));
  }
  const std::vector<double> curve = ged_curve(queries, hits, a.k);
  const std::vector<double> smoothed = a.smooth > 0 ? running_average(curve, a.smooth) : std::vector<double>{};
  TextOutput output(a.output, out);
  output.stream() << (a.smooth > 0 ? "k\tmean_ged\tsmoothed_ged\n" : "k\tmean_ged\n");
  char buf[96];
  for (std::size_t k = 0; k < curve.size(); ++k) {
    if (a.smooth > 0) {
      std::snprintf(buf, sizeof buf, "%zu\t%.6f\t%.6f\n", k + 1, curve[k], smoothed[k]);
    } else {
      std::snprintf(buf, sizeof buf, "%zu\t%.6f\n", k + 1, curve[k]);
    }
    output.stream() << buf;
  }
  output.commit();
  return kOk;
}

int cmd_bench_vs(const BenchArgs& a, std::ostream& out) {
  const LabeledEmbeddings data = load_labeled_embeddings(a.embeddings, a.labels);
  const ScreeningSplit split = split_query_actives(data, a.query_fraction, a.seed);
  const Auroc auc = vs_auroc(split.database, split.queries);
  std::size_t actives = 0;
  for (Label l : split.database.labels) actives += l == Label::kActive;
  char buf[256];
  std::snprintf(buf, sizeof buf, "auroc\t%.6f\tpairs\t%llu/%llu\tactives\t%zu\tdecoys\t%zu\tqueries\t%zu\n", auc.value(),
                static_cast<unsigned long long>(auc.numerator), static_cast<unsigned long long>(auc.denominator),
                actives, split.database.size() - actives, split.queries.size() / data.dim);
  TextOutput output(a.output, out);
  output.stream() << buf;
  output.commit();
  return kOk;
}

int cmd_bench_timing(const BenchArgs& a, std::ostream& out) {
  const SearchMethod method = a.method == "kdtree" ? SearchMethod::kKdTree : SearchMethod::kBruteForce;
  QuerySet q = read_embeddings(a.queries);
  if (a.max_queries > 0 && q.ids.size() > a.max_queries) q.coords.resize(a.max_queries * q.dim);
  const TimingReport report = timing_run(method, a.data, q.coords, a.k, a.repeats);
  TextOutput output(a.output, out);
  if (!a.no_header) output.stream() << kTimingHeader << '\n';
  output.stream() << report.tsv_row() << '\n';
  output.commit();
  return kOk;
}

int cmd_bench_bruteforce(const BenchArgs& a, std::ostream& out) {
  const Metric metric = parse_metric(a.metric);
  TextOutput output(a.output, out);
  output.stream() << kNeighborHeader;
  const FileKind db_kind = sniff_file(a.database);
  if (db_kind == FileKind::kEmbeddings) {
    if (metric != Metric::kEuclidean) throw InvalidArgument("embeddings only support the euclidean metric");
    const QuerySet q = read_embeddings(a.queries);
    const auto results = bf_knn_file_batch(a.database, q.coords, a.k);
    for (std::size_t i = 0; i < q.ids.size(); ++i) write_neighbors(output.stream(), q.ids[i], results[i]);
  } else if (db_kind == FileKind::kBinaryFingerprints || db_kind == FileKind::kCountFingerprints) {
    FingerprintReader queries(a.queries);
    Fingerprint256 fp;
    std::uint64_t id = 0;
    while (queries.next(id, fp)) write_neighbors(output.stream(), id, bf_knn_fingerprints(a.database, fp, a.k, metric));
  } else {
    throw FormatError(a.database + " is not an embedding or fingerprint file");
  }
  output.commit();
  return kOk;
}

int cmd_bench_synth(const BenchArgs& a, std::ostream& out) {
  if (a.distribution == "uniform" || a.distribution == "gaussian") {
    const auto pts = a.distribution == "uniform" ? uniform_points(a.n, a.dim, a.seed) : gaussian_points(a.n, a.dim, a.seed);
    EmbeddingWriter writer(a.output, a.dim);
    for (std::size_t i = 0; i < a.n; ++i) writer.add(i, std::span<const float>(pts).subspan(i * a.dim, a.dim));
    writer.finish();
    return kOk;
  }
  if (a.labels.empty()) throw InvalidArgument("--labels is required for labeled distributions");
  const std::size_t actives = static_cast<std::size_t>(std::llround(a.active_fraction * static_cast<double>(a.n)));
  const LabeledEmbeddings data = a.distribution == "separable"
                                     ? synthetic_separable(actives, a.n - actives, a.dim, a.seed)
                                     : synthetic_shuffled(a.n, a.dim, a.active_fraction, a.seed);
  EmbeddingWriter writer(a.output, a.dim);
  TextOutput labels(a.labels, out);
  labels.stream() << "id\tlabel\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    writer.add(data.ids[i], data.point(i));
    labels.stream() << data.ids[i] << '\t' << (data.labels[i] == Label::kActive ? "active" : "decoy") << '\n';
  }
  writer.finish();
  labels.commit();
  return kOk;
}

struct MutateArgs {
  std::string input, output = "-", rejects;
  std::uint64_t seed = 0;
  std::size_t count = 1;
};

int cmd_mutate(const MutateArgs& a, std::ostream& out, std::ostream& err) {
  TextOutput output(a.output, out);
  TextOutput rejects(a.rejects.empty() ? (a.output == "-" ? std::string("mutate.rejects.tsv") : a.output + ".rejects.tsv")
                                       : a.rejects,
                     out);
  output.stream() << "smiles\tid\tparent_id\tkind\n";
  rejects.stream() << "line\terror\n";
  std::uint64_t next_id = 1;
  std::size_t rejected = 0;
  for_each_smiles(a.input, [&](const SmilesLine& rec) {
    try {
      const MolecularGraph g = parse_smiles(rec.smiles);
      for (std::size_t i = 0; i < a.count; ++i) {
        const std::uint64_t words[] = {a.seed, rec.line, i};
        const Mutant m = random_mutant(g, stable_hash(words));
        output.stream() << write_smiles(m.graph) << '\t' << next_id++ << '\t' << rec.id << '\t'
                        << mutation_kind_name(m.kind) << '\n';
      }
    } catch (const DataError& e) {
      rejects.stream() << rec.line << '\t' << e.what() << '\n';
      ++rejected;
    }
  });
  output.commit();
  rejects.commit();
  if (rejected > 0) err << "rejected " << rejected << " lines\n";
  return rejected > 0 ? kDataError : kOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"chemkd: exact chemical similarity search over low-dimensional embeddings", "chemkd"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "chemkd 0.1.0");

  // fingerprint
  FingerprintArgs fa;
  auto* fingerprint = app.add_subcommand("fingerprint", "Compute ECFP/ECFC-256 fingerprints from a SMILES file");
  fingerprint->add_option("--input", fa.input, "SMILES file: one SMILES per line, optional TAB + id")->required();
  fingerprint->add_option("--output", fa.output, "Output FPB1/FPC1 file")->required();
  fingerprint->add_option("--kind", fa.kind, "binary (ECFP) or counts (ECFC)")
      ->check(CLI::IsMember({"binary", "counts"}))
      ->capture_default_str();
  fingerprint->add_option("--radius", fa.radius, "Circular radius")->check(CLI::Range(0, 8))->capture_default_str();
  fingerprint->add_option("--rejects", fa.rejects, "Rejected lines (line, error); default <output>.rejects.tsv");

  // reduce
  ReduceArgs ra;
  auto* reduce = app.add_subcommand("reduce", "Fit or apply a dimensionality reduction");
  reduce->require_subcommand(1);
  auto* fit = reduce->add_subcommand("fit-pca", "Fit a PCA model on a sample of fingerprints or embeddings");
  fit->add_option("--input", ra.input, "Sample file (FPB1, FPC1 or EMB1)")->required();
  fit->add_option("--output", ra.output, "Output PCA1 model")->required();
  fit->add_option("--dims", ra.dims, "Output dimension")->check(CLI::Range(1, 65535))->capture_default_str();
  auto* srp = reduce->add_subcommand("make-srp", "Create a sparse random projection model");
  srp->add_option("--output", ra.output, "Output SRP1 model")->required();
  srp->add_option("--dims", ra.dims, "Output dimension")->check(CLI::Range(1, 65535))->capture_default_str();
  srp->add_option("--input-dim", ra.input_dim, "Input dimension")->check(CLI::Range(1, 65535))->capture_default_str();
  srp->add_option("--seed", ra.seed, "Projection seed")->capture_default_str();
  auto* apply = reduce->add_subcommand("apply", "Project fingerprints into an EMB1 embedding file");
  apply->add_option("--model", ra.model, "PCA1 or SRP1 model")->required();
  apply->add_option("--input", ra.input, "FPB1, FPC1 or EMB1 input")->required();
  apply->add_option("--output", ra.output, "Output EMB1 file")->required();

  // index
  IndexArgs ia;
  auto* index = app.add_subcommand("index", "Build and query disk-backed k-d tree indexes");
  index->require_subcommand(1);
  auto* build = index->add_subcommand("build", "Bulk-build an index from an EMB1 file");
  build->add_option("--input", ia.input, "EMB1 embeddings")->required();
  build->add_option("--output", ia.output, "Output KDT1 index")->required();
  build->add_option("--leaf-capacity", ia.leaf_capacity, "Points per leaf page")
      ->check(CLI::Range(1U, 1U << 24))
      ->capture_default_str();
  build->add_option("--memory-budget", ia.memory, "Memory for points and nodes, e.g. 2G, 256M")->capture_default_str();
  build->add_option("--temp-dir", ia.temp_dir, "Directory for spill files (default: next to the output)");
  auto* query = index->add_subcommand("query", "k nearest neighbours for every query embedding");
  query->add_option("--index", ia.index, "KDT1 index")->required();
  query->add_option("--queries", ia.queries, "EMB1 query embeddings")->required();
  query->add_option("--k", ia.k, "Neighbours per query")->check(CLI::PositiveNumber)->capture_default_str();
  query->add_option("--output", ia.output, "Output TSV, - for stdout")->capture_default_str();
  query->add_option("--threads", ia.threads, "Query threads")->check(CLI::Range(1U, 1024U))->capture_default_str();
  auto* range = index->add_subcommand("range", "Ids inside a closed box");
  range->add_option("--index", ia.index, "KDT1 index")->required();
  range->add_option("--lo", ia.lo, "Lower corner, comma separated")->required();
  range->add_option("--hi", ia.hi, "Upper corner, comma separated")->required();
  range->add_option("--output", ia.output, "Output TSV, - for stdout")->capture_default_str();
  auto* stats = index->add_subcommand("stats", "Print index statistics");
  stats->add_option("--index", ia.index, "KDT1 index")->required();
  stats->add_flag("--audit", ia.audit, "Read every leaf and verify the tree invariants");

  // bench
  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Evaluation harness");
  bench->require_subcommand(1);
  auto* ged = bench->add_subcommand("ged", "Mean approximate GED between queries and their top-k hits");
  ged->add_option("--queries", ba.queries, "Query SMILES file")->required();
  ged->add_option("--database", ba.database, "Database SMILES file")->required();
  ged->add_option("--neighbors", ba.neighbors, "Neighbour TSV from index query or bench bruteforce")->required();
  ged->add_option("--k", ba.k, "Largest k")->check(CLI::PositiveNumber)->capture_default_str();
  ged->add_option("--smooth", ba.smooth, "Also emit a running average over this many points (0: off)")
      ->capture_default_str();
  ged->add_option("--output", ba.output, "Output TSV, - for stdout")->capture_default_str();
  auto* vs = bench->add_subcommand("vs", "Virtual-screening AUROC");
  vs->add_option("--embeddings", ba.embeddings, "EMB1 embeddings of actives and decoys")->required();
  vs->add_option("--labels", ba.labels, "TSV of id and label (active/decoy)")->required();
  vs->add_option("--query-fraction", ba.query_fraction, "Fraction of actives used as queries")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  vs->add_option("--seed", ba.seed, "Seed for the query split")->capture_default_str();
  vs->add_option("--output", ba.output, "Output file, - for stdout")->capture_default_str();
  auto* timing = bench->add_subcommand("timing", "Single-threaded per-query timing");
  timing->add_option("--method", ba.method, "kdtree or bruteforce")
      ->check(CLI::IsMember({"kdtree", "bruteforce"}))
      ->capture_default_str();
  timing->add_option("--data", ba.data, "KDT1 index (kdtree) or EMB1 file (bruteforce)")->required();
  timing->add_option("--queries", ba.queries, "EMB1 query embeddings")->required();
  timing->add_option("--k", ba.k, "Neighbours per query")->check(CLI::PositiveNumber)->capture_default_str();
  timing->add_option("--repeats", ba.repeats, "Timed passes after the warm-up")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  timing->add_option("--max-queries", ba.max_queries, "Use only the first N queries (0: all)")->capture_default_str();
  timing->add_flag("--no-header", ba.no_header, "Omit the TSV header row");
  timing->add_option("--output", ba.output, "Output TSV, - for stdout")->capture_default_str();
  auto* brute = bench->add_subcommand("bruteforce", "Exact k-NN by linear scan (same TSV as index query)");
  brute->add_option("--database", ba.database, "EMB1, FPB1 or FPC1 database")->required();
  brute->add_option("--queries", ba.queries, "Queries of the same file type")->required();
  brute->add_option("--k", ba.k, "Neighbours per query")->check(CLI::PositiveNumber)->capture_default_str();
  brute->add_option("--metric", ba.metric, "euclidean or tanimoto")
      ->check(CLI::IsMember({"euclidean", "tanimoto"}))
      ->capture_default_str();
  brute->add_option("--output", ba.output, "Output TSV, - for stdout")->capture_default_str();
  auto* synth = bench->add_subcommand("synth", "Generate synthetic embeddings");
  synth->add_option("--distribution", ba.distribution, "uniform, gaussian, separable or shuffled")
      ->check(CLI::IsMember({"uniform", "gaussian", "separable", "shuffled"}))
      ->capture_default_str();
  synth->add_option("--n", ba.n, "Number of points")->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--dim", ba.dim, "Dimension")->check(CLI::Range(1, 64))->capture_default_str();
  synth->add_option("--seed", ba.seed, "Generator seed")->capture_default_str();
  synth->add_option("--active-fraction", ba.active_fraction, "Share of actives (labeled distributions)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  synth->add_option("--output", ba.output, "Output EMB1 file")->required();
  synth->add_option("--labels", ba.labels, "Output label TSV (separable, shuffled)");

  // mutate
  MutateArgs ma;
  auto* mutate = app.add_subcommand("mutate", "Generate single-edit mutants of SMILES molecules");
  mutate->add_option("--input", ma.input, "SMILES file")->required();
  mutate->add_option("--output", ma.output, "Output TSV (smiles, id, parent_id, kind), - for stdout")
      ->capture_default_str();
  mutate->add_option("--seed", ma.seed, "Mutation seed")->capture_default_str();
  mutate->add_option("--count", ma.count, "Mutants per molecule")->check(CLI::PositiveNumber)->capture_default_str();
  mutate->add_option("--rejects", ma.rejects, "Rejected lines; default <output>.rejects.tsv");

  std::vector<const char*> argv{"chemkd"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  if (fingerprint->parsed()) return cmd_fingerprint(fa, out, err);
  if (fit->parsed()) return cmd_fit_pca(ra, err);
  if (srp->parsed()) return cmd_make_srp(ra, err);
  if (apply->parsed()) return cmd_apply(ra, err);
  if (build->parsed()) return cmd_build(ia, err);
  if (query->parsed()) return cmd_query(ia, out);
  if (range->parsed()) return cmd_range(ia, out);
  if (stats->parsed()) return cmd_stats(ia, out);
  if (ged->parsed()) return cmd_bench_ged(ba, out);
  if (vs->parsed()) return cmd_bench_vs(ba, out);
  if (timing->parsed()) return cmd_bench_timing(ba, out);
  if (brute->parsed()) return cmd_bench_bruteforce(ba, out);
  if (synth->parsed()) return cmd_bench_synth(ba, out);
  if (mutate->parsed()) return cmd_mutate(ma, out, err);
  return kUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return kIoError;
  } catch (const std::exception& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace chemkd::cli

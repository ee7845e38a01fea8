#include "chemkd/reduce.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "chemkd/error.hpp"
#include "chemkd/formats.hpp"
#include "chemkd/io.hpp"
#include "chemkd/random.hpp"

namespace chemkd {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kBatchRows = 256;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_dims(std::size_t d_in, std::size_t d_out) {
  if (d_in == 0 || d_in > 65535) throw InvalidArgument("input dimension must be in [1, 65535]");
  if (d_out == 0) throw InvalidArgument("output dimension must be at least 1");
  if (d_out > d_in) throw InvalidArgument("output dimension exceeds input dimension");
}

}  // namespace

CovarianceAccumulator::CovarianceAccumulator(std::size_t dim)
    : dim_(dim), mean_(dim, 0.0), m2_(dim * dim, 0.0) {
  if (dim == 0) throw InvalidArgument("covariance dimension must be positive");
  pending_.reserve(kBatchRows * dim);
}

void CovarianceAccumulator::add(std::span<const double> row) {
  if (row.size() != dim_) throw InvalidArgument("sample row has the wrong dimension");
  for (double v : row) {
    if (!std::isfinite(v)) throw DataError("non-finite value in PCA sample");
  }
  pending_.insert(pending_.end(), row.begin(), row.end());
  if (++pending_rows_ == kBatchRows) flush();
}

void CovarianceAccumulator::flush() const {
  if (pending_rows_ == 0) return;
  const auto rows = static_cast<Eigen::Index>(pending_rows_);
  const auto d = static_cast<Eigen::Index>(dim_);
  Eigen::Map<const RowMatrix> batch(pending_.data(), rows, d);
  const Eigen::RowVectorXd batch_mean = batch.colwise().mean();
  const RowMatrix centered = batch.rowwise() - batch_mean;
  const Eigen::MatrixXd batch_m2 = centered.transpose() * centered;

  Eigen::Map<Eigen::VectorXd> mean(mean_.data(), d);
  Eigen::Map<Eigen::MatrixXd> m2(m2_.data(), d, d);
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(pending_rows_);
  const double n = na + nb;
  const Eigen::VectorXd delta = batch_mean.transpose() - mean;
  mean += delta * (nb / n);
  m2 += batch_m2 + delta * delta.transpose() * (na * nb / n);

  count_ += pending_rows_;
  pending_rows_ = 0;
  pending_.clear();
}

std::vector<double> CovarianceAccumulator::mean() const {
  flush();
  return mean_;
}

std::vector<double> CovarianceAccumulator::covariance() const {
  flush();
  if (count_ < 2) throw InvalidArgument("covariance needs at least two samples");
  std::vector<double> cov(m2_);
  const double scale = 1.0 / static_cast<double>(count_ - 1);
  for (double& v : cov) v *= scale;
  return cov;
}

PcaModel pca_fit(const CovarianceAccumulator& stats, std::size_t d_out) {
  const std::size_t d_in = stats.dim();
  check_dims(d_in, d_out);
  if (stats.count() < 2) throw InvalidArgument("PCA needs at least two samples");
  if (d_out > stats.count()) throw InvalidArgument("PCA output dimension exceeds the sample count");

  const std::vector<double> cov = stats.covariance();
  const auto d = static_cast<Eigen::Index>(d_in);
  Eigen::Map<const Eigen::MatrixXd> cov_matrix(cov.data(), d, d);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov_matrix);
  if (solver.info() != Eigen::Success) throw DataError("covariance eigendecomposition failed");

  PcaModel model;
  model.d_in = d_in;
  model.d_out = d_out;
  model.mean = stats.mean();
  model.components.resize(d_out * d_in);
  model.eigenvalues.resize(d_out);
  // Eigen returns eigenvalues in increasing order.
  for (std::size_t r = 0; r < d_out; ++r) {
    const Eigen::Index col = d - 1 - static_cast<Eigen::Index>(r);
    Eigen::VectorXd v = solver.eigenvectors().col(col);
    Eigen::Index pivot = 0;
    for (Eigen::Index i = 1; i < d; ++i) {
      if (std::abs(v(i)) > std::abs(v(pivot))) pivot = i;
    }
    if (v(pivot) < 0) v = -v;
    for (std::size_t c = 0; c < d_in; ++c) model.components[r * d_in + c] = v(static_cast<Eigen::Index>(c));
    model.eigenvalues[r] = solver.eigenvalues()(col);
  }
  return model;
}

PcaModel pca_fit(std::span<const double> samples, std::size_t n, std::size_t d_in, std::size_t d_out) {
  if (samples.size() != n * d_in) throw InvalidArgument("sample matrix size does not match n x d_in");
  CovarianceAccumulator stats(d_in);
  for (std::size_t i = 0; i < n; ++i) stats.add(samples.subspan(i * d_in, d_in));
  return pca_fit(stats, d_out);
}

std::vector<double> PcaModel::apply(std::span<const double> x) const {
  std::vector<double> out(d_out);
  if (x.size() != d_in) throw InvalidArgument("PCA input has the wrong dimension");
  for (std::size_t r = 0; r < d_out; ++r) {
    const double* row = components.data() + r * d_in;
    double acc = 0.0;
    for (std::size_t c = 0; c < d_in; ++c) acc += row[c] * (x[c] - mean[c]);
    out[r] = acc;
  }
  return out;
}

void PcaModel::apply_into(std::span<const double> x, std::span<float> out) const {
  if (out.size() != d_out) throw InvalidArgument("PCA output buffer has the wrong dimension");
  const std::vector<double> y = apply(x);
  for (std::size_t r = 0; r < d_out; ++r) out[r] = static_cast<float>(y[r]);
}

void save_pca(const PcaModel& model, const fs::path& path) {
  check_dims(model.d_in, model.d_out);
  AtomicOutput output(path);
  BinaryWriter writer(output.temp_path());
  writer.write_bytes("PCA1", 4);
  writer.write<std::uint16_t>(kFormatVersion);
  writer.write<std::uint16_t>(static_cast<std::uint16_t>(model.d_in));
  writer.write<std::uint16_t>(static_cast<std::uint16_t>(model.d_out));
  writer.write_doubles(model.mean);
  writer.write_doubles(model.components);
  writer.write_doubles(model.eigenvalues);
  writer.close();
  output.commit();
}

PcaModel load_pca(const fs::path& path) {
  BinaryReader reader(path);
  char magic[4];
  reader.read_bytes(magic, 4);
  if (std::string_view(magic, 4) != "PCA1") throw FormatError(path.string() + " is not a PCA model");
  if (reader.read<std::uint16_t>() != kFormatVersion) throw FormatError(path.string() + ": unsupported version");
  PcaModel model;
  model.d_in = reader.read<std::uint16_t>();
  model.d_out = reader.read<std::uint16_t>();
  if (model.d_in == 0 || model.d_out == 0 || model.d_out > model.d_in) {
    throw FormatError(path.string() + ": bad PCA dimensions");
  }
  const std::uint64_t expected = 10 + 8 * (model.d_in + model.d_out * model.d_in + model.d_out);
  if (reader.file_size() != expected) throw FormatError(path.string() + ": truncated PCA model");
  model.mean.resize(model.d_in);
  model.components.resize(model.d_out * model.d_in);
  model.eigenvalues.resize(model.d_out);
  reader.read_doubles(model.mean);
  reader.read_doubles(model.components);
  reader.read_doubles(model.eigenvalues);
  return model;
}

SparseProjection::SparseProjection(std::size_t d_in, std::size_t d_out, std::uint64_t seed)
    : d_in_(d_in), d_out_(d_out), seed_(seed) {
  check_dims(d_in, d_out);
  const double s = std::sqrt(static_cast<double>(d_in));
  const double p_nonzero = 1.0 / s;
  scale_ = std::sqrt(s / static_cast<double>(d_out));
  std::mt19937_64 rng(seed);
  rows_.resize(d_out);
  for (std::size_t r = 0; r < d_out; ++r) {
    for (std::size_t c = 0; c < d_in; ++c) {
      const double u = uniform_unit(rng);
      if (u < 0.5 * p_nonzero) {
        rows_[r].push_back({static_cast<std::uint32_t>(c), 1});
      } else if (u < p_nonzero) {
        rows_[r].push_back({static_cast<std::uint32_t>(c), -1});
      }
    }
  }
}

double SparseProjection::density_parameter() const { return std::sqrt(static_cast<double>(d_in_)); }

std::vector<double> SparseProjection::apply(std::span<const double> x) const {
  if (x.size() != d_in_) throw InvalidArgument("projection input has the wrong dimension");
  std::vector<double> out(d_out_, 0.0);
  for (std::size_t r = 0; r < d_out_; ++r) {
    double acc = 0.0;
    for (const Entry& e : rows_[r]) acc += e.sign > 0 ? x[e.column] : -x[e.column];
    out[r] = scale_ * acc;
  }
  return out;
}

void SparseProjection::apply_into(std::span<const double> x, std::span<float> out) const {
  if (out.size() != d_out_) throw InvalidArgument("projection output buffer has the wrong dimension");
  const std::vector<double> y = apply(x);
  for (std::size_t r = 0; r < d_out_; ++r) out[r] = static_cast<float>(y[r]);
}

std::vector<double> SparseProjection::dense() const {
  std::vector<double> m(d_out_ * d_in_, 0.0);
  for (std::size_t r = 0; r < d_out_; ++r) {
    for (const Entry& e : rows_[r]) m[r * d_in_ + e.column] = e.sign * scale_;
  }
  return m;
}

std::size_t SparseProjection::nonzeros() const {
  std::size_t total = 0;
  for (const auto& row : rows_) total += row.size();
  return total;
}

void save_srp(const SparseProjection& projection, const fs::path& path) {
  AtomicOutput output(path);
  BinaryWriter writer(output.temp_path());
  writer.write_bytes("SRP1", 4);
  writer.write<std::uint16_t>(kFormatVersion);
  writer.write<std::uint16_t>(static_cast<std::uint16_t>(projection.d_in()));
  writer.write<std::uint16_t>(static_cast<std::uint16_t>(projection.d_out()));
  writer.write<std::uint64_t>(projection.seed());
  writer.close();
  output.commit();
}

SparseProjection load_srp(const fs::path& path) {
  BinaryReader reader(path);
  char magic[4];
  reader.read_bytes(magic, 4);
  if (std::string_view(magic, 4) != "SRP1") throw FormatError(path.string() + " is not a projection model");
  if (reader.read<std::uint16_t>() != kFormatVersion) throw FormatError(path.string() + ": unsupported version");
  if (reader.file_size() != 18) throw FormatError(path.string() + ": bad projection model size");
  const std::size_t d_in = reader.read<std::uint16_t>();
  const std::size_t d_out = reader.read<std::uint16_t>();
  const std::uint64_t seed = reader.read<std::uint64_t>();
  try {
    return SparseProjection(d_in, d_out, seed);
  } catch (const InvalidArgument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

Reducer load_reducer(const fs::path& path) {
  switch (sniff_file(path)) {
    case FileKind::kPcaModel: return load_pca(path);
    case FileKind::kSparseProjection: return load_srp(path);
    default: throw FormatError(path.string() + " is neither a PCA1 nor an SRP1 model");
  }
}

std::size_t reducer_input_dim(const Reducer& reducer) {
  return std::visit(
      [](const auto& m) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, PcaModel>) {
          return m.d_in;
        } else {
          return m.d_in();
        }
      },
      reducer);
}

std::size_t reducer_output_dim(const Reducer& reducer) {
  return std::visit(
      [](const auto& m) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, PcaModel>) {
          return m.d_out;
        } else {
          return m.d_out();
        }
      },
      reducer);
}

void reduce_into(const Reducer& reducer, std::span<const double> x, std::span<float> out) {
  std::visit([&](const auto& m) { m.apply_into(x, out); }, reducer);
}

}  // namespace chemkd

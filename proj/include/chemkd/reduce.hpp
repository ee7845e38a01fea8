#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

namespace chemkd {

/// Streaming mean and covariance (normalization 1/(n-1)).
///
/// Rows are buffered into small batches and merged with the pairwise update
/// of Chan et al., so memory stays O(d^2) however many rows are added.
class CovarianceAccumulator {
 public:
  explicit CovarianceAccumulator(std::size_t dim);

  /// Throws DataError on non-finite values, InvalidArgument on a length mismatch.
  void add(std::span<const double> row);

  std::size_t dim() const { return dim_; }
  std::uint64_t count() const { return count_ + pending_rows_; }
  std::vector<double> mean() const;
  /// Row-major dim x dim sample covariance. Needs count() >= 2.
  std::vector<double> covariance() const;

 private:
  void flush() const;

  std::size_t dim_;
  mutable std::uint64_t count_ = 0;
  mutable std::vector<double> mean_;
  mutable std::vector<double> m2_;  // sum of outer products of deviations
  mutable std::vector<double> pending_;
  mutable std::size_t pending_rows_ = 0;
};

/// Principal-component projection fitted on a sample.
struct PcaModel {
  std::size_t d_in = 0;
  std::size_t d_out = 0;
  std::vector<double> mean;         // d_in
  std::vector<double> components;   // d_out x d_in, row-major, orthonormal rows
  std::vector<double> eigenvalues;  // d_out, non-increasing

  /// components * (x - mean)
  std::vector<double> apply(std::span<const double> x) const;
  void apply_into(std::span<const double> x, std::span<float> out) const;

  friend bool operator==(const PcaModel&, const PcaModel&) = default;
};

/// Top-d_out eigenvectors of the accumulated covariance. Each component is
/// signed so that its largest-magnitude entry is positive.
PcaModel pca_fit(const CovarianceAccumulator& stats, std::size_t d_out);

/// Convenience overload over an n x d_in row-major sample matrix.
PcaModel pca_fit(std::span<const double> samples, std::size_t n, std::size_t d_in, std::size_t d_out);

void save_pca(const PcaModel& model, const std::filesystem::path& path);
PcaModel load_pca(const std::filesystem::path& path);

/// Very sparse random projection (Achlioptas / Li): entries are
/// +sqrt(s/d_out), 0, -sqrt(s/d_out) with probabilities 1/(2s), 1-1/s, 1/(2s)
/// where s = sqrt(d_in). The matrix is regenerated bit-identically from
/// (d_in, d_out, seed).
class SparseProjection {
 public:
  SparseProjection(std::size_t d_in, std::size_t d_out, std::uint64_t seed);

  std::size_t d_in() const { return d_in_; }
  std::size_t d_out() const { return d_out_; }
  std::uint64_t seed() const { return seed_; }
  double density_parameter() const;
  double scale() const { return scale_; }

  std::vector<double> apply(std::span<const double> x) const;
  void apply_into(std::span<const double> x, std::span<float> out) const;

  /// Dense d_out x d_in row-major copy of the matrix.
  std::vector<double> dense() const;
  std::size_t nonzeros() const;

  friend bool operator==(const SparseProjection& a, const SparseProjection& b) {
    return a.d_in_ == b.d_in_ && a.d_out_ == b.d_out_ && a.seed_ == b.seed_;
  }

 private:
  struct Entry {
    std::uint32_t column;
    std::int8_t sign;
  };
  std::size_t d_in_;
  std::size_t d_out_;
  std::uint64_t seed_;
  double scale_;
  std::vector<std::vector<Entry>> rows_;
};

void save_srp(const SparseProjection& projection, const std::filesystem::path& path);
SparseProjection load_srp(const std::filesystem::path& path);

using Reducer = std::variant<PcaModel, SparseProjection>;

/// Loads either model kind, dispatching on the file magic.
Reducer load_reducer(const std::filesystem::path& path);
std::size_t reducer_input_dim(const Reducer& reducer);
std::size_t reducer_output_dim(const Reducer& reducer);
void reduce_into(const Reducer& reducer, std::span<const double> x, std::span<float> out);

}  // namespace chemkd

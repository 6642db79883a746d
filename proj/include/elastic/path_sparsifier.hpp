#pragma once

// Learns the admissible alignment search space from a training set: every
// pairwise optimal DTW path is accumulated into a symmetric count grid, the
// grid is normalized into occupancy frequencies, cells at or below a count
// threshold are dropped and the survivors are weighted by p^-gamma.

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "elastic/elastic_dense.hpp"
#include "elastic/series.hpp"

namespace elastic {

using CountGrid = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using OccupancyGrid = Eigen::MatrixXd;

struct SparsifyConfig {
  std::int64_t theta = 0;  ///< cells with count <= theta are dropped
  double gamma = 0;        ///< weight exponent, weight = p^-gamma

  void validate() const;
};

struct SparseEntry {
  int row = 0;  ///< 0-based; the file format is 1-based
  int col = 0;
  double weight = 1.0;

  Cell cell() const noexcept { return {row, col}; }
  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Coordinate list sorted by row then column, defining the admissible cells.
class SparsePathMatrix {
 public:
  SparsePathMatrix() = default;
  /// Entries are sorted on construction; duplicates or out-of-range cells throw.
  SparsePathMatrix(int length, std::vector<SparseEntry> entries, std::int64_t theta = 0, double gamma = 0,
                   std::string source = {});

  static SparsePathMatrix full_grid(int length, double weight = 1.0);
  static SparsePathMatrix band(int length, int radius, double weight = 1.0);
  static SparsePathMatrix diagonal(int length, double weight = 1.0);

  int length() const noexcept { return length_; }
  const std::vector<SparseEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::int64_t theta() const noexcept { return theta_; }
  double gamma() const noexcept { return gamma_; }
  const std::string& source() const noexcept { return source_; }
  void set_source(std::string s) { source_ = std::move(s); }

  bool contains(Cell c) const;
  /// Same cell set and weights under transposition.
  bool is_symmetric() const;
  double max_weight() const;

  friend bool operator==(const SparsePathMatrix&, const SparsePathMatrix&) = default;

 private:
  int length_ = 0;
  std::vector<SparseEntry> entries_;
  std::int64_t theta_ = 0;
  double gamma_ = 0;
  std::string source_;
};

/// Sums, over all unordered training pairs, the indicator of one optimal DTW
/// path and of its transpose. Partial grids from workers are added, so the
/// result does not depend on the worker count.
CountGrid accumulate_paths(const Dataset& train, LocalCost cost = LocalCost::squared_difference,
                           unsigned workers = 0);

/// counts / sum(counts)
OccupancyGrid normalize_grid(const CountGrid& counts);

/// Threshold and weight without connectivity repair.
SparsePathMatrix select_cells(const CountGrid& counts, const OccupancyGrid& occupancy, const SparsifyConfig& cfg);

/// select_cells followed by ensure_connectivity. Throws OverThresholdError
/// when the threshold removes a corner.
SparsePathMatrix sparsify(const CountGrid& counts, const OccupancyGrid& occupancy, const SparsifyConfig& cfg);

/// True when a monotone path from (0,0) to (T-1,T-1) exists within the cells.
bool has_admissible_path(const SparsePathMatrix& m);

/// Returns m unchanged when it admits a path; otherwise adds the missing
/// main-diagonal cells with weight max(existing weights).
SparsePathMatrix ensure_connectivity(const SparsePathMatrix& m);

/// Text format: `SPM v1 T=<T> theta=<theta> gamma=<gamma>` header (an
/// optional ` source=<id>` token follows when set), then `row col weight`
/// lines, 1-based, weights with 17 significant digits.
void write_spm(std::ostream& out, const SparsePathMatrix& m);
SparsePathMatrix read_spm(std::istream& in);
void save_spm(const std::string& path, const SparsePathMatrix& m);
SparsePathMatrix load_spm(const std::string& path);

/// Learned grid for one training set, reused across threshold / weight choices.
struct LearnedGrid {
  CountGrid counts;
  OccupancyGrid occupancy;

  static LearnedGrid learn(const Dataset& train, LocalCost cost, unsigned workers = 0);
  SparsePathMatrix sparsify(const SparsifyConfig& cfg) const { return elastic::sparsify(counts, occupancy, cfg); }
  /// Largest theta that keeps both corners.
  std::int64_t max_admissible_theta() const;
};

}  // namespace elastic

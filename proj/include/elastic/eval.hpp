#pragma once

// Classification harness: measure specifications, pairwise comparison
// matrices, 1-NN and kernel-SVM evaluation, leave-one-out / k-fold
// hyperparameter search and speed-up accounting.

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elastic/elastic_dense.hpp"
#include "elastic/elastic_sparse.hpp"
#include "elastic/measures_basic.hpp"
#include "elastic/path_sparsifier.hpp"
#include "elastic/series.hpp"
#include "elastic/svm.hpp"

namespace elastic {

enum class MeasureKind { ed, minkowski, corr, daco, dtw, dtw_sc, krdtw, krdtw_sc, sp_dtw, sp_krdtw };

std::string_view to_string(MeasureKind kind);
/// Accepts the names above; throws ParameterError otherwise.
MeasureKind parse_measure_kind(std::string_view name);

constexpr bool is_kernel(MeasureKind k) {
  return k == MeasureKind::krdtw || k == MeasureKind::krdtw_sc || k == MeasureKind::sp_krdtw;
}
constexpr bool is_sparse(MeasureKind k) { return k == MeasureKind::sp_dtw || k == MeasureKind::sp_krdtw; }
/// Larger value means closer.
constexpr bool is_similarity(MeasureKind k) { return k == MeasureKind::corr || is_kernel(k); }

struct MeasureSpec {
  MeasureKind kind = MeasureKind::ed;
  LocalCost cost = LocalCost::squared_difference;
  double minkowski_p = 2.0;
  DacoConfig daco{};
  BandConfig band{};
  KernelConfig kernel{};
  SparsifyConfig sparsify{};

  /// Checks the parameters the kind uses against series length T.
  void validate(Eigen::Index length) const;
  /// `key=value` pairs of the parameters the kind uses, `;`-separated.
  std::string params() const;
};

struct PairValue {
  double value = 0;
  std::int64_t visited = 0;
};

/// A measure bound to its learned state (the path matrix for sparse kinds).
class Measure {
 public:
  explicit Measure(MeasureSpec spec, std::shared_ptr<const SparsePathMatrix> spm = {});

  /// Raw value: distance, correlation, or log kernel.
  PairValue operator()(const TimeSeries& x, const TimeSeries& y) const;

  const MeasureSpec& spec() const noexcept { return spec_; }
  const SparsePathMatrix* path_matrix() const noexcept { return spm_.get(); }
  bool similarity() const noexcept { return is_similarity(spec_.kind); }
  /// Value(x, y) == value(y, x) for every pair.
  bool symmetric() const noexcept { return symmetric_; }

  /// Per-series representation the pair function works on (autocorrelation
  /// features for DACO, the raw values otherwise).
  Eigen::VectorXd prepare(const Eigen::VectorXd& x) const;
  PairValue on_prepared(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

 private:
  MeasureSpec spec_;
  std::shared_ptr<const SparsePathMatrix> spm_;
  bool symmetric_ = true;
};

/// Builds the path matrix for sparse kinds from a learned grid.
Measure bind(const MeasureSpec& spec, const LearnedGrid* grid);

struct ComparisonMatrix {
  Eigen::MatrixXd values;      ///< queries x references
  std::int64_t visited = 0;    ///< cells over the query/reference pairs
  std::int64_t comparisons = 0;
};

/// Kernel kinds are cosine-normalized in log domain:
/// log K(x,y) - log K(x,x)/2 - log K(y,y)/2.
ComparisonMatrix compare(const Dataset& queries, const Dataset& references, const Measure& m, unsigned workers = 0);
/// Square matrix over one set (diagonal included).
ComparisonMatrix compare_within(const Dataset& data, const Measure& m, unsigned workers = 0);

/// Index of the closest reference in `row` (ties: lowest index), skipping `exclude`.
Eigen::Index nearest(const Eigen::Ref<const Eigen::RowVectorXd>& row, bool similarity, Eigen::Index exclude = -1);

double error_rate(std::span<const int> predicted, std::span<const int> truth);

struct EvalReport {
  double error_rate = 0;
  std::vector<int> predictions;
  std::int64_t total_visited = 0;
  std::int64_t comparisons = 0;
  double speedup_pct = 0;
  std::string chosen_params;
};

/// 100 (1 - visited / T^2)
double speedup(std::int64_t visited, std::int64_t length);
/// Speed-up of the mean visited count per comparison.
double mean_speedup(std::int64_t total_visited, std::int64_t comparisons, std::int64_t length);

EvalReport onenn(const Dataset& train, const Dataset& test, const Measure& m, unsigned workers = 0);
double loo_error(const Dataset& train, const Measure& m, unsigned workers = 0);
double loo_error(const Eigen::MatrixXd& within, std::span<const int> labels, bool similarity);

// ---- hyperparameter search ----

struct Lattice {
  std::vector<std::int64_t> thetas;
  std::vector<double> gammas;
  std::vector<double> nus;  ///< multiplied by nu_scale(train) when scale_nus is set
  bool scale_nus = true;
  std::vector<int> band_pcts;
  std::vector<double> cs;
  std::vector<int> daco_ks;

  /// theta 0..15, gamma {0,.25,.5,1,2}, nu {.01,.1,1,10}, band 0..20 %,
  /// C {.1,1,10,100}, DACO k {1, ceil(T/8), ceil(T/4), ceil(T/2), T-1}.
  static Lattice defaults(Eigen::Index length);
};

struct TuneOptions {
  unsigned workers = 0;
  std::uint64_t seed = 42;
  int folds = 5;
};

/// 1 / median of squared differences between randomly paired sample values
/// of the training set.
double nu_scale(const Dataset& train, std::uint64_t seed);

/// Every combination of the parameters `base.kind` tunes, preferred (sparser /
/// smaller) points first; other fields are copied from `base`. Thetas that
/// would remove a corner are skipped.
std::vector<MeasureSpec> expand_lattice(const MeasureSpec& base, const Lattice& lattice, const Dataset& train,
                                        const TuneOptions& opt, const LearnedGrid* grid);

/// Orders by larger theta, smaller band, smaller gamma, smaller nu, smaller k.
bool sparser_first(const MeasureSpec& a, const MeasureSpec& b);

struct GridPoint {
  MeasureSpec spec;
  double error = 0;
  double c = 0;  ///< SVM only
};

struct GridSearchResult {
  MeasureSpec best;
  double best_error = 1;
  std::vector<GridPoint> curve;
};

/// Leave-one-out 1-NN error of every lattice point on the training set.
/// Ties keep the earliest point; pass the lattice preferred-first.
GridSearchResult grid_search_loo(const Dataset& train, std::span<const MeasureSpec> lattice, const TuneOptions& opt,
                                 const LearnedGrid* grid = nullptr);

struct TunedMeasure {
  Measure measure;
  GridSearchResult search;
};

/// Grid search on train, then binds the winner.
TunedMeasure tune_onenn(const Dataset& train, const MeasureSpec& base, const TuneOptions& opt, const Lattice& lattice,
                        std::shared_ptr<const LearnedGrid> grid = {});

// ---- SVM ----

/// Normalized kernel matrix exp(cosine-normalized log K). Ed uses the
/// Gaussian kernel exp(-nu d_E^2).
Eigen::MatrixXd kernel_matrix(const Dataset& rows, const Dataset& cols, const Measure& m, unsigned workers,
                              std::int64_t* visited = nullptr);
Eigen::MatrixXd kernel_gram(const Dataset& data, const Measure& m, unsigned workers);

/// Fold id per item; each class is dealt round-robin after a seeded shuffle.
std::vector<int> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed);

double svm_cv_error(const Eigen::MatrixXd& gram, std::span<const int> labels, const SvmConfig& cfg, int folds,
                    std::uint64_t seed);

struct SvmEvaluation {
  EvalReport report;
  MeasureSpec spec;
  double c = 0;
  double cv_error = 0;
  std::vector<GridPoint> curve;
};

/// Tunes kernel parameters and C by stratified k-fold CV on train, trains on
/// the whole training set and predicts the test set.
SvmEvaluation svm_evaluate(const Dataset& train, const Dataset& test, const MeasureSpec& base, const TuneOptions& opt,
                           const Lattice& lattice, std::shared_ptr<const LearnedGrid> grid = {});

/// `dataset,measure,classifier,error_rate,visited_total,speedup_pct,params`
std::string report_header();
std::string report_row(std::string_view dataset, std::string_view measure, std::string_view classifier,
                       const EvalReport& r);

}  // namespace elastic

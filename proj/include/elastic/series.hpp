#pragma once

#include <Eigen/Core>

#include <cmath>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "elastic/errors.hpp"

namespace elastic {

template <typename Scalar>
using SeriesVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// One labeled, uniformly sampled real-valued sequence. Values are finite and
/// the length is at least one.
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(Eigen::VectorXd values, std::optional<int> label = std::nullopt);

  const Eigen::VectorXd& values() const noexcept { return values_; }
  std::optional<int> label() const noexcept { return label_; }
  Eigen::Index size() const noexcept { return values_.size(); }
  double operator[](Eigen::Index t) const { return values_[t]; }

 private:
  Eigen::VectorXd values_;
  std::optional<int> label_;
};

/// Equal-length collection of series. Immutable once built.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<TimeSeries> items, std::string name = {});

  const std::vector<TimeSeries>& items() const noexcept { return items_; }
  const TimeSeries& operator[](std::size_t i) const { return items_[i]; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  /// Common series length T.
  Eigen::Index length() const noexcept { return length_; }
  const std::string& name() const noexcept { return name_; }

  std::vector<int> labels() const;

  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

 private:
  std::vector<TimeSeries> items_;
  Eigen::Index length_ = 0;
  std::string name_;
};

/// Parses `label<delim>v1<delim>...<delim>vT` lines. With no delimiter the
/// first line decides: tab, then comma, then runs of blanks (older archive
/// releases).
Dataset load_ucr(const std::filesystem::path& path, std::optional<char> delimiter = std::nullopt);
Dataset parse_ucr(std::istream& in, std::optional<char> delimiter = std::nullopt,
                  std::string name = {});

/// Writes with 17 significant digits so that parsing the output reproduces
/// every value bit for bit.
void write_ucr(std::ostream& out, const Dataset& data, char delimiter = '\t');

template <typename Derived>
SeriesVector<typename Derived::Scalar> znormalized(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.size();
  if (n < 2) throw DegenerateSeriesError("z-normalization needs at least two samples");
  Scalar sum = 0;
  for (Eigen::Index t = 0; t < n; ++t) sum += x(t);
  const Scalar mean = sum / static_cast<Scalar>(n);
  Scalar ss = 0;
  for (Eigen::Index t = 0; t < n; ++t) ss += (x(t) - mean) * (x(t) - mean);
  const Scalar sigma = std::sqrt(ss / static_cast<Scalar>(n));
  if (!(sigma > 0)) throw DegenerateSeriesError("constant series cannot be z-normalized");
  return ((x.derived().array() - mean) / sigma).matrix();
}

/// Mean 0, population standard deviation 1. Label is carried over.
TimeSeries znormalize(const TimeSeries& x);
Dataset znormalize(const Dataset& data);

struct NormalizationDeviation {
  double max_abs_mean = 0;
  double max_abs_sigma_error = 0;
};

/// Largest |mean| and |sigma - 1| (population sigma) across the dataset.
NormalizationDeviation normalization_deviation(const Dataset& data);

}  // namespace elastic

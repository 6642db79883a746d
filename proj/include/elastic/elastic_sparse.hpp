#pragma once

// SP-DTW and SP-K_rdtw: the DTW and K_rdtw recursions evaluated only on the
// cells of a SparsePathMatrix, in one pass over its row-major entry stream.
// Storage is two rolling rows; cells outside the entry set read as the
// sentinel (SP-DTW) or zero (SP-K_rdtw).

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "elastic/elastic_dense.hpp"
#include "elastic/path_sparsifier.hpp"

namespace elastic {

struct SparseEvalResult {
  double value = 0;  ///< cost for SP-DTW, log kernel for SP-K_rdtw
  std::int64_t visited = 0;
  bool reachable = false;
};

namespace detail {

template <typename DX, typename DY>
void require_matches(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y, const SparsePathMatrix& m) {
  if (x.size() != m.length() || y.size() != m.length()) {
    throw DimensionError("series lengths (" + std::to_string(x.size()) + ", " + std::to_string(y.size()) +
                         ") do not match the path matrix size " + std::to_string(m.length()));
  }
}

// Two rows of a grid, recycled as the entry stream advances. Only columns
// written in a row are reset when the row is retired.
template <typename Scalar>
class RollingRows {
 public:
  RollingRows(std::size_t width, Scalar fill) : fill_(fill), prev_(width, fill), cur_(width, fill) {}

  // Moves to `row`. Returns false when the previous row is not row - 1.
  bool advance(int row) {
    for (int c : prev_cols_) prev_[c] = fill_;
    prev_cols_.clear();
    if (row == row_ + 1) {
      std::swap(prev_, cur_);
      std::swap(prev_cols_, cur_cols_);
    } else {
      for (int c : cur_cols_) cur_[c] = fill_;
      cur_cols_.clear();
    }
    const bool contiguous = row == row_ + 1;
    row_ = row;
    return contiguous;
  }

  Scalar prev(int c) const { return prev_[c]; }
  Scalar cur(int c) const { return cur_[c]; }
  void set(int c, Scalar v) {
    cur_[c] = v;
    cur_cols_.push_back(c);
  }
  Scalar& at(int c) { return cur_[c]; }
  const std::vector<int>& cur_cols() const { return cur_cols_; }
  int row() const { return row_; }

 private:
  Scalar fill_;
  std::vector<Scalar> prev_, cur_;
  std::vector<int> prev_cols_, cur_cols_;
  int row_ = -1;
};

}  // namespace detail

/// Weighted DTW over the learned cells.
template <typename DX, typename DY>
SparseEvalResult sp_dtw(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y, const SparsePathMatrix& m,
                        LocalCost cost = LocalCost::squared_difference) {
  using Scalar = typename DX::Scalar;
  detail::require_matches(x, y, m);
  const int T = m.length();
  const Scalar inf = detail::dtw_sentinel<Scalar>();
  detail::RollingRows<Scalar> rows(static_cast<std::size_t>(T), inf);
  SparseEvalResult out;
  for (const auto& e : m.entries()) {
    if (e.row != rows.row()) rows.advance(e.row);
    const int i = e.row, j = e.col;
    const Scalar c = local_cost<Scalar>(x(i), y(j), cost) * static_cast<Scalar>(e.weight);
    if (i == 0 && j == 0) {
      rows.set(0, c);
    } else {
      const Scalar diag = (i > 0 && j > 0) ? rows.prev(j - 1) : inf;
      const Scalar up = i > 0 ? rows.prev(j) : inf;
      const Scalar left = j > 0 ? rows.cur(j - 1) : inf;
      rows.set(j, detail::dtw_step(c, detail::min3(diag, up, left)));
    }
    ++out.visited;
  }
  const Scalar last = rows.row() == T - 1 ? rows.cur(T - 1) : inf;
  out.value = static_cast<double>(last);
  out.reachable = last < inf;
  return out;
}

/// log SP-K_rdtw; entry weights are ignored.
template <typename DX, typename DY>
SparseEvalResult sp_krdtw(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y, const SparsePathMatrix& m,
                          const KernelConfig& cfg) {
  using Scalar = typename DX::Scalar;
  cfg.validate();
  detail::require_matches(x, y, m);
  const int T = m.length();
  const Scalar nu = static_cast<Scalar>(cfg.nu);
  auto kappa = [nu](Scalar a, Scalar b) {
    const Scalar d = a - b;
    return std::exp(-nu * d * d);
  };
  std::vector<Scalar> kdiag(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) kdiag[t] = kappa(x(t), y(t));

  detail::RollingRows<Scalar> k1(static_cast<std::size_t>(T), 0), k2(static_cast<std::size_t>(T), 0);
  Scalar log_scale = 0;
  Scalar row_max = 0;
  auto rescale = [&] {
    if (row_max > 0) {
      const Scalar inv = Scalar(1) / row_max;
      for (int c : k1.cur_cols()) k1.at(c) *= inv;
      for (int c : k2.cur_cols()) k2.at(c) *= inv;
      log_scale += std::log(row_max);
    }
    row_max = 0;
  };

  SparseEvalResult out;
  for (const auto& e : m.entries()) {
    if (e.row != k1.row()) {
      rescale();
      k1.advance(e.row);
      k2.advance(e.row);
    }
    const int i = e.row, j = e.col;
    Scalar v1, v2;
    if (i == 0 && j == 0) {
      v1 = kdiag[0];
      v2 = kdiag[0];
    } else {
      const Scalar d1 = (i > 0 && j > 0) ? k1.prev(j - 1) : Scalar(0);
      const Scalar u1 = i > 0 ? k1.prev(j) : Scalar(0);
      const Scalar l1 = j > 0 ? k1.cur(j - 1) : Scalar(0);
      const Scalar d2 = (i > 0 && j > 0) ? k2.prev(j - 1) : Scalar(0);
      const Scalar u2 = i > 0 ? k2.prev(j) : Scalar(0);
      const Scalar l2 = j > 0 ? k2.cur(j - 1) : Scalar(0);
      v1 = detail::krdtw_k1(kappa(x(i), y(j)), d1, u1, l1);
      v2 = detail::krdtw_k2(kdiag[i], kdiag[j], d2, u2, l2);
    }
    k1.set(j, v1);
    k2.set(j, v2);
    row_max = std::max(row_max, std::max(v1, v2));
    ++out.visited;
  }
  rescale();
  const Scalar total = k1.row() == T - 1 ? k1.cur(T - 1) + k2.cur(T - 1) : Scalar(0);
  out.reachable = total > 0;
  out.value = out.reachable ? static_cast<double>(std::log(total) + log_scale)
                            : -std::numeric_limits<double>::infinity();
  return out;
}

inline SparseEvalResult sp_dtw(const TimeSeries& x, const TimeSeries& y, const SparsePathMatrix& m,
                               LocalCost cost = LocalCost::squared_difference) {
  return sp_dtw(x.values(), y.values(), m, cost);
}
inline SparseEvalResult sp_krdtw(const TimeSeries& x, const TimeSeries& y, const SparsePathMatrix& m,
                                 const KernelConfig& cfg) {
  return sp_krdtw(x.values(), y.values(), m, cfg);
}

}  // namespace elastic

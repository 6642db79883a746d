#pragma once

// Full-grid elastic measures: DTW with optimal-path backtracking, the
// Sakoe-Chiba banded DTW, the local Gaussian kernel and the K_rdtw kernel
// (plus its banded variant). Kernel values are returned as logarithms.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "elastic/errors.hpp"
#include "elastic/series.hpp"

namespace elastic {

enum class LocalCost { squared_difference, absolute_difference };

template <typename Scalar>
inline Scalar local_cost(Scalar a, Scalar b, LocalCost kind) noexcept {
  const Scalar d = a - b;
  return kind == LocalCost::squared_difference ? d * d : std::abs(d);
}

/// 0-based (row, column) grid coordinate; row indexes the first series.
struct Cell {
  int row = 0;
  int col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Monotone boundary-to-boundary sequence of cells.
struct AlignmentPath {
  std::vector<Cell> cells;
  std::size_t size() const noexcept { return cells.size(); }
};

/// True when the path starts at (0,0), ends at (rows-1, cols-1) and every
/// step moves by 0 or 1 along each axis (and by at least one overall).
bool is_admissible(const AlignmentPath& path, int rows, int cols);

struct DtwResult {
  double value = 0;
  AlignmentPath path;
  std::int64_t visited = 0;
};

struct BandedResult {
  double value = 0;
  std::int64_t visited = 0;
};

/// Sakoe-Chiba radius given as an integer percentage of the series length.
struct BandConfig {
  int pct = 0;

  /// floor(pct * T / 100), capped at T-1.
  int radius(Eigen::Index length) const {
    if (pct < 0 || pct > 100) throw ParameterError("band percentage must lie in [0, 100]");
    const auto r = static_cast<Eigen::Index>(pct) * length / 100;
    return static_cast<int>(std::min<Eigen::Index>(r, std::max<Eigen::Index>(length - 1, 0)));
  }
};

/// Number of cells with |t - t'| <= r on a T x T grid: T(2r+1) - r(r+1).
constexpr std::int64_t band_cell_count(std::int64_t length, std::int64_t radius) noexcept {
  return length * (2 * radius + 1) - radius * (radius + 1);
}

struct KernelConfig {
  double nu = 1.0;

  void validate() const {
    if (!(nu > 0) || !std::isfinite(nu)) throw ParameterError("kernel bandwidth nu must be positive");
  }
};

struct KernelResult {
  double log_value = 0;  ///< log(K1 + K2)
  std::int64_t visited = 0;
  double log_k1 = 0;     ///< log of the K1 term alone
  double log_k2 = 0;
};

/// exp(-nu (a-b)^2)
template <typename Scalar>
inline Scalar local_kernel(Scalar a, Scalar b, const KernelConfig& cfg) {
  cfg.validate();
  const Scalar d = a - b;
  return std::exp(-static_cast<Scalar>(cfg.nu) * d * d);
}

namespace detail {

template <typename Scalar>
constexpr Scalar dtw_sentinel() noexcept {
  return std::numeric_limits<Scalar>::max();
}

// Saturating at the sentinel so that unreachable cells stay unreachable.
template <typename Scalar>
inline Scalar dtw_step(Scalar local, Scalar best_predecessor) noexcept {
  if (best_predecessor >= dtw_sentinel<Scalar>()) return dtw_sentinel<Scalar>();
  const Scalar v = local + best_predecessor;
  return v < dtw_sentinel<Scalar>() ? v : dtw_sentinel<Scalar>();
}

template <typename Scalar>
inline Scalar min3(Scalar diag, Scalar up, Scalar left) noexcept {
  return std::min(diag, std::min(up, left));
}

// One cell of the K_rdtw recursion. `diag`, `up`, `left` are the K1 / K2
// predecessors (zero when absent), `kxy` = kappa(x_i, y_j), `kii` =
// kappa(x_i, y_i), `kjj` = kappa(x_j, y_j).
template <typename Scalar>
inline Scalar krdtw_k1(Scalar kxy, Scalar diag, Scalar up, Scalar left) noexcept {
  return kxy * (diag + up + left) / Scalar(3);
}

template <typename Scalar>
inline Scalar krdtw_k2(Scalar kii, Scalar kjj, Scalar diag, Scalar up, Scalar left) noexcept {
  return ((kii + kjj) / Scalar(2) * diag + up * kii + left * kjj) / Scalar(3);
}

template <typename DX, typename DY>
void require_nonempty(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) {
  if (x.size() == 0 || y.size() == 0) throw DimensionError("elastic measure on an empty series");
}

template <typename DX, typename DY>
void require_square(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) {
  require_nonempty(x, y);
  if (x.size() != y.size()) {
    throw DimensionError("measure needs equal lengths (" + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()) + ")");
  }
}

// Banded DTW value with rolling rows; radius >= T-1 means the full grid.
template <typename DX, typename DY>
BandedResult dtw_banded(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y, LocalCost cost,
                        Eigen::Index radius) {
  using Scalar = typename DX::Scalar;
  const Eigen::Index rows = x.size(), cols = y.size();
  const Scalar inf = dtw_sentinel<Scalar>();
  std::vector<Scalar> prev(static_cast<std::size_t>(cols), inf), cur(static_cast<std::size_t>(cols), inf);
  std::int64_t visited = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - radius);
    const Eigen::Index hi = std::min<Eigen::Index>(cols - 1, i + radius);
    std::fill(cur.begin(), cur.end(), inf);
    for (Eigen::Index j = lo; j <= hi; ++j) {
      const Scalar c = local_cost<Scalar>(x(i), y(j), cost);
      if (i == 0 && j == 0) {
        cur[0] = c;
      } else {
        const Scalar diag = (i > 0 && j > 0) ? prev[j - 1] : inf;
        const Scalar up = i > 0 ? prev[j] : inf;
        const Scalar left = j > 0 ? cur[j - 1] : inf;
        cur[j] = dtw_step(c, min3(diag, up, left));
      }
      ++visited;
    }
    std::swap(prev, cur);
  }
  return {static_cast<double>(prev[cols - 1]), visited};
}

template <typename DX, typename DY>
KernelResult krdtw_banded(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y,
                          const KernelConfig& cfg, Eigen::Index radius) {
  using Scalar = typename DX::Scalar;
  cfg.validate();
  require_square(x, y);
  const Eigen::Index n = x.size();
  const Scalar nu = static_cast<Scalar>(cfg.nu);
  auto kappa = [nu](Scalar a, Scalar b) {
    const Scalar d = a - b;
    return std::exp(-nu * d * d);
  };
  std::vector<Scalar> kdiag(static_cast<std::size_t>(n));
  for (Eigen::Index t = 0; t < n; ++t) kdiag[t] = kappa(x(t), y(t));

  const auto un = static_cast<std::size_t>(n);
  std::vector<Scalar> p1(un, 0), p2(un, 0), c1(un, 0), c2(un, 0);
  Scalar log_scale = 0;
  std::int64_t visited = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - radius);
    const Eigen::Index hi = std::min<Eigen::Index>(n - 1, i + radius);
    std::fill(c1.begin(), c1.end(), Scalar(0));
    std::fill(c2.begin(), c2.end(), Scalar(0));
    Scalar row_max = 0;
    for (Eigen::Index j = lo; j <= hi; ++j) {
      if (i == 0 && j == 0) {
        c1[0] = kdiag[0];
        c2[0] = kdiag[0];
      } else {
        const Scalar d1 = (i > 0 && j > 0) ? p1[j - 1] : Scalar(0);
        const Scalar u1 = i > 0 ? p1[j] : Scalar(0);
        const Scalar l1 = j > 0 ? c1[j - 1] : Scalar(0);
        const Scalar d2 = (i > 0 && j > 0) ? p2[j - 1] : Scalar(0);
        const Scalar u2 = i > 0 ? p2[j] : Scalar(0);
        const Scalar l2 = j > 0 ? c2[j - 1] : Scalar(0);
        c1[j] = krdtw_k1(kappa(x(i), y(j)), d1, u1, l1);
        c2[j] = krdtw_k2(kdiag[i], kdiag[j], d2, u2, l2);
      }
      row_max = std::max(row_max, std::max(c1[j], c2[j]));
      ++visited;
    }
    if (row_max > 0) {
      const Scalar inv = Scalar(1) / row_max;
      for (Eigen::Index j = lo; j <= hi; ++j) {
        c1[j] *= inv;
        c2[j] *= inv;
      }
      log_scale += std::log(row_max);
    }
    std::swap(p1, c1);
    std::swap(p2, c2);
  }
  auto logged = [&](Scalar v) {
    return v > 0 ? static_cast<double>(std::log(v) + log_scale) : -std::numeric_limits<double>::infinity();
  };
  return {logged(p1[n - 1] + p2[n - 1]), visited, logged(p1[n - 1]), logged(p2[n - 1])};
}

}  // namespace detail

/// Accumulated cost matrix D (row-major, rows index x).
template <typename DX, typename DY>
Eigen::Matrix<typename DX::Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> accumulated_cost(
    const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y, LocalCost cost) {
  using Scalar = typename DX::Scalar;
  detail::require_nonempty(x, y);
  const Eigen::Index rows = x.size(), cols = y.size();
  const Scalar inf = detail::dtw_sentinel<Scalar>();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> D(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const Scalar c = local_cost<Scalar>(x(i), y(j), cost);
      if (i == 0 && j == 0) {
        D(0, 0) = c;
        continue;
      }
      const Scalar diag = (i > 0 && j > 0) ? D(i - 1, j - 1) : inf;
      const Scalar up = i > 0 ? D(i - 1, j) : inf;
      const Scalar left = j > 0 ? D(i, j - 1) : inf;
      D(i, j) = detail::dtw_step(c, detail::min3(diag, up, left));
    }
  }
  return D;
}

/// Backtracks one optimal path. Ties prefer the diagonal, then the cell above
/// (row - 1), then the cell to the left (col - 1).
template <typename Derived>
AlignmentPath backtrack(const Eigen::MatrixBase<Derived>& D) {
  AlignmentPath path;
  int i = static_cast<int>(D.rows()) - 1;
  int j = static_cast<int>(D.cols()) - 1;
  path.cells.reserve(static_cast<std::size_t>(i + j + 1));
  path.cells.push_back({i, j});
  while (i > 0 || j > 0) {
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      const auto diag = D(i - 1, j - 1);
      const auto up = D(i - 1, j);
      const auto left = D(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    }
    path.cells.push_back({i, j});
  }
  std::reverse(path.cells.begin(), path.cells.end());
  return path;
}

template <typename DX, typename DY>
DtwResult dtw(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y,
              LocalCost cost = LocalCost::squared_difference) {
  const auto D = accumulated_cost(x, y, cost);
  DtwResult out;
  out.value = static_cast<double>(D(D.rows() - 1, D.cols() - 1));
  out.path = backtrack(D);
  out.visited = static_cast<std::int64_t>(D.size());
  return out;
}

/// DTW value only, in O(T) memory.
template <typename DX, typename DY>
BandedResult dtw_value(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y,
                       LocalCost cost = LocalCost::squared_difference) {
  detail::require_nonempty(x, y);
  return detail::dtw_banded(x, y, cost, std::max(x.size(), y.size()));
}

/// DTW restricted to |t - t'| <= r on the square grid.
template <typename DX, typename DY>
BandedResult dtw_sc(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y, LocalCost cost,
                    BandConfig band) {
  detail::require_square(x, y);
  return detail::dtw_banded(x, y, cost, band.radius(x.size()));
}

/// log K_rdtw(x, y) over the full grid.
template <typename DX, typename DY>
KernelResult krdtw(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y, const KernelConfig& cfg) {
  detail::require_square(x, y);
  return detail::krdtw_banded(x, y, cfg, x.size());
}

/// log K_rdtw restricted to the Sakoe-Chiba corridor.
template <typename DX, typename DY>
KernelResult krdtw_sc(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y, const KernelConfig& cfg,
                      BandConfig band) {
  detail::require_square(x, y);
  return detail::krdtw_banded(x, y, cfg, band.radius(x.size()));
}

inline DtwResult dtw(const TimeSeries& x, const TimeSeries& y, LocalCost cost = LocalCost::squared_difference) {
  return dtw(x.values(), y.values(), cost);
}
inline BandedResult dtw_sc(const TimeSeries& x, const TimeSeries& y, LocalCost cost, BandConfig band) {
  return dtw_sc(x.values(), y.values(), cost, band);
}
inline KernelResult krdtw(const TimeSeries& x, const TimeSeries& y, const KernelConfig& cfg) {
  return krdtw(x.values(), y.values(), cfg);
}
inline KernelResult krdtw_sc(const TimeSeries& x, const TimeSeries& y, const KernelConfig& cfg, BandConfig band) {
  return krdtw_sc(x.values(), y.values(), cfg, band);
}

inline bool is_admissible(const AlignmentPath& path, int rows, int cols) {
  if (path.cells.empty()) return false;
  if (path.cells.front() != Cell{0, 0} || path.cells.back() != Cell{rows - 1, cols - 1}) return false;
  for (std::size_t k = 1; k < path.cells.size(); ++k) {
    const int dr = path.cells[k].row - path.cells[k - 1].row;
    const int dc = path.cells[k].col - path.cells[k - 1].col;
    if (dr < 0 || dr > 1 || dc < 0 || dc > 1 || dr + dc == 0) return false;
  }
  return true;
}

}  // namespace elastic

#pragma once

// Lock-step measures: Euclidean / Minkowski distances, Pearson correlation and
// the difference of autocorrelation operators. Every sum runs in ascending
// index order so results are reproducible bit for bit.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "elastic/errors.hpp"
#include "elastic/series.hpp"

namespace elastic {

/// Norm order p >= 1, or infinity for the max-norm.
class MinkowskiOrder {
 public:
  explicit MinkowskiOrder(double p) : p_(p) {
    if (!(p >= 1.0)) throw ParameterError("Minkowski order must be >= 1");
  }
  static MinkowskiOrder infinity() { return MinkowskiOrder(std::numeric_limits<double>::infinity()); }
  double p() const noexcept { return p_; }
  bool is_infinite() const noexcept { return std::isinf(p_); }

 private:
  double p_;
};

/// Number of autocorrelation lags kept, 1 <= k <= T-1.
struct DacoConfig {
  int k = 1;
};

namespace detail {

template <typename DX, typename DY>
void require_same_length(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) {
  if (x.size() != y.size()) {
    throw DimensionError("series lengths differ (" + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()) + ")");
  }
}

template <typename D>
typename D::Scalar mean(const Eigen::MatrixBase<D>& x) {
  typename D::Scalar s = 0;
  for (Eigen::Index t = 0; t < x.size(); ++t) s += x(t);
  return s / static_cast<typename D::Scalar>(x.size());
}

}  // namespace detail

template <typename DX, typename DY>
typename DX::Scalar euclidean(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) {
  detail::require_same_length(x, y);
  typename DX::Scalar s = 0;
  for (Eigen::Index t = 0; t < x.size(); ++t) {
    const auto d = x(t) - y(t);
    s += d * d;
  }
  return std::sqrt(s);
}

template <typename DX, typename DY>
typename DX::Scalar minkowski(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y,
                              MinkowskiOrder order) {
  using Scalar = typename DX::Scalar;
  detail::require_same_length(x, y);
  if (order.is_infinite()) {
    Scalar m = 0;
    for (Eigen::Index t = 0; t < x.size(); ++t) m = std::max<Scalar>(m, std::abs(x(t) - y(t)));
    return m;
  }
  const Scalar p = static_cast<Scalar>(order.p());
  if (p == Scalar(2)) return euclidean(x, y);
  Scalar s = 0;
  for (Eigen::Index t = 0; t < x.size(); ++t) s += std::pow(std::abs(x(t) - y(t)), p);
  return p == Scalar(1) ? s : std::pow(s, Scalar(1) / p);
}

/// Pearson correlation; a similarity in [-1, 1].
template <typename DX, typename DY>
typename DX::Scalar corr(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) {
  using Scalar = typename DX::Scalar;
  detail::require_same_length(x, y);
  const Scalar mx = detail::mean(x);
  const Scalar my = detail::mean(y);
  Scalar sxy = 0, sxx = 0, syy = 0;
  for (Eigen::Index t = 0; t < x.size(); ++t) {
    const Scalar a = x(t) - mx;
    const Scalar b = y(t) - my;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  if (!(sxx > 0) || !(syy > 0)) throw DegenerateSeriesError("correlation of a constant series");
  const Scalar r = sxy / std::sqrt(sxx * syy);
  return std::clamp<Scalar>(r, -1, 1);
}

/// Lag-tau autocorrelation, 1 <= tau <= T-1.
template <typename D>
typename D::Scalar autocorr(const Eigen::MatrixBase<D>& x, Eigen::Index tau) {
  using Scalar = typename D::Scalar;
  const Eigen::Index n = x.size();
  if (tau < 1 || tau > n - 1) {
    throw ParameterError("autocorrelation lag " + std::to_string(tau) + " outside [1, " +
                         std::to_string(n - 1) + "]");
  }
  const Scalar m = detail::mean(x);
  Scalar den = 0;
  for (Eigen::Index t = 0; t < n; ++t) den += (x(t) - m) * (x(t) - m);
  if (!(den > 0)) throw DegenerateSeriesError("autocorrelation of a constant series");
  Scalar num = 0;
  for (Eigen::Index t = 0; t + tau < n; ++t) num += (x(t) - m) * (x(t + tau) - m);
  return num / den;
}

/// (rho_1(x), ..., rho_k(x)).
template <typename D>
SeriesVector<typename D::Scalar> autocorr_features(const Eigen::MatrixBase<D>& x, int k) {
  using Scalar = typename D::Scalar;
  const Eigen::Index n = x.size();
  if (k < 1 || k > n - 1) {
    throw ParameterError("DACO lag count " + std::to_string(k) + " outside [1, " + std::to_string(n - 1) + "]");
  }
  const Scalar m = detail::mean(x);
  SeriesVector<Scalar> c = (x.derived().array() - m).matrix();
  Scalar den = 0;
  for (Eigen::Index t = 0; t < n; ++t) den += c(t) * c(t);
  if (!(den > 0)) throw DegenerateSeriesError("autocorrelation of a constant series");
  SeriesVector<Scalar> out(k);
  for (int tau = 1; tau <= k; ++tau) {
    Scalar num = 0;
    for (Eigen::Index t = 0; t + tau < n; ++t) num += c(t) * c(t + tau);
    out(tau - 1) = num / den;
  }
  return out;
}

template <typename DX, typename DY>
typename DX::Scalar daco(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y, DacoConfig cfg) {
  detail::require_same_length(x, y);
  const auto fx = autocorr_features(x, cfg.k);
  const auto fy = autocorr_features(y, cfg.k);
  const auto d = euclidean(fx, fy);
  return d * d;
}

inline double euclidean(const TimeSeries& x, const TimeSeries& y) { return euclidean(x.values(), y.values()); }
inline double minkowski(const TimeSeries& x, const TimeSeries& y, MinkowskiOrder p) {
  return minkowski(x.values(), y.values(), p);
}
inline double corr(const TimeSeries& x, const TimeSeries& y) { return corr(x.values(), y.values()); }
inline double autocorr(const TimeSeries& x, Eigen::Index tau) { return autocorr(x.values(), tau); }
inline double daco(const TimeSeries& x, const TimeSeries& y, DacoConfig cfg) {
  return daco(x.values(), y.values(), cfg);
}

}  // namespace elastic

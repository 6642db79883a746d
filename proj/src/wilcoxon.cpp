#include "elastic/wilcoxon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "elastic/errors.hpp"

namespace elastic {

namespace {

// Error rates are printed with three decimals, so differences that agree to
// well below that resolution are the same magnitude.
bool same_magnitude(double a, double b) { return std::abs(a - b) <= 1e-12 + 1e-9 * std::max(std::abs(a), std::abs(b)); }

constexpr int kExactLimit = 25;

}  // namespace

WilcoxonResult wilcoxon_signed_rank_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("paired samples differ in length");
  if (a.size() < 5) throw InsufficientDataError("the signed-rank test needs at least five pairs");

  std::vector<double> d;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    if (std::abs(diff) > 1e-12) d.push_back(diff);
  }
  WilcoxonResult res;
  res.n = static_cast<int>(d.size());
  if (d.empty()) return res;

  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return std::abs(d[x]) < std::abs(d[y]); });

  // Doubled average ranks keep the exact enumeration on integers.
  std::vector<long long> rank2(d.size());
  double tie_term = 0;
  for (std::size_t lo = 0; lo < order.size();) {
    std::size_t hi = lo + 1;
    while (hi < order.size() && same_magnitude(std::abs(d[order[hi]]), std::abs(d[order[lo]]))) ++hi;
    const long long r2 = static_cast<long long>(lo + 1 + hi);  // 2 * mean of ranks lo+1 .. hi
    for (std::size_t k = lo; k < hi; ++k) rank2[order[k]] = r2;
    const double t = static_cast<double>(hi - lo);
    tie_term += t * t * t - t;
    lo = hi;
  }

  long long wplus2 = 0, total2 = 0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    total2 += rank2[k];
    if (d[k] > 0) wplus2 += rank2[k];
  }
  res.w_plus = static_cast<double>(wplus2) / 2;
  res.w_minus = static_cast<double>(total2 - wplus2) / 2;

  const double n = static_cast<double>(d.size());
  if (res.n <= kExactLimit) {
    // count[s] = number of sign assignments whose positive doubled-rank sum is s
    std::vector<double> count(static_cast<std::size_t>(total2 + 1), 0.0);
    count[0] = 1;
    long long reach = 0;
    for (const long long r : rank2) {
      for (long long s = reach; s >= 0; --s) {
        if (count[s] != 0) count[s + r] += count[s];
      }
      reach += r;
    }
    const double all = std::ldexp(1.0, res.n);
    double le = 0, ge = 0;
    for (long long s = 0; s <= total2; ++s) {
      if (s <= wplus2) le += count[s];
      if (s >= wplus2) ge += count[s];
    }
    res.exact = true;
    res.p_value = std::min(1.0, 2.0 * std::min(le, ge) / all);
    return res;
  }

  const double mean = n * (n + 1) / 4;
  const double var = n * (n + 1) * (2 * n + 1) / 24 - tie_term / 48;
  if (!(var > 0)) return res;
  const double z = std::max(0.0, std::abs(res.w_plus - mean) - 0.5) / std::sqrt(var);
  res.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return res;
}

}  // namespace elastic

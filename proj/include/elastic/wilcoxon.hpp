#pragma once

#include <span>

namespace elastic {

struct WilcoxonResult {
  double w_plus = 0;   ///< rank sum of positive differences
  double w_minus = 0;  ///< rank sum of negative differences
  int n = 0;           ///< non-zero differences kept
  bool exact = false;
  double p_value = 1;  ///< two-sided
};

/// Wilcoxon signed-rank test on paired samples (|a| = |b| >= 5). Zero
/// differences are dropped and tied magnitudes get average ranks. The null
/// distribution is enumerated exactly for n <= 25, otherwise the normal
/// approximation with tie-corrected variance and continuity correction is
/// used. All-zero differences give p = 1.
WilcoxonResult wilcoxon_signed_rank_test(std::span<const double> a, std::span<const double> b);

inline double wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  return wilcoxon_signed_rank_test(a, b).p_value;
}

}  // namespace elastic

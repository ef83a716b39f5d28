#pragma once

#include <cstdint>

namespace cascade {

/// Observation count T(e) and number of observed ones for one item. The
/// empirical mean is derived, so it is always an exact ratio of counts.
struct ItemStats {
  std::uint64_t count = 0;
  std::uint64_t ones = 0;

  /// Undefined (returns 0) while count is 0.
  double mean() const {
    return count == 0 ? 0.0 : static_cast<double>(ones) / static_cast<double>(count);
  }
  bool operator==(const ItemStats&) const = default;
};

/// Folds one 0/1 observation into the running mean.
ItemStats update_mean(ItemStats stats, int observation);

/// sqrt(1.5 ln(t) / s). Requires t >= 1 and s >= 1.
double ucb1_radius(std::uint64_t step, std::uint64_t observations);

/// KL divergence between Bernoulli(p) and Bernoulli(q), with 0 ln 0 = 0 and
/// +inf where q puts zero mass on an outcome that p can produce.
double bernoulli_kl(double p, double q);

/// ln(t) + 3 ln(max(1, ln t)); zero at t = 1 and nondecreasing.
double klucb_threshold(std::uint64_t step);

inline constexpr double kKlUcbTolerance = 1e-9;
inline constexpr int kKlUcbMaxIterations = 100;

/// Largest q in [mean, 1] with count * kl(mean, q) <= threshold.
///
/// The root of g(q) = count * kl(mean, q) - threshold is kept inside a
/// bracket [lo, hi], seeded from the chi-square upper bound on kl (for lo)
/// and the (q-p)^2/(2q) and Pinsker lower bounds (for hi). g is convex and
/// increasing on [mean, 1], so Newton steps from hi stay above the root and
/// lo can be raised to hi - g(hi)/g'(lo) without another evaluation. A
/// bisection step stands in whenever Newton stalls. Stops once the bracket
/// is narrower than kKlUcbTolerance (or after kKlUcbMaxIterations) and
/// returns lo, so the result is feasible and never exceeds the exact root;
/// it is exactly 1 only when mean is 1.
double klucb_upper(double mean, std::uint64_t count, double threshold);

/// True when the KL-UCB of (mean, count) at `threshold` lies strictly below
/// `level`, decided with a single divergence evaluation.
bool klucb_below(double mean, std::uint64_t count, double threshold, double level);

}  // namespace cascade

#include "cascade/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cascade/core.hpp"

namespace cascade {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// p ln p + (1-p) ln(1-p), with 0 ln 0 = 0.
double neg_entropy(double p) {
  double out = 0.0;
  if (p > 0.0) out += p * std::log(p);
  if (p < 1.0) out += (1.0 - p) * std::log1p(-p);
  return out;
}

// count * kl(p, q) - threshold for p < 1 and q in [p, 1].
struct DivergenceGap {
  double p;
  double scale;
  double threshold;
  double base;

  double operator()(double q) const {
    if (q >= 1.0) return kInf;
    double cross = (1.0 - p) * std::log1p(-q);
    if (p > 0.0) cross += p * std::log(q);
    return scale * (base - cross) - threshold;
  }

  double slope(double q) const { return scale * (q - p) / (q * (1.0 - q)); }
};

}  // namespace

ItemStats update_mean(ItemStats stats, int observation) {
  if (observation != 0 && observation != 1) {
    throw InputError("observation must be 0 or 1, got " + std::to_string(observation));
  }
  ++stats.count;
  stats.ones += static_cast<std::uint64_t>(observation);
  return stats;
}

double ucb1_radius(std::uint64_t step, std::uint64_t observations) {
  if (step == 0) throw InputError("ucb1_radius: step must be >= 1");
  if (observations == 0) throw InputError("ucb1_radius: observation count must be >= 1");
  return std::sqrt(1.5 * std::log(static_cast<double>(step)) /
                   static_cast<double>(observations));
}

double bernoulli_kl(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
    throw InputError("bernoulli_kl: arguments must lie in [0,1]");
  }
  double out = 0.0;
  if (p > 0.0) {
    if (q == 0.0) return kInf;
    out += p * std::log(p / q);
  }
  if (p < 1.0) {
    if (q == 1.0) return kInf;
    out += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  }
  return std::max(out, 0.0);
}

double klucb_threshold(std::uint64_t step) {
  if (step == 0) throw InputError("klucb_threshold: step must be >= 1");
  const double log_t = std::log(static_cast<double>(step));
  return log_t + 3.0 * std::log(std::max(1.0, log_t));
}

double klucb_upper(double mean, std::uint64_t count, double threshold) {
  if (!(mean >= 0.0 && mean <= 1.0)) throw InputError("klucb_upper: mean outside [0,1]");
  if (count == 0) throw InputError("klucb_upper: count must be >= 1");
  if (!(threshold >= 0.0)) throw InputError("klucb_upper: threshold must be >= 0");
  if (mean >= 1.0 || threshold == 0.0) return mean;

  const double p = mean;
  const double scale = static_cast<double>(count);
  const double r = threshold / scale;
  const DivergenceGap g{p, scale, threshold, neg_entropy(p)};

  // Analytic bracket. kl(p,q) <= (q-p)^2 / (q(1-q)) puts the root above
  // the chi-square point; kl(p,q) >= (q-p)^2 / (2q) and Pinsker put it below
  // the smaller of the other two.
  const double b = 2.0 * p + r;
  double lo = (b + std::sqrt(std::max(0.0, b * b - 4.0 * (1.0 + r) * p * p))) / (2.0 * (1.0 + r));
  double hi = std::min({1.0, p + r + std::sqrt(r * r + 2.0 * p * r), p + std::sqrt(0.5 * r)});
  lo = std::clamp(lo, p, hi);
  double g_hi = g(hi);
  if (g(lo) > 0.0) lo = p;  // rounding guard
  if (g_hi <= 0.0) return hi < 1.0 ? hi : lo;

  for (int iter = 0; iter < kKlUcbMaxIterations; ++iter) {
    // g is convex, so its slope on [lo, root] is at least g'(lo) and the
    // root lies within g(hi) / g'(lo) of hi.
    if (lo > p && std::isfinite(g_hi)) lo = std::max(lo, hi - g_hi / g.slope(lo));
    if (hi - lo <= kKlUcbTolerance) break;

    double next = 0.5 * (lo + hi);
    if (std::isfinite(g_hi)) {
      const double newton = hi - g_hi / g.slope(hi);  // stays above the root
      if (newton > lo && newton < hi && hi - newton > 1e-3 * (hi - lo)) next = newton;
    }
    const double value = g(next);
    if (value > 0.0) {
      hi = next;
      g_hi = value;
    } else {
      lo = next;
    }
  }
  // The bracket is exact only up to rounding. Back off until the divergence
  // itself admits lo, so klucb_below() never rejects a solver output.
  double step = 4.0 * std::numeric_limits<double>::epsilon() * std::max(lo, 1e-300);
  while (lo > p && scale * bernoulli_kl(p, lo) > threshold) {
    lo = std::max(p, lo - step);
    step *= 2.0;
  }
  return lo;
}

bool klucb_below(double mean, std::uint64_t count, double threshold, double level) {
  if (level <= mean) return false;
  if (level > 1.0) return true;
  return static_cast<double>(count) * bernoulli_kl(mean, level) > threshold;
}

}  // namespace cascade

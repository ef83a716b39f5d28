#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cascade/core.hpp"

namespace cascade {

/// Raised when a bound is undefined for the given instance, e.g. a
/// suboptimal item ties with the K-th best one.
class UndefinedBound : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// sum_{e > K} 12 / Delta_{e,K} * ln n + (pi^2 / 3) L, items ranked by
/// decreasing mean.
double ucb1_bound(const AttractionModel& model, std::size_t list_size, std::uint64_t n);

/// Logarithmic term of the CascadeKL-UCB bound plus 7 K ln ln n:
///
///   sum_{e > K} (1 + eps) Delta_{e,K} (1 + ln(1 / Delta_{e,K})) / kl(w(e), w(K))
///               * (ln n + 3 ln ln n)  +  7 K ln ln n
///
/// The K L C2(eps) / n^beta(eps) term has no closed form here and is left
/// out, so the value underestimates the full bound. Requires n >= 3.
double klucb_bound_leading(const AttractionModel& model, std::size_t list_size,
                           std::uint64_t n, double epsilon);

/// (L - K) Delta (1 - p)^(K-1) / kl(p - Delta, p): the constant in front of
/// ln n in the asymptotic lower bound on the synthetic instance. Zero for
/// p = 1, where the bound degenerates.
double lower_bound_constant(std::size_t num_items, std::size_t list_size, double p,
                            double delta);

struct BoundReport {
  std::uint64_t n = 0;
  double ucb1_upper = 0.0;
  double klucb_upper_leading = 0.0;
  double lower_constant = 0.0;
  double lower_asymptotic = 0.0;  // lower_constant * ln n
  std::string instance;
  std::vector<std::string> notes;
};

/// Evaluates all three bounds on the synthetic instance B(L, K, p, delta).
BoundReport bound_report(std::size_t num_items, std::size_t list_size, double p, double delta,
                         std::uint64_t n, double epsilon);

std::string format_bound_report(const BoundReport& report);

struct Lemma1Result {
  double lhs;  // exact E[prod w(a_k) - prod w(b_k)] by enumeration
  double rhs;  // telescoped sum of expectations
};

/// Both sides of the product-difference decomposition for lists with
/// a_i = b_j only if i = j. Enumerates all 2^L weight vectors, so L <= 12.
Lemma1Result lemma1_oracle(std::span<const ItemId> a, std::span<const ItemId> b,
                           const AttractionModel& model);

struct Lemma3Result {
  double lhs;
  double rhs;
  bool holds;
};

/// Peeling inequality for p_1 >= ... >= p_K > p with Delta_k = p_k - p:
///
///   Delta_1 / kl(p, p_1) + sum_{k>=2} Delta_k (1/kl(p, p_k) - 1/kl(p, p_{k-1}))
///     <= Delta_K (1 + ln(1 / Delta_K)) / kl(p, p_K)
Lemma3Result lemma3_check(std::span<const double> ps, double p);

}  // namespace cascade

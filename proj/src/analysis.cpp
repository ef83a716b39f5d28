#include "cascade/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "cascade/environments.hpp"
#include "cascade/estimation.hpp"

namespace cascade {

namespace {

struct RankedMeans {
  std::vector<double> sorted;  // decreasing
  double kth;
};

RankedMeans rank_means(const AttractionModel& model, std::size_t list_size) {
  if (list_size == 0 || list_size > model.size()) {
    throw InputError("bound needs 1 <= K <= L");
  }
  std::vector<double> sorted(model.means().begin(), model.means().end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  return {sorted, sorted[list_size - 1]};
}

double suboptimal_gap(const RankedMeans& ranked, std::size_t rank) {
  const double delta = ranked.kth - ranked.sorted[rank];
  if (!(delta > 0.0)) {
    throw UndefinedBound("suboptimal item at rank " + std::to_string(rank + 1) +
                         " has zero gap to the K-th best item");
  }
  return delta;
}

}  // namespace

double ucb1_bound(const AttractionModel& model, std::size_t list_size, std::uint64_t n) {
  if (n < 1) throw InputError("ucb1_bound: n must be >= 1");
  const RankedMeans ranked = rank_means(model, list_size);
  const double log_n = std::log(static_cast<double>(n));
  double total = 0.0;
  for (std::size_t r = list_size; r < ranked.sorted.size(); ++r) {
    total += 12.0 / suboptimal_gap(ranked, r) * log_n;
  }
  return total + std::numbers::pi * std::numbers::pi / 3.0 * static_cast<double>(model.size());
}

double klucb_bound_leading(const AttractionModel& model, std::size_t list_size,
                           std::uint64_t n, double epsilon) {
  if (n < 3) throw InputError("klucb_bound_leading: n must be >= 3");
  if (!(epsilon > 0.0)) throw InputError("klucb_bound_leading: epsilon must be > 0");
  const RankedMeans ranked = rank_means(model, list_size);
  const double log_n = std::log(static_cast<double>(n));
  const double loglog_n = std::log(log_n);
  double constant = 0.0;
  for (std::size_t r = list_size; r < ranked.sorted.size(); ++r) {
    const double delta = suboptimal_gap(ranked, r);
    constant += (1.0 + epsilon) * delta * (1.0 + std::log(1.0 / delta)) /
                bernoulli_kl(ranked.sorted[r], ranked.kth);
  }
  return constant * (log_n + 3.0 * loglog_n) +
         7.0 * static_cast<double>(list_size) * loglog_n;
}

double lower_bound_constant(std::size_t num_items, std::size_t list_size, double p,
                            double delta) {
  if (list_size < 1 || list_size > num_items) throw InputError("lower bound needs 1 <= K <= L");
  if (!(p > 0.0 && p <= 1.0) || !(delta > 0.0 && delta < p)) {
    throw InputError("lower bound needs 0 < delta < p <= 1");
  }
  if (p >= 1.0 || list_size == num_items) return 0.0;
  return static_cast<double>(num_items - list_size) * delta *
         std::pow(1.0 - p, static_cast<double>(list_size - 1)) / bernoulli_kl(p - delta, p);
}

BoundReport bound_report(std::size_t num_items, std::size_t list_size, double p, double delta,
                         std::uint64_t n, double epsilon) {
  const AttractionModel model(blb_means(num_items, list_size, p, delta));
  BoundReport report;
  report.n = n;
  std::ostringstream desc;
  desc << "B_LB(L=" << num_items << ", K=" << list_size << ", p=" << p << ", delta=" << delta
       << ")";
  report.instance = desc.str();
  report.ucb1_upper = ucb1_bound(model, list_size, n);
  report.klucb_upper_leading = klucb_bound_leading(model, list_size, n, epsilon);
  report.lower_constant = lower_bound_constant(num_items, list_size, p, delta);
  report.lower_asymptotic = report.lower_constant * std::log(static_cast<double>(n));
  report.notes.push_back(
      "KL-UCB value omits the K L C2(eps)/n^beta(eps) term; it underestimates the full bound");
  if (p >= 1.0) report.notes.push_back("p = 1: lower bound degenerates to 0");
  return report;
}

std::string format_bound_report(const BoundReport& r) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(3);
  out << "instance              " << r.instance << "\n"
      << "n                     " << r.n << "\n"
      << "cascade-ucb1 upper    " << r.ucb1_upper << "\n"
      << "cascade-klucb leading " << r.klucb_upper_leading << "\n"
      << "lower constant        " << r.lower_constant << "\n"
      << "lower asymptotic      " << r.lower_asymptotic << "  (constant * ln n)\n";
  for (const auto& note : r.notes) out << "note: " << note << "\n";
  return out.str();
}

Lemma1Result lemma1_oracle(std::span<const ItemId> a, std::span<const ItemId> b,
                           const AttractionModel& model) {
  const std::size_t num_items = model.size();
  if (num_items > 12) throw InputError("lemma1_oracle enumerates 2^L vectors; needs L <= 12");
  if (a.size() != b.size()) throw InputError("lemma1_oracle: lists differ in length");
  validate_list(a, num_items);
  validate_list(b, num_items);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (i != j && a[i] == b[j]) {
        throw InputError("lemma1_oracle: a_i = b_j with i != j");
      }
    }
  }

  double lhs = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << num_items); ++mask) {
    double prob = 1.0;
    for (std::size_t e = 0; e < num_items; ++e) {
      prob *= (mask >> e) & 1u ? model[e] : 1.0 - model[e];
    }
    auto all_set = [&](std::span<const ItemId> list) {
      return std::all_of(list.begin(), list.end(), [&](ItemId e) { return (mask >> e) & 1u; });
    };
    lhs += prob * ((all_set(a) ? 1.0 : 0.0) - (all_set(b) ? 1.0 : 0.0));
  }

  double rhs = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double term = model[a[k]] - model[b[k]];
    for (std::size_t i = 0; i < k; ++i) term *= model[a[i]];
    for (std::size_t j = k + 1; j < b.size(); ++j) term *= model[b[j]];
    rhs += term;
  }
  return {lhs, rhs};
}

Lemma3Result lemma3_check(std::span<const double> ps, double p) {
  if (ps.empty()) throw InputError("lemma3_check: need at least one probability");
  for (double q : ps) {
    if (!(q >= 0.0 && q <= 1.0)) throw InputError("lemma3_check: probabilities must be in [0,1]");
  }
  for (std::size_t k = 1; k < ps.size(); ++k) {
    if (ps[k] > ps[k - 1]) throw InputError("lemma3_check: probabilities must be nonincreasing");
  }
  if (!(p >= 0.0 && p < ps.back())) throw InputError("lemma3_check: need 0 <= p < p_K");

  auto inv_kl = [&](double q) { return 1.0 / bernoulli_kl(p, q); };
  double lhs = (ps[0] - p) * inv_kl(ps[0]);
  for (std::size_t k = 1; k < ps.size(); ++k) {
    lhs += (ps[k] - p) * (inv_kl(ps[k]) - inv_kl(ps[k - 1]));
  }
  const double delta_last = ps.back() - p;
  const double rhs = delta_last * (1.0 + std::log(1.0 / delta_last)) * inv_kl(ps.back());
  return {lhs, rhs, lhs <= rhs + 1e-10};
}

}  // namespace cascade

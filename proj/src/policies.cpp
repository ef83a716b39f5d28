#include "cascade/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cascade {

namespace {

void check_initial_sample(std::span<const std::uint8_t> w0) {
  if (w0.empty()) throw InputError("initial sample is empty");
  for (auto bit : w0) {
    if (bit > 1) throw InputError("initial sample must be binary");
  }
}

ItemStats seeded_stats(std::uint8_t bit) { return ItemStats{1, bit}; }

constexpr double kPruned = -std::numeric_limits<double>::infinity();

// KL-UCBs of the items that can make the top `count`; every other entry is
// set to kPruned. Solved values never exceed the exact root, so the smallest
// solved value among `count` provisional picks is at or below the count-th
// largest exact UCB, and an item whose divergence at that level already
// exceeds the threshold ranks strictly below all picks. top_k over the
// result therefore matches top_k over a full compute_ucbs().
// Any choice of picks gives the same answer; good picks (the previous
// step's winners) just prune more.
void klucb_candidates(std::span<const ItemStats> stats, double threshold, std::size_t count,
                      std::span<const ItemId> hint, std::vector<double>& out) {
  const std::size_t n = stats.size();
  out.assign(n, kPruned);
  Recommendation picks(hint.begin(), hint.end());
  // The pruning level is only safe with `count` distinct solved items.
  bool usable = picks.size() == count;
  for (std::size_t i = 0; usable && i < picks.size(); ++i) {
    usable = picks[i] < n && std::find(picks.begin(), picks.begin() + i, picks[i]) ==
                                 picks.begin() + i;
  }
  if (!usable) {
    std::vector<double> proxy(n);
    for (std::size_t e = 0; e < n; ++e) {
      const double p = stats[e].mean();
      const double r = threshold / static_cast<double>(stats[e].count);
      proxy[e] = p + std::sqrt(2.0 * p * (1.0 - p) * r);
    }
    picks = top_k(proxy, count);
  }
  double level = std::numeric_limits<double>::infinity();
  for (ItemId e : picks) {
    if (out[e] != kPruned) continue;
    out[e] = klucb_upper(stats[e].mean(), stats[e].count, threshold);
    level = std::min(level, out[e]);
  }
  for (std::size_t e = 0; e < n; ++e) {
    if (out[e] != kPruned) continue;
    if (!klucb_below(stats[e].mean(), stats[e].count, threshold, level)) {
      out[e] = klucb_upper(stats[e].mean(), stats[e].count, threshold);
    }
  }
}

}  // namespace

PolicyState initialize(std::span<const std::uint8_t> w0, Ordering ordering) {
  check_initial_sample(w0);
  PolicyState state;
  state.stats.reserve(w0.size());
  for (auto bit : w0) state.stats.push_back(seeded_stats(bit));
  state.step = 1;
  state.ordering = ordering;
  return state;
}

std::vector<double> compute_ucbs(const PolicyState& state, UcbRule rule) {
  std::vector<double> out(state.stats.size());
  switch (rule) {
    case UcbRule::Ucb1: {
      const std::uint64_t t = std::max<std::uint64_t>(state.step - 1, 1);
      for (std::size_t e = 0; e < out.size(); ++e) {
        const ItemStats& s = state.stats[e];
        out[e] = s.mean() + ucb1_radius(t, s.count);
      }
      break;
    }
    case UcbRule::KlUcb: {
      const double threshold = klucb_threshold(state.step);
      for (std::size_t e = 0; e < out.size(); ++e) {
        const ItemStats& s = state.stats[e];
        out[e] = klucb_upper(s.mean(), s.count, threshold);
      }
      break;
    }
  }
  return out;
}

Recommendation select(const PolicyState& state, UcbRule rule, std::size_t list_size,
                      std::vector<double>& ucb_scratch, std::span<const ItemId> hint) {
  if (list_size == 0 || list_size > state.stats.size()) {
    throw InputError("select: K=" + std::to_string(list_size) + " with L=" +
                     std::to_string(state.stats.size()));
  }
  if (rule == UcbRule::KlUcb) {
    klucb_candidates(state.stats, klucb_threshold(state.step), list_size, hint,
                     ucb_scratch);
  } else {
    ucb_scratch = compute_ucbs(state, rule);
  }
  Recommendation list = top_k(ucb_scratch, list_size);
  if (state.ordering == Ordering::IncreasingUcb) std::reverse(list.begin(), list.end());
  return list;
}

Recommendation select(const PolicyState& state, UcbRule rule, std::size_t list_size) {
  std::vector<double> scratch;
  return select(state, rule, list_size, scratch, {});
}

void update(PolicyState& state, std::span<const ItemId> list,
            const CascadeFeedback& feedback) {
  for (const Observation& obs : observed_weights(feedback, list.size())) {
    const ItemId item = list[obs.position - 1];
    if (item >= state.stats.size()) throw InputError("update: item out of range");
    state.stats[item] = update_mean(state.stats[item], obs.weight);
  }
  ++state.step;
}

RankedState initialize_ranked(std::span<const std::uint8_t> w0, std::size_t list_size) {
  check_initial_sample(w0);
  if (list_size == 0 || list_size > w0.size()) {
    throw InputError("ranked bandits need 1 <= K <= L");
  }
  std::vector<ItemStats> seeded;
  seeded.reserve(w0.size());
  for (auto bit : w0) seeded.push_back(seeded_stats(bit));
  RankedState state;
  state.position_bandits.assign(list_size, seeded);
  state.step = 1;
  return state;
}

RankedSelection ranked_select(const RankedState& state, std::span<const ItemId> hint) {
  const std::size_t list_size = state.position_bandits.size();
  const std::size_t num_items = list_size ? state.position_bandits.front().size() : 0;
  const double threshold = klucb_threshold(state.step);

  RankedSelection out;
  out.displayed.reserve(list_size);
  out.proposals.reserve(list_size);
  std::vector<bool> placed(num_items, false);
  std::vector<double> ucbs;
  for (std::size_t k = 0; k < list_size; ++k) {
    const auto& bandit = state.position_bandits[k];
    klucb_candidates(bandit, threshold, 1,
                     hint.size() == list_size ? hint.subspan(k, 1) : std::span<const ItemId>{},
                     ucbs);
    const ItemId best = top_k(ucbs, 1).front();
    out.proposals.push_back(best);
    ItemId shown = best;
    if (placed[shown]) {
      shown = static_cast<ItemId>(std::find(placed.begin(), placed.end(), false) -
                                  placed.begin());
    }
    placed[shown] = true;
    out.displayed.push_back(shown);
  }
  return out;
}

void ranked_update(RankedState& state, const RankedSelection& selection,
                   std::span<const std::size_t> clicks) {
  const std::size_t list_size = state.position_bandits.size();
  if (selection.proposals.size() != list_size || selection.displayed.size() != list_size) {
    throw InputError("ranked_update: selection does not match the number of positions");
  }
  for (std::size_t k = 0; k < list_size; ++k) {
    const ItemId arm = selection.proposals[k];
    const bool clicked = std::find(clicks.begin(), clicks.end(), k + 1) != clicks.end();
    const int reward = (clicked && arm == selection.displayed[k]) ? 1 : 0;
    auto& bandit = state.position_bandits[k];
    bandit[arm] = update_mean(bandit[arm], reward);
  }
  ++state.step;
}

Recommendation oracle_select(const AttractionModel& model, std::size_t list_size) {
  return optimal_list(model, list_size);
}

Recommendation oracle_select(const DbnEnv& env, std::size_t list_size) {
  return env.optimal_list(list_size);
}

CascadeUcbPolicy::CascadeUcbPolicy(UcbRule rule, Ordering ordering, std::size_t list_size)
    : rule_(rule), ordering_(ordering), list_size_(list_size) {
  if (list_size == 0) throw InputError("list size must be >= 1");
}

void CascadeUcbPolicy::initialize(std::span<const std::uint8_t> w0) {
  if (list_size_ > w0.size()) throw InputError("list size exceeds number of items");
  state_ = cascade::initialize(w0, ordering_);
}

const Recommendation& CascadeUcbPolicy::select() {
  current_ = cascade::select(state_, rule_, list_size_, ucbs_, current_);
  return current_;
}

void CascadeUcbPolicy::observe(std::span<const std::size_t> clicks) {
  const CascadeFeedback feedback =
      clicks.empty() ? CascadeFeedback::none() : CascadeFeedback::at(clicks.back());
  cascade::update(state_, current_, feedback);
}

void RankedKlUcbPolicy::initialize(std::span<const std::uint8_t> w0) {
  state_ = initialize_ranked(w0, list_size_);
}

const Recommendation& RankedKlUcbPolicy::select() {
  current_ = ranked_select(state_, current_.proposals);
  return current_.displayed;
}

void RankedKlUcbPolicy::observe(std::span<const std::size_t> clicks) {
  ranked_update(state_, current_, clicks);
}

}  // namespace cascade

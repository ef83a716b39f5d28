#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cascade/core.hpp"
#include "cascade/environments.hpp"
#include "cascade/estimation.hpp"

namespace cascade {

enum class UcbRule { Ucb1, KlUcb };

/// How the K selected items are laid out in the displayed list.
enum class Ordering { DecreasingUcb, IncreasingUcb };

/// Learning state of the cascade UCB algorithms: one ItemStats per item
/// and the 1-based index of the step about to be played.
struct PolicyState {
  std::vector<ItemStats> stats;
  std::uint64_t step = 1;
  Ordering ordering = Ordering::DecreasingUcb;
};

/// T(e) = 1 and mean w0(e) for every item; step 1.
PolicyState initialize(std::span<const std::uint8_t> w0, Ordering ordering);

/// Upper confidence bounds for the step held in `state`. UCB1 uses the
/// radius c_{t-1, T(e)} (zero while t - 1 < 1); KL-UCB inverts the
/// divergence at klucb_threshold(t).
std::vector<double> compute_ucbs(const PolicyState& state, UcbRule rule);

/// K largest UCBs (ties to the lower index), laid out per state.ordering.
Recommendation select(const PolicyState& state, UcbRule rule, std::size_t list_size);

/// Same as select() but reuses caller-provided UCB storage. Under KL-UCB
/// only items that can reach the top K get a full solve (the rest hold
/// -inf in `ucb_scratch`); `hint`, typically the previous list, seeds that
/// search and never changes the result.
Recommendation select(const PolicyState& state, UcbRule rule, std::size_t list_size,
                      std::vector<double>& ucb_scratch, std::span<const ItemId> hint);

/// Folds the observations implied by `feedback` into the stats and advances
/// the step counter.
void update(PolicyState& state, std::span<const ItemId> list,
            const CascadeFeedback& feedback);

/// One KL-UCB bandit per list position.
struct RankedState {
  std::vector<std::vector<ItemStats>> position_bandits;
  std::uint64_t step = 1;
};

RankedState initialize_ranked(std::span<const std::uint8_t> w0, std::size_t list_size);

struct RankedSelection {
  Recommendation displayed;
  std::vector<ItemId> proposals;
};

/// Position k's bandit proposes its KL-UCB argmax; a proposal already shown
/// higher up is replaced on screen by the lowest-index unplaced item.
/// `hint` (previous proposals) only speeds up the argmax.
RankedSelection ranked_select(const RankedState& state,
                              std::span<const ItemId> hint = {});

/// Every position's proposed arm gets reward 1 iff its position was clicked
/// and the proposal was the displayed item, 0 otherwise.
void ranked_update(RankedState& state, const RankedSelection& selection,
                   std::span<const std::size_t> clicks);

/// Common driver interface used by the experiment harness. Click positions
/// are 1-based and ascending; cascade learners read only the last one.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual void initialize(std::span<const std::uint8_t> w0) = 0;
  virtual const Recommendation& select() = 0;
  virtual void observe(std::span<const std::size_t> clicks) = 0;
};

/// CascadeUCB1 / CascadeKL-UCB.
class CascadeUcbPolicy final : public Policy {
 public:
  CascadeUcbPolicy(UcbRule rule, Ordering ordering, std::size_t list_size);

  void initialize(std::span<const std::uint8_t> w0) override;
  const Recommendation& select() override;
  void observe(std::span<const std::size_t> clicks) override;

  const PolicyState& state() const { return state_; }

 private:
  UcbRule rule_;
  Ordering ordering_;
  std::size_t list_size_;
  PolicyState state_;
  Recommendation current_;
  std::vector<double> ucbs_;
};

/// RankedKL-UCB baseline.
class RankedKlUcbPolicy final : public Policy {
 public:
  explicit RankedKlUcbPolicy(std::size_t list_size) : list_size_(list_size) {}

  void initialize(std::span<const std::uint8_t> w0) override;
  const Recommendation& select() override;
  void observe(std::span<const std::size_t> clicks) override;

  const RankedState& state() const { return state_; }

 private:
  std::size_t list_size_;
  RankedState state_;
  RankedSelection current_;
};

/// The environment's optimal list; used by the oracle baseline.
Recommendation oracle_select(const AttractionModel& model, std::size_t list_size);
Recommendation oracle_select(const DbnEnv& env, std::size_t list_size);

/// Plays a fixed list and ignores feedback.
class OraclePolicy final : public Policy {
 public:
  explicit OraclePolicy(Recommendation optimal) : optimal_(std::move(optimal)) {}

  void initialize(std::span<const std::uint8_t>) override {}
  const Recommendation& select() override { return optimal_; }
  void observe(std::span<const std::size_t>) override {}

 private:
  Recommendation optimal_;
};

}  // namespace cascade

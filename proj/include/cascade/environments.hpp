#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "cascade/core.hpp"

namespace cascade {

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed of run `run_index`: mix64(master_seed ^ mix64(run_index + 0x9e3779b97f4a7c15)).
std::uint64_t derive_run_seed(std::uint64_t master_seed, std::uint64_t run_index);

/// Seeded stream of uniforms. Bit-reproducible for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng for_run(std::uint64_t master_seed, std::uint64_t run_index) {
    return Rng(derive_run_seed(master_seed, run_index));
  }

  /// Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

/// Means of the synthetic instance: p for the first K items, p - delta after.
std::vector<double> blb_means(std::size_t num_items, std::size_t list_size, double p,
                              double delta);

struct CascadeStep {
  CascadeFeedback feedback;
  WeightVector weights;
};

/// Cascade user with independent Bernoulli attractions.
class CascadeEnv {
 public:
  explicit CascadeEnv(AttractionModel model) : model_(std::move(model)) {}

  const AttractionModel& model() const { return model_; }
  std::size_t num_items() const { return model_.size(); }

  /// Draws every item's attraction bit into `out` (resized to L).
  void draw_weights(Rng& rng, WeightVector& out) const;

  /// Full step: realized weights plus the click they induce on `list`.
  CascadeStep step(std::span<const ItemId> list, Rng& rng) const;

  /// The free sample w0 used to seed the estimates.
  WeightVector init_sample(Rng& rng) const;

 private:
  AttractionModel model_;
};

CascadeEnv make_blb(std::size_t num_items, std::size_t list_size, double p, double delta);

/// Clicks (1-based, ascending) and whether the user ended satisfied. The
/// satisfaction flag is hidden from policies.
struct DbnFeedback {
  std::vector<std::size_t> clicks;
  bool satisfied = false;
};

/// One step's worth of randomness for the DBN user, shared between lists so
/// that two lists can be compared on common draws.
struct DbnDraws {
  WeightVector attracted;               // per item
  WeightVector satisfied;               // per item
  std::vector<std::uint8_t> persists;   // per position
};

/// Dynamic Bayesian network click model: attraction rho, satisfaction nu and
/// persistence gamma.
class DbnEnv {
 public:
  DbnEnv(std::vector<double> attraction, std::vector<double> satisfaction,
         double persistence);

  std::size_t num_items() const { return attraction_.size(); }
  std::span<const double> attraction() const { return attraction_; }
  std::span<const double> satisfaction() const { return satisfaction_; }
  double persistence() const { return persistence_; }

  /// rho(e) * nu(e): chance that e satisfies the user once examined.
  std::span<const double> weights() const { return weights_; }

  void draw(Rng& rng, std::size_t list_size, DbnDraws& out) const;

  /// Deterministic scan of `list` against pre-drawn randomness.
  DbnFeedback simulate(std::span<const ItemId> list, const DbnDraws& draws) const;

  DbnFeedback step(std::span<const ItemId> list, Rng& rng) const;

  /// One Bernoulli(rho * nu) bit per item.
  WeightVector init_sample(Rng& rng) const;

  /// Probability that the scan of `list` ends satisfied:
  /// sum_k gamma^(k-1) w(a_k) prod_{i<k} (1 - w(a_i)) with w = rho * nu.
  double expected_value(std::span<const ItemId> list) const;

  /// Top-K items by rho * nu, decreasing, ties to the lower index.
  Recommendation optimal_list(std::size_t list_size) const;

 private:
  std::vector<double> attraction_;
  std::vector<double> satisfaction_;
  std::vector<double> weights_;
  double persistence_;
};

/// Reads the last click as the cascade click; no clicks means all K
/// positions were unattractive.
CascadeFeedback cascade_adapter(const DbnFeedback& feedback, std::size_t list_size);

}  // namespace cascade

#include "cascade/environments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cascade {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_run_seed(std::uint64_t master_seed, std::uint64_t run_index) {
  return mix64(master_seed ^ mix64(run_index + 0x9e3779b97f4a7c15ULL));
}

std::vector<double> blb_means(std::size_t num_items, std::size_t list_size, double p,
                              double delta) {
  if (list_size < 1 || list_size > num_items) {
    throw InputError("synthetic instance needs 1 <= K <= L");
  }
  if (!(p > 0.0 && p <= 1.0)) throw InputError("synthetic instance needs 0 < p <= 1");
  if (!(delta > 0.0 && delta < p)) throw InputError("synthetic instance needs 0 < delta < p");
  std::vector<double> means(num_items, p - delta);
  std::fill_n(means.begin(), list_size, p);
  return means;
}

void CascadeEnv::draw_weights(Rng& rng, WeightVector& out) const {
  out.resize(model_.size());
  for (std::size_t e = 0; e < model_.size(); ++e) {
    out[e] = rng.bernoulli(model_[e]) ? 1 : 0;
  }
}

CascadeStep CascadeEnv::step(std::span<const ItemId> list, Rng& rng) const {
  validate_list(list, model_.size());
  CascadeStep out;
  draw_weights(rng, out.weights);
  out.feedback = first_click(list, out.weights);
  return out;
}

WeightVector CascadeEnv::init_sample(Rng& rng) const {
  WeightVector w;
  draw_weights(rng, w);
  return w;
}

CascadeEnv make_blb(std::size_t num_items, std::size_t list_size, double p, double delta) {
  return CascadeEnv(AttractionModel(blb_means(num_items, list_size, p, delta)));
}

DbnEnv::DbnEnv(std::vector<double> attraction, std::vector<double> satisfaction,
               double persistence)
    : attraction_(std::move(attraction)),
      satisfaction_(std::move(satisfaction)),
      persistence_(persistence) {
  if (attraction_.empty()) throw InputError("DBN model needs at least one item");
  if (attraction_.size() != satisfaction_.size()) {
    throw InputError("DBN attraction and satisfaction vectors differ in length");
  }
  if (!(persistence_ > 0.0 && persistence_ <= 1.0)) {
    throw InputError("DBN persistence must lie in (0,1]");
  }
  weights_.resize(attraction_.size());
  for (std::size_t e = 0; e < attraction_.size(); ++e) {
    const double rho = attraction_[e];
    const double nu = satisfaction_[e];
    if (!(rho >= 0.0 && rho <= 1.0) || !(nu >= 0.0 && nu <= 1.0)) {
      throw InputError("DBN probabilities must lie in [0,1]");
    }
    weights_[e] = rho * nu;
  }
}

void DbnEnv::draw(Rng& rng, std::size_t list_size, DbnDraws& out) const {
  const std::size_t n = attraction_.size();
  out.attracted.resize(n);
  out.satisfied.resize(n);
  out.persists.resize(list_size);
  for (std::size_t e = 0; e < n; ++e) {
    out.attracted[e] = rng.bernoulli(attraction_[e]) ? 1 : 0;
    out.satisfied[e] = rng.bernoulli(satisfaction_[e]) ? 1 : 0;
  }
  for (std::size_t k = 0; k < list_size; ++k) {
    out.persists[k] = rng.bernoulli(persistence_) ? 1 : 0;
  }
}

DbnFeedback DbnEnv::simulate(std::span<const ItemId> list, const DbnDraws& draws) const {
  if (draws.persists.size() < list.size()) {
    throw InputError("DBN draws cover fewer positions than the list");
  }
  DbnFeedback out;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const ItemId item = list[k];
    if (item >= attraction_.size()) throw InputError("DBN list item out of range");
    if (draws.attracted[item]) {
      out.clicks.push_back(k + 1);
      if (draws.satisfied[item]) {
        out.satisfied = true;
        break;
      }
    }
    if (!draws.persists[k]) break;
  }
  return out;
}

DbnFeedback DbnEnv::step(std::span<const ItemId> list, Rng& rng) const {
  validate_list(list, attraction_.size());
  DbnDraws draws;
  draw(rng, list.size(), draws);
  return simulate(list, draws);
}

WeightVector DbnEnv::init_sample(Rng& rng) const {
  WeightVector w(weights_.size());
  for (std::size_t e = 0; e < weights_.size(); ++e) {
    w[e] = rng.bernoulli(weights_[e]) ? 1 : 0;
  }
  return w;
}

double DbnEnv::expected_value(std::span<const ItemId> list) const {
  validate_list(list, weights_.size());
  double value = 0.0;
  double reach = 1.0;  // gamma^(k-1) prod_{i<k} (1 - w(a_i))
  for (ItemId item : list) {
    value += reach * weights_[item];
    reach *= persistence_ * (1.0 - weights_[item]);
  }
  return value;
}

Recommendation DbnEnv::optimal_list(std::size_t list_size) const {
  return top_k(weights_, list_size);
}

CascadeFeedback cascade_adapter(const DbnFeedback& feedback, std::size_t list_size) {
  if (feedback.clicks.empty()) return CascadeFeedback::none();
  const std::size_t last = *std::max_element(feedback.clicks.begin(), feedback.clicks.end());
  if (last == 0 || last > list_size) {
    throw InputError("DBN click position " + std::to_string(last) + " outside list");
  }
  return CascadeFeedback::at(last);
}

}  // namespace cascade

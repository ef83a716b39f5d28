#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "cascade/core.hpp"

using namespace cascade;

namespace {

// Probability of the binary vector `mask` under independent Bernoulli means.
double mask_probability(std::uint32_t mask, std::span<const double> means) {
  double prob = 1.0;
  for (std::size_t e = 0; e < means.size(); ++e) {
    prob *= (mask >> e) & 1u ? means[e] : 1.0 - means[e];
  }
  return prob;
}

WeightVector mask_bits(std::uint32_t mask, std::size_t n) {
  WeightVector w(n);
  for (std::size_t e = 0; e < n; ++e) w[e] = (mask >> e) & 1u;
  return w;
}

}  // namespace

TEST_CASE("list_value on small lists") {
  const Recommendation a{0, 1};
  CHECK(list_value(a, std::vector<double>{0, 0, 0}) == 0.0);
  CHECK(list_value(a, WeightVector{1, 0, 0}) == 1.0);
  CHECK(list_value(a, std::vector<double>{0.2, 0.2}) == doctest::Approx(1 - 0.8 * 0.8));
  CHECK_THROWS_AS(list_value(Recommendation{0, 3}, std::vector<double>{0.1, 0.1}), InputError);
}

TEST_CASE("list_value is permutation invariant and monotone") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> w(6);
    for (auto& x : w) x = u(rng);
    Recommendation a{0, 2, 3, 5};
    const double base = list_value(a, w);
    CHECK(base >= 0.0);
    CHECK(base <= 1.0);
    std::shuffle(a.begin(), a.end(), rng);
    CHECK(list_value(a, w) == doctest::Approx(base).epsilon(1e-14));
    w[a[0]] = std::min(1.0, w[a[0]] + 0.1);
    CHECK(list_value(a, w) >= base - 1e-15);
  }
}

TEST_CASE("first_click picks the first attractive position") {
  const Recommendation a{3, 1, 2};
  CHECK(first_click(a, WeightVector{0, 0, 0, 0}) == CascadeFeedback::none());
  CHECK(first_click(a, WeightVector{0, 1, 0, 0}) == CascadeFeedback::at(2));
  CHECK(first_click(a, WeightVector{1, 1, 1, 1}) == CascadeFeedback::at(1));
}

TEST_CASE("no click iff zero reward, over every weight vector for L <= 4") {
  for (std::size_t n = 1; n <= 4; ++n) {
    std::vector<ItemId> items(n);
    std::iota(items.begin(), items.end(), 0);
    for (std::size_t k = 1; k <= n; ++k) {
      const Recommendation a(items.begin(), items.begin() + static_cast<long>(k));
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        const WeightVector w = mask_bits(mask, n);
        CHECK((!first_click(a, w).clicked()) == (list_value(a, w) == 0.0));
      }
    }
  }
}

TEST_CASE("observed_weights follows the cascade reveal rule") {
  using V = std::vector<Observation>;
  CHECK(observed_weights(CascadeFeedback::at(2), 4) == V{{1, 0}, {2, 1}});
  CHECK(observed_weights(CascadeFeedback::none(), 3) == V{{1, 0}, {2, 0}, {3, 0}});
  CHECK(observed_weights(CascadeFeedback::at(1), 4) == V{{1, 1}});
  for (std::size_t c = 1; c <= 5; ++c) {
    const auto obs = observed_weights(CascadeFeedback::at(c), 5);
    CHECK(obs.size() == c);
    CHECK(std::count_if(obs.begin(), obs.end(), [](auto o) { return o.weight == 1; }) == 1);
    CHECK(obs.back().weight == 1);
  }
}

TEST_CASE("optimal_list orders by mean with index tie-break") {
  const AttractionModel m({0.2, 0.2, 0.05, 0.05});
  CHECK(optimal_list(m, 2) == Recommendation{0, 1});
  CHECK(optimal_list(m, 4) == Recommendation{0, 1, 2, 3});
  CHECK(optimal_list(AttractionModel({0.5, 0.5, 0.5}), 2) == Recommendation{0, 1});
  CHECK(optimal_list(AttractionModel({0.1, 0.3, 0.2}), 2) == Recommendation{1, 2});
}

TEST_CASE("gap and instantaneous regret") {
  const AttractionModel m({0.2, 0.05});
  CHECK(gap(m, 1, 0) == doctest::Approx(0.15));
  CHECK(gap(m, 0, 0) == 0.0);
  CHECK(instantaneous_regret(Recommendation{0}, Recommendation{0}, WeightVector{1, 0}) == 0.0);
  CHECK(instantaneous_regret(Recommendation{0}, Recommendation{1}, WeightVector{1, 0}) == 1.0);
}

TEST_CASE("expected reward and regret match the mean-vector formula for L <= 4") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (std::size_t n = 1; n <= 4; ++n) {
    std::vector<double> means(n);
    for (auto& x : means) x = u(rng);
    std::vector<ItemId> items(n);
    std::iota(items.begin(), items.end(), 0);
    std::shuffle(items.begin(), items.end(), rng);
    const std::size_t k = 1 + rng() % n;
    const Recommendation a(items.begin(), items.begin() + static_cast<long>(k));
    const Recommendation best = optimal_list(AttractionModel(means), k);
    double value = 0.0, regret = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      const double prob = mask_probability(mask, means);
      const WeightVector w = mask_bits(mask, n);
      value += prob * list_value(a, w);
      regret += prob * instantaneous_regret(best, a, w);
    }
    CHECK(value == doctest::Approx(list_value(a, means)).epsilon(1e-12));
    CHECK(regret ==
          doctest::Approx(list_value(best, means) - list_value(a, means)).epsilon(1e-12));
  }
}

TEST_CASE("validation rejects malformed lists and models") {
  CHECK_THROWS_AS(validate_list(Recommendation{}, 3), InputError);
  CHECK_THROWS_AS(validate_list(Recommendation{1, 1}, 3), InputError);
  CHECK_THROWS_AS(validate_list(Recommendation{0, 3}, 3), InputError);
  CHECK_THROWS_AS(AttractionModel({0.5, 1.5}), InputError);
  CHECK_THROWS_AS(AttractionModel(std::vector<double>{}), InputError);
}

TEST_CASE("format_list prints one-based ids") {
  CHECK(format_list(Recommendation{0, 4, 1}) == "(1, 5, 2)");
}

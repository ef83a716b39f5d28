#include <doctest.h>

#include <cmath>
#include <random>

#include "cascade/core.hpp"
#include "cascade/estimation.hpp"

using namespace cascade;

TEST_CASE("update_mean keeps an exact ratio") {
  ItemStats s{1, 0};
  s = update_mean(s, 1);
  CHECK(s.count == 2);
  CHECK(s.mean() == 0.5);
  CHECK(update_mean(ItemStats{3, 3}, 1).mean() == 1.0);
  CHECK_THROWS_AS(update_mean(s, 2), InputError);

  std::mt19937_64 rng(3);
  ItemStats folded;
  int ones = 0;
  for (int i = 0; i < 1000; ++i) {
    const int bit = static_cast<int>(rng() & 1u);
    ones += bit;
    folded = update_mean(folded, bit);
  }
  CHECK(folded.mean() == static_cast<double>(ones) / 1000.0);
}

TEST_CASE("ucb1_radius") {
  CHECK(ucb1_radius(1, 1) == 0.0);
  CHECK(ucb1_radius(7, 3) == doctest::Approx(std::sqrt(1.5 * std::log(7.0) / 3.0)));
  CHECK(ucb1_radius(1000, 1) == doctest::Approx(3.2189490394340209).epsilon(1e-12));
  for (std::uint64_t s = 1; s < 50; ++s) CHECK(ucb1_radius(1000, s + 1) <= ucb1_radius(1000, s));
  CHECK_THROWS_AS(ucb1_radius(0, 1), InputError);
  CHECK_THROWS_AS(ucb1_radius(5, 0), InputError);
}

TEST_CASE("bernoulli_kl closed forms") {
  CHECK(bernoulli_kl(0.3, 0.3) == 0.0);
  CHECK(bernoulli_kl(0.2, 0.5) == doctest::Approx(0.19274475702175743).epsilon(1e-12));
  CHECK(bernoulli_kl(0.05, 0.2) == doctest::Approx(0.09394302602433173).epsilon(1e-12));
  for (double q : {0.1, 0.5, 0.9}) {
    CHECK(bernoulli_kl(0.0, q) == doctest::Approx(-std::log(1 - q)).epsilon(1e-14));
  }
  CHECK(std::isinf(bernoulli_kl(0.5, 1.0)));
  CHECK(std::isinf(bernoulli_kl(0.5, 0.0)));
  CHECK(bernoulli_kl(1.0, 1.0) == 0.0);
  CHECK_THROWS_AS(bernoulli_kl(-0.1, 0.5), InputError);
}

TEST_CASE("klucb_threshold") {
  CHECK(klucb_threshold(1) == 0.0);
  CHECK(klucb_threshold(2) == doctest::Approx(0.69314718055994531));  // clamp active
  CHECK(klucb_threshold(3) == doctest::Approx(1.3807557715182067).epsilon(1e-12));
  CHECK(klucb_threshold(15) == doctest::Approx(5.6967368799563947).epsilon(1e-12));
  double prev = 0.0;
  for (std::uint64_t t = 1; t < 5000; ++t) {
    const double v = klucb_threshold(t);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("klucb_upper boundary values and reference roots") {
  CHECK(klucb_upper(1.0, 5, 3.0) == 1.0);
  CHECK(klucb_upper(0.3, 5, 0.0) == 0.3);
  CHECK(klucb_upper(0.0, 1, 1.0) == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-9));
  // Roots from an independent high-precision solver.
  CHECK(std::abs(klucb_upper(0.2, 10, 1.0) - 0.40997305089893056) < 1e-8);
  CHECK(std::abs(klucb_upper(0.05, 100, 5.0) - 0.14906249634121880) < 1e-8);
  CHECK_THROWS_AS(klucb_upper(0.5, 0, 1.0), InputError);
  CHECK_THROWS_AS(klucb_upper(1.5, 1, 1.0), InputError);
}

TEST_CASE("klucb_upper agrees with plain bisection") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 2000; ++rep) {
    const std::uint64_t count = 1 + rng() % 50000;
    const std::uint64_t ones = rng() % (count + 1);
    const double mean = static_cast<double>(ones) / static_cast<double>(count);
    const double threshold = std::uniform_real_distribution<double>(0, 30)(rng);
    double lo = mean, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (static_cast<double>(count) * bernoulli_kl(mean, mid) > threshold ? hi : lo) = mid;
    }
    if (mean == 1.0) lo = 1.0;
    CHECK(std::abs(klucb_upper(mean, count, threshold) - lo) < 2e-9);
  }
}

TEST_CASE("klucb_below is consistent with the solver") {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 2000; ++rep) {
    const std::uint64_t count = 1 + rng() % 5000;
    const double mean = static_cast<double>(rng() % (count + 1)) / static_cast<double>(count);
    const double threshold = std::uniform_real_distribution<double>(0.1, 20)(rng);
    const double q = klucb_upper(mean, count, threshold);
    CHECK_FALSE(klucb_below(mean, count, threshold, q));
    if (q + 1e-6 <= 1.0) CHECK(klucb_below(mean, count, threshold, q + 1e-6));
  }
}

#include "cascade/selfcheck.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>

#include "cascade/analysis.hpp"
#include "cascade/environments.hpp"
#include "cascade/estimation.hpp"
#include "cascade/harness.hpp"
#include "cascade/policies.hpp"

namespace cascade {

namespace {

using Engine = std::mt19937_64;

class Tally {
 public:
  explicit Tally(std::string name) { result_.name = std::move(name); }

  void expect(bool ok, const std::string& what) {
    ++result_.cases;
    if (!ok) {
      if (result_.failures == 0) result_.first_failure = what;
      ++result_.failures;
    }
  }

  PropertyResult take() { return std::move(result_); }

 private:
  PropertyResult result_;
};

std::string describe(const char* pattern, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

std::size_t uniform_index(Engine& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double uniform_real(Engine& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<double> random_means(Engine& rng, std::size_t num_items) {
  std::vector<double> means(num_items);
  for (auto& m : means) m = uniform_real(rng, 0.0, 1.0);
  return means;
}

// Random stats with varied counts, including a few extreme means.
std::vector<ItemStats> random_stats(Engine& rng, std::size_t num_items) {
  std::vector<ItemStats> stats(num_items);
  for (auto& s : stats) {
    s.count = uniform_index(rng, 1, 2000);
    switch (uniform_index(rng, 0, 5)) {
      case 0: s.ones = 0; break;
      case 1: s.ones = s.count; break;
      default: s.ones = uniform_index(rng, 0, s.count);
    }
  }
  return stats;
}

}  // namespace

PropertyResult check_lemma1(const SelfcheckOptions& options) {
  Tally tally("lemma1: enumerated expectation equals telescoped sum");
  Engine rng(options.seed);
  for (std::uint64_t c = 0; c < options.lemma1_cases; ++c) {
    const std::size_t num_items = uniform_index(rng, 1, 6);
    const std::size_t list_size = uniform_index(rng, 1, num_items);
    const AttractionModel model(random_means(rng, num_items));

    std::vector<ItemId> items(num_items);
    std::iota(items.begin(), items.end(), 0);
    std::shuffle(items.begin(), items.end(), rng);
    const Recommendation a(items.begin(), items.begin() + static_cast<long>(list_size));
    std::vector<ItemId> spare(items.begin() + static_cast<long>(list_size), items.end());

    // b_j is either a_j or an item outside A not used yet.
    Recommendation b(list_size);
    for (std::size_t j = 0; j < list_size; ++j) {
      if (!spare.empty() && uniform_index(rng, 0, 1) == 1) {
        b[j] = spare.back();
        spare.pop_back();
      } else {
        b[j] = a[j];
      }
    }
    const Lemma1Result r = lemma1_oracle(a, b, model);
    tally.expect(std::abs(r.lhs - r.rhs) < kLemma1Tolerance,
                 describe("lhs %.17g rhs %.17g", r.lhs, r.rhs) + " on " + format_list(a) +
                     " vs " + format_list(b));
  }
  return tally.take();
}

PropertyResult check_lemma3(const SelfcheckOptions& options) {
  Tally tally("lemma3: peeling inequality");
  Engine rng(options.seed + 1);
  for (std::uint64_t c = 0; c < options.lemma3_cases; ++c) {
    const std::size_t list_size = uniform_index(rng, 1, 10);
    const double p = uniform_real(rng, 0.0, 0.95);
    std::vector<double> ps(list_size);
    for (auto& q : ps) {
      do {
        q = uniform_real(rng, p, 1.0);
      } while (!(q > p));
    }
    std::sort(ps.begin(), ps.end(), std::greater<>());
    const Lemma3Result r = lemma3_check(ps, p);
    tally.expect(r.holds, describe("lhs %.17g rhs %.17g", r.lhs, r.rhs));
  }
  return tally.take();
}

PropertyResult check_klucb_solver(const SelfcheckOptions& options) {
  Tally tally("kl-ucb solver: feasible, maximal, monotone, boundary values");
  Engine rng(options.seed + 2);

  tally.expect(std::abs(klucb_upper(0.0, 1, 1.0) - (1.0 - std::exp(-1.0))) < kKlUcbTolerance,
               "klucb(0, 1, 1) != 1 - 1/e");
  for (std::uint64_t count : {1u, 7u, 1000u}) {
    for (double threshold : {0.0, 0.5, 30.0}) {
      tally.expect(klucb_upper(1.0, count, threshold) == 1.0, "klucb(1, ., .) != 1");
    }
  }

  for (std::uint64_t c = 0; c < options.solver_cases; ++c) {
    const std::uint64_t count = uniform_index(rng, 1, 100000);
    const std::uint64_t ones =
        uniform_index(rng, 0, 4) == 0 ? 0 : uniform_index(rng, 0, count);
    const double mean = static_cast<double>(ones) / static_cast<double>(count);
    const double threshold = uniform_real(rng, 0.0, 40.0);
    const double q = klucb_upper(mean, count, threshold);
    const double scale = static_cast<double>(count);

    tally.expect(q >= mean && q <= 1.0, describe("q=%.17g outside [mean=%.17g, 1]", q, mean));
    tally.expect(scale * bernoulli_kl(mean, q) <= threshold + kKlFeasibilitySlack,
                 describe("infeasible q=%.17g at threshold %.17g", q, threshold));
    if (q + kKlMaximalityStep < 1.0) {
      tally.expect(scale * bernoulli_kl(mean, q + kKlMaximalityStep) > threshold,
                   describe("not maximal: q=%.17g threshold %.17g", q, threshold));
    }

    const double wider = klucb_upper(mean, count, threshold * 1.5 + 0.01);
    tally.expect(wider + kKlUcbTolerance >= q,
                 describe("decreased with threshold: %.17g < %.17g", wider, q));
    const double more_data = klucb_upper(mean, count * 2, threshold);
    tally.expect(more_data <= q + kKlUcbTolerance,
                 describe("increased with count: %.17g > %.17g", more_data, q));
  }
  return tally.take();
}

PropertyResult check_observation_conservation(const SelfcheckOptions& options) {
  Tally tally("observation counts: sum (T(e) - 1) = sum min(C_t, K)");
  Engine rng(options.seed + 3);
  for (std::uint64_t r = 0; r < options.conservation_runs; ++r) {
    const std::size_t num_items = uniform_index(rng, 2, 12);
    const std::size_t list_size = uniform_index(rng, 1, num_items);
    const CascadeEnv env(AttractionModel(random_means(rng, num_items)));
    const UcbRule rule = r % 2 == 0 ? UcbRule::Ucb1 : UcbRule::KlUcb;
    const Ordering ordering = r % 4 < 2 ? Ordering::DecreasingUcb : Ordering::IncreasingUcb;

    Rng stream(rng());
    PolicyState state = initialize(env.init_sample(stream), ordering);
    std::uint64_t expected = 0;
    for (int t = 0; t < 500; ++t) {
      const Recommendation list = select(state, rule, list_size);
      const CascadeStep step = env.step(list, stream);
      expected += step.feedback.click ? *step.feedback.click : list_size;
      update(state, list, step.feedback);
    }
    std::uint64_t observed = 0;
    for (const auto& s : state.stats) observed += s.count - 1;
    tally.expect(observed == expected,
                 describe("observed %.0f, expected %.0f", static_cast<double>(observed),
                          static_cast<double>(expected)));
  }
  return tally.take();
}

PropertyResult check_select_optimality(const SelfcheckOptions& options) {
  Tally tally("select: matches exhaustive subset search for L <= 8");
  Engine rng(options.seed + 4);
  std::vector<double> scratch;
  for (std::uint64_t c = 0; c < options.selection_cases; ++c) {
    const std::size_t num_items = uniform_index(rng, 1, 8);
    const std::size_t list_size = uniform_index(rng, 1, num_items);
    PolicyState state;
    state.stats = random_stats(rng, num_items);
    state.step = uniform_index(rng, 1, 100000);
    state.ordering = c % 2 == 0 ? Ordering::DecreasingUcb : Ordering::IncreasingUcb;
    const UcbRule rule = c % 4 < 2 ? UcbRule::KlUcb : UcbRule::Ucb1;

    const std::vector<double> ucbs = compute_ucbs(state, rule);
    // Reward of a list under the UCBs, clipped so UCB1 values act as
    // probabilities; the best value over all subsets is the target.
    std::vector<double> clipped(ucbs);
    for (auto& u : clipped) u = std::min(u, 1.0);
    double best = -1.0;
    for (std::uint32_t mask = 0; mask < (1u << num_items); ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) != list_size) continue;
      Recommendation subset;
      for (std::size_t e = 0; e < num_items; ++e) {
        if ((mask >> e) & 1u) subset.push_back(e);
      }
      best = std::max(best, list_value(subset, clipped));
    }

    const Recommendation picked = select(state, rule, list_size);
    const Recommendation hinted = select(state, rule, list_size, scratch, picked);
    tally.expect(std::abs(list_value(picked, clipped) - best) <= 1e-12,
                 describe("value %.17g, best %.17g", list_value(picked, clipped), best));
    tally.expect(hinted == picked, "hinted selection differs from plain selection");

    // Sum of UCBs must also be maximal, which pins the set beyond ties at 1.
    std::vector<double> sorted(ucbs);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double top = 0.0, chosen = 0.0;
    for (std::size_t k = 0; k < list_size; ++k) {
      top += sorted[k];
      chosen += ucbs[picked[k]];
    }
    tally.expect(std::abs(top - chosen) <= 1e-12 * std::max(1.0, top),
                 describe("UCB sum %.17g below top-K sum %.17g", chosen, top));

    bool ordered = true;
    for (std::size_t k = 1; k < list_size; ++k) {
      const double prev = ucbs[picked[k - 1]];
      const double cur = ucbs[picked[k]];
      ordered &= state.ordering == Ordering::DecreasingUcb ? prev >= cur : prev <= cur;
    }
    tally.expect(ordered, "list not laid out in the requested UCB order");
  }
  return tally.take();
}

PropertyResult check_reruns(const SelfcheckOptions& options) {
  Tally tally("reruns: byte-identical CSV under a fixed seed");
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() /
                       ("cascade-selfcheck-" + std::to_string(options.seed) + "-" +
                        std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  auto slurp = [](const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };

  for (PolicyKind kind : {PolicyKind::CascadeUcb1, PolicyKind::CascadeKlUcb,
                          PolicyKind::RankedKlUcb}) {
    for (EnvironmentKind env : {EnvironmentKind::Cascade, EnvironmentKind::Dbn}) {
      if (kind == PolicyKind::RankedKlUcb && env == EnvironmentKind::Cascade) continue;
      ExperimentConfig config;
      config.environment.kind = env;
      config.environment.list_size = 4;
      config.environment.satisfaction = 0.7;
      config.environment.persistence = 0.7;
      config.policy.kind = kind;
      config.n_steps = 3000;
      config.n_runs = 4;
      config.log_every = 100;
      config.master_seed = options.seed;

      const fs::path first = dir / "first.csv";
      const fs::path second = dir / "second.csv";
      write_results(run_experiment(config, 1), first);
      write_results(run_experiment(config, 3), second);
      const std::string a = slurp(first);
      tally.expect(!a.empty() && a == slurp(second),
                   to_string(kind) + " on " + to_string(env) + ": CSV differs between reruns");
      tally.expect(slurp(json_sibling(first)) == slurp(json_sibling(second)),
                   to_string(kind) + " on " + to_string(env) + ": JSON differs between reruns");
    }
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  return tally.take();
}

std::vector<PropertyResult> run_selfcheck(const SelfcheckOptions& options) {
  return {check_lemma1(options),
          check_lemma3(options),
          check_klucb_solver(options),
          check_observation_conservation(options),
          check_select_optimality(options),
          check_reruns(options)};
}

std::string format_selfcheck(const std::vector<PropertyResult>& results) {
  std::ostringstream out;
  for (const auto& r : results) {
    out << (r.passed() ? "PASS" : "FAIL") << "  " << r.name << " (" << r.cases << " checks, "
        << r.failures << " failures)\n";
    if (!r.first_failure.empty()) out << "      first failure: " << r.first_failure << '\n';
  }
  return out.str();
}

}  // namespace cascade

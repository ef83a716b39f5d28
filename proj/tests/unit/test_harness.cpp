#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>

#include "cascade/harness.hpp"

using namespace cascade;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config(PolicyKind kind, EnvironmentKind env = EnvironmentKind::Cascade) {
  ExperimentConfig c;
  c.environment.kind = env;
  c.environment.list_size = 4;
  c.policy.kind = kind;
  c.n_steps = 2000;
  c.n_runs = 3;
  c.log_every = 100;
  return c;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("cascade-unit-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("checkpoints") {
  ExperimentConfig c;
  CHECK(checkpoint_steps(c).size() == 100);
  c.n_steps = 2500;
  c.log_every = 1000;
  CHECK(checkpoint_steps(c) == std::vector<std::uint64_t>{1000, 2000, 2500});
}

TEST_CASE("oracle has zero regret on the cascade user") {
  const auto trace = run_single(small_config(PolicyKind::Oracle), 0);
  for (const auto& cp : trace.checkpoints) CHECK(cp.cumulative_regret == 0.0);
}

TEST_CASE("oracle has zero regret on the DBN user") {
  auto c = small_config(PolicyKind::Oracle, EnvironmentKind::Dbn);
  c.environment.satisfaction = 0.7;
  c.environment.persistence = 0.7;
  CHECK(run_single(c, 1).checkpoints.back().cumulative_regret == 0.0);
}

TEST_CASE("runs are deterministic and end at n") {
  for (PolicyKind kind : {PolicyKind::CascadeUcb1, PolicyKind::CascadeKlUcb,
                          PolicyKind::RankedKlUcb}) {
    const auto c = small_config(kind, EnvironmentKind::Dbn);
    const auto a = run_single(c, 2), b = run_single(c, 2);
    REQUIRE(a.checkpoints.size() == b.checkpoints.size());
    for (std::size_t i = 0; i < a.checkpoints.size(); ++i) {
      CHECK(a.checkpoints[i].cumulative_regret == b.checkpoints[i].cumulative_regret);
    }
    CHECK(a.checkpoints.back().step == c.n_steps);
  }
}

TEST_CASE("replaying a logged cascade run recovers its regret") {
  const auto c = small_config(PolicyKind::CascadeKlUcb);
  double replayed = 0.0;
  std::uint64_t steps = 0;
  const auto trace = run_single(c, 0, [&](const StepRecord& r) {
    const double recomputed = list_value(r.optimal, r.weights) - list_value(r.chosen, r.weights);
    CHECK(recomputed == r.regret);
    replayed += recomputed;
    ++steps;
  });
  CHECK(steps == c.n_steps);
  CHECK(trace.checkpoints.back().cumulative_regret == doctest::Approx(replayed).epsilon(1e-12));
}

TEST_CASE("run streams differ between policies and runs") {
  const auto ucb = small_config(PolicyKind::CascadeUcb1);
  auto inc = ucb;
  inc.policy.ordering = Ordering::IncreasingUcb;
  const auto kl = small_config(PolicyKind::CascadeKlUcb);
  const double a = run_rng(ucb, 0).uniform();
  CHECK(a == run_rng(ucb, 0).uniform());
  CHECK(a != run_rng(ucb, 1).uniform());
  CHECK(a != run_rng(inc, 0).uniform());
  CHECK(a != run_rng(kl, 0).uniform());
}

TEST_CASE("aggregation ignores trace order") {
  const auto c = small_config(PolicyKind::CascadeUcb1);
  std::vector<RegretTrace> traces;
  for (std::uint64_t r = 0; r < 6; ++r) traces.push_back(run_single(c, r));
  const auto forward = aggregate(c, traces);
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 5; ++rep) {
    std::shuffle(traces.begin(), traces.end(), rng);
    const auto shuffled = aggregate(c, traces);
    for (std::size_t i = 0; i < forward.rows.size(); ++i) {
      CHECK(std::abs(shuffled.rows[i].mean - forward.rows[i].mean) <= 1e-9);
      CHECK(shuffled.rows[i].mean == forward.rows[i].mean);
    }
  }
}

TEST_CASE("mean and standard error") {
  ExperimentConfig c = small_config(PolicyKind::CascadeUcb1);
  c.n_steps = 2;
  c.log_every = 1;
  std::vector<RegretTrace> traces{{0, {{1, 1.0}, {2, 2.0}}},
                                  {1, {{1, 3.0}, {2, 2.0}}},
                                  {2, {{1, 5.0}, {2, 2.0}}}};
  const auto r = aggregate(c, traces);
  CHECK(r.rows[0].mean == 3.0);
  CHECK(*r.rows[0].stderr_ == doctest::Approx(2.0 / std::sqrt(3.0)));
  CHECK(*r.rows[1].stderr_ == 0.0);
  const auto single = aggregate(c, std::span(traces).first(1));
  CHECK(single.rows[0].mean == 1.0);
  CHECK_FALSE(single.rows[0].stderr_.has_value());
}

TEST_CASE("threads do not change results") {
  const auto c = small_config(PolicyKind::CascadeKlUcb);
  const auto one = run_experiment(c, 1), many = run_experiment(c, 3);
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    CHECK(one.rows[i].mean == many.rows[i].mean);
    CHECK(one.rows[i].stderr_ == many.rows[i].stderr_);
  }
}

TEST_CASE("invalid configs fail before running") {
  auto c = small_config(PolicyKind::CascadeUcb1);
  c.environment.list_size = 40;
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
  c = small_config(PolicyKind::CascadeUcb1);
  c.environment.delta = 0.3;
  CHECK_THROWS_AS(run_single(c, 0), ConfigError);
}

TEST_CASE("CSV and JSON output") {
  const auto dir = scratch_dir("csv");
  ExperimentConfig c = small_config(PolicyKind::CascadeUcb1);
  c.n_steps = 10000;
  const auto result = run_experiment(c);
  write_results(result, dir / "a.csv");
  write_results(run_experiment(c), dir / "b.csv");

  const std::string text = slurp(dir / "a.csv");
  CHECK(text == slurp(dir / "b.csv"));
  CHECK(std::count(text.begin(), text.end(), '\n') == 101);
  CHECK(text.rfind("step,mean_cum_regret,stderr,n_runs,config_fingerprint\n", 0) == 0);
  CHECK(text.find(",3," + fingerprint(c) + "\n") != std::string::npos);

  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  const auto first_comma = line.find(',');
  const std::string mean = line.substr(first_comma + 1, line.find(',', first_comma + 1) -
                                                            first_comma - 1);
  CHECK(mean.size() - mean.find('.') - 1 == 6);

  const std::string json = slurp(json_sibling(dir / "a.csv"));
  CHECK(json.find("\"config_fingerprint\": \"" + fingerprint(c) + "\"") != std::string::npos);
  CHECK(json.find("\"mean_cum_regret\"") != std::string::npos);

  ExperimentConfig one = c;
  one.n_runs = 1;
  write_results(run_experiment(one), dir / "one.csv");
  const std::string single = slurp(dir / "one.csv");
  CHECK(single.find(",,1,") != std::string::npos);

  CHECK_THROWS_AS(write_results(result, "/proc/definitely/not/writable.csv"), IoError);
  fs::remove_all(dir);
}

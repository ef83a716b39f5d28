// cascade-bandits: run experiments, print bounds, reproduce the benchmark
// tables and run the property suites.

#include <CLI11.hpp>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "cascade/analysis.hpp"
#include "cascade/config.hpp"
#include "cascade/harness.hpp"
#include "cascade/reproduce.hpp"
#include "cascade/selfcheck.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitAcceptance = 2;
constexpr int kExitRuntime = 3;

constexpr const char* kSeedVariable = "CASCADE_BANDITS_SEED";

std::optional<std::uint64_t> seed_override() {
  const char* raw = std::getenv(kSeedVariable);
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  const std::string text(raw);
  std::uint64_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw cascade::ConfigError(std::string(kSeedVariable) + " is not an unsigned integer: " +
                               text);
  }
  return value;
}

cascade::ExperimentConfig read_config(const std::string& path) {
  auto config = cascade::load_config(path);
  if (auto seed = seed_override()) config.master_seed = *seed;
  cascade::validate(config);
  return config;
}

int cmd_run(const std::string& path, std::string out, unsigned threads) {
  const auto config = read_config(path);
  if (out.empty()) out = config.output;
  if (out.empty()) out = std::filesystem::path(path).stem().string() + ".csv";
  const auto result = cascade::run_experiment(config, threads);
  cascade::write_results(result, out);
  const auto& last = result.final_row();
  std::printf("%s: mean cumulative regret %.3f", cascade::to_string(config.policy.kind).c_str(),
              last.mean);
  if (last.stderr_) std::printf(" +- %.3f", *last.stderr_);
  std::printf(" at step %llu over %llu runs\nwrote %s and %s\n",
              static_cast<unsigned long long>(last.step),
              static_cast<unsigned long long>(result.n_runs), out.c_str(),
              cascade::json_sibling(out).string().c_str());
  return kExitOk;
}

int cmd_bounds(const std::string& path) {
  const auto config = read_config(path);
  const auto& e = config.environment;
  const auto report = cascade::bound_report(e.num_items, e.list_size, e.p, e.delta,
                                            config.n_steps, config.policy.epsilon);
  std::fputs(cascade::format_bound_report(report).c_str(), stdout);
  return kExitOk;
}

int cmd_reproduce(const std::string& suite_name, const std::string& out_dir, unsigned threads,
                  std::uint64_t runs, std::uint64_t steps) {
  const auto suite = cascade::parse_suite(suite_name);
  if (!suite) throw cascade::ConfigError("unknown suite '" + suite_name + "'");
  cascade::ReproduceOptions options;
  options.n_runs = runs;
  options.n_steps = steps;
  options.threads = threads;
  options.out_dir = out_dir;
  if (auto seed = seed_override()) options.master_seed = *seed;
  options.progress = [](const std::string& msg) { std::fprintf(stderr, "%s\n", msg.c_str()); };

  cascade::ExperimentCache cache;
  const auto report = cascade::reproduce(*suite, options, cache);
  const std::string text = cascade::format_report(report);
  std::fputs(text.c_str(), stdout);
  if (!out_dir.empty()) {
    const auto path = std::filesystem::path(out_dir) / suite_name / "report.txt";
    std::filesystem::create_directories(path.parent_path());
    std::ofstream(path) << text;
  }
  return report.passed() ? kExitOk : kExitAcceptance;
}

int cmd_selfcheck() {
  const auto results = cascade::run_selfcheck();
  std::fputs(cascade::format_selfcheck(results).c_str(), stdout);
  for (const auto& r : results) {
    if (!r.passed()) return kExitAcceptance;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cascading bandit simulator and benchmark harness"};
  app.require_subcommand(1);

  std::string config_path, out, suite, out_dir;
  unsigned threads = 1;
  std::uint64_t runs = 20, steps = 100000;

  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "INI config file")->required();
  run->add_option("--out", out, "CSV output path (default: the config's output key)");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* bounds = app.add_subcommand("bounds", "Print the regret bounds for a config's instance");
  bounds->add_option("config", config_path, "INI config file")->required();

  auto* repro = app.add_subcommand("reproduce", "Run a benchmark suite and grade it");
  repro->add_option("suite", suite, "table1, table2, dbn or ranked")
      ->required()
      ->check(CLI::IsMember({"table1", "table2", "dbn", "ranked"}));
  repro->add_option("--out", out_dir, "Directory for per-cell CSV files and report.txt");
  repro->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  repro->add_option("--runs", runs, "Runs per cell")->check(CLI::PositiveNumber);
  repro->add_option("--steps", steps, "Steps per run")->check(CLI::PositiveNumber);

  auto* self = app.add_subcommand("selfcheck", "Run the property suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, out, threads);
    if (*bounds) return cmd_bounds(config_path);
    if (*repro) return cmd_reproduce(suite, out_dir, threads, runs, steps);
    if (*self) return cmd_selfcheck();
  } catch (const cascade::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const cascade::InputError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "cascade/config.hpp"
#include "cascade/core.hpp"
#include "cascade/environments.hpp"
#include "cascade/policies.hpp"

namespace cascade {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  std::uint64_t step;
  double cumulative_regret;
};

struct RegretTrace {
  std::uint64_t run_index = 0;
  std::vector<Checkpoint> checkpoints;
};

/// What happened at one step of a run, for replay checks. `weights` is the
/// realized attraction vector for the cascade user and empty for DBN.
struct StepRecord {
  std::uint64_t step;
  std::span<const ItemId> chosen;
  std::span<const ItemId> optimal;
  std::span<const std::uint8_t> weights;
  double regret;
};

using StepObserver = std::function<void(const StepRecord&)>;

/// Checkpoint steps: every log_every steps, plus n_steps itself.
std::vector<std::uint64_t> checkpoint_steps(const ExperimentConfig& config);

/// Random stream of one run, keyed by master seed, policy (name and
/// ordering) and run index.
Rng run_rng(const ExperimentConfig& config, std::uint64_t run_index);

std::unique_ptr<Policy> make_policy(const ExperimentConfig& config);

/// One independent run on the stream derived from (master_seed, run_index).
/// The initial sample w0 costs neither a step nor regret.
RegretTrace run_single(const ExperimentConfig& config, std::uint64_t run_index,
                       const StepObserver& observer = {});

struct AggregateRow {
  std::uint64_t step;
  double mean;
  std::optional<double> stderr_;  // absent with a single run
};

struct AggregateResult {
  ExperimentConfig config;
  std::string fingerprint;
  std::uint64_t n_runs = 0;
  std::vector<AggregateRow> rows;

  const AggregateRow& final_row() const { return rows.back(); }
};

/// Per-checkpoint mean and standard error (sample sd / sqrt(runs)). Runs are
/// reduced in run_index order with compensated summation, so the result does
/// not depend on the order of `traces`.
AggregateResult aggregate(const ExperimentConfig& config, std::span<const RegretTrace> traces);

/// Runs all n_runs runs on up to `threads` workers and aggregates them.
AggregateResult run_experiment(const ExperimentConfig& config, unsigned threads = 1);

/// CSV `step,mean_cum_regret,stderr,n_runs,config_fingerprint`, one row per
/// checkpoint, six decimals; plus a sibling `.json` with config and summary.
void write_results(const AggregateResult& result, const std::filesystem::path& csv_path);

std::filesystem::path json_sibling(const std::filesystem::path& csv_path);

}  // namespace cascade

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cascade/config.hpp"
#include "cascade/harness.hpp"

namespace cascade {

enum class Suite { Table1, Table2, Dbn, Ranked };

std::string to_string(Suite suite);
std::optional<Suite> parse_suite(const std::string& name);

// Acceptance tolerances.
inline constexpr double kTableRelativeTolerance = 0.15;
inline constexpr double kLengthRatioMin = 1.7;
inline constexpr double kLengthRatioMax = 2.4;
inline constexpr double kFlatteningTail = 0.2;      // last fifth of the horizon
inline constexpr double kFlatteningMaxShare = 0.10;
inline constexpr double kRankedRatioMin = 2.0;
inline constexpr double kRankedRatioMax = 5.0;

/// Reference n = 1e5, 20-run regrets for one (L, K, Delta) row.
struct ReferenceRow {
  std::size_t num_items;
  std::size_t list_size;
  double delta;
  double ucb1_mean, ucb1_stderr;
  double klucb_mean, klucb_stderr;
};

/// Rows in the order L16/K2, K4, K8, L32/K2..K8, then Delta 0.075 at L16.
const std::vector<ReferenceRow>& reference_rows(Ordering ordering);

struct ReproduceOptions {
  std::uint64_t n_steps = 100000;
  std::uint64_t n_runs = 20;
  std::uint64_t master_seed = kDefaultMasterSeed;
  unsigned threads = 1;
  std::filesystem::path out_dir;  // empty: keep results in memory only
  std::function<void(const std::string&)> progress;
};

/// Memoizes run_experiment() by config fingerprint, so suites that share
/// cells (table2 needs the table1 numbers) run each grid point once.
class ExperimentCache {
 public:
  const AggregateResult& get(const ExperimentConfig& config, const ReproduceOptions& options);
  std::size_t size() const { return results_.size(); }

 private:
  std::map<std::string, AggregateResult> results_;
};

struct CellResult {
  std::string label;
  ExperimentConfig config;
  double measured = 0.0;
  std::optional<double> measured_stderr;
  std::optional<double> paper;
  std::optional<double> paper_stderr;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::vector<std::string> details;  // one line per failed or notable check
};

struct SuiteReport {
  Suite suite = Suite::Table1;
  std::uint64_t n_steps = 0;
  std::uint64_t n_runs = 0;
  std::vector<CellResult> cells;
  std::vector<CriterionResult> criteria;

  bool passed() const;
};

/// Runs the suite's grid and grades it:
///
///   table1  decreasing ordering, both policies: criteria 1, 3 and 6
///   table2  increasing vs decreasing ordering:   criterion 2
///   dbn     CascadeKL-UCB on the four (nu, gamma) DBN cells: criterion 4
///   ranked  RankedKL-UCB vs CascadeKL-UCB on the same cells: criterion 5
SuiteReport reproduce(Suite suite, const ReproduceOptions& options, ExperimentCache& cache);

std::string format_report(const SuiteReport& report);

}  // namespace cascade

#include "cascade/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "cascade/analysis.hpp"
#include "cascade/environments.hpp"

namespace cascade {

namespace {

constexpr double kTableP = 0.2;
constexpr std::size_t kDbnItems = 16;
constexpr std::size_t kDbnListSize = 4;
constexpr double kDbnDelta = 0.15;
constexpr double kDbnGrid[] = {1.0, 0.7};

const std::vector<ReferenceRow> kDecreasingRows = {
    {16, 2, 0.15, 1290.1, 11.3, 357.9, 5.5},  {16, 4, 0.15, 986.8, 10.8, 275.1, 5.8},
    {16, 8, 0.15, 574.8, 7.9, 149.1, 3.2},    {32, 2, 0.15, 2695.9, 19.8, 761.2, 10.4},
    {32, 4, 0.15, 2256.8, 12.8, 633.2, 7.0},  {32, 8, 0.15, 1581.0, 20.3, 435.4, 5.7},
    {16, 2, 0.075, 2077.0, 32.9, 766.0, 18.0}, {16, 4, 0.075, 1520.4, 23.4, 538.5, 12.5},
    {16, 8, 0.075, 725.4, 12.0, 321.0, 16.3},
};

const std::vector<ReferenceRow> kIncreasingRows = {
    {16, 2, 0.15, 1160.2, 11.7, 333.3, 6.1},  {16, 4, 0.15, 660.0, 8.3, 209.4, 4.4},
    {16, 8, 0.15, 181.4, 3.9, 60.4, 2.0},     {32, 2, 0.15, 2471.6, 14.1, 716.0, 7.5},
    {32, 4, 0.15, 1615.3, 14.5, 482.3, 6.7},  {32, 8, 0.15, 595.0, 7.8, 201.9, 5.8},
    {16, 2, 0.075, 1989.8, 31.4, 785.8, 12.2}, {16, 4, 0.075, 1239.5, 16.2, 484.2, 12.5},
    {16, 8, 0.075, 336.4, 10.3, 139.7, 6.6},
};

// (L, Delta) groups whose rows differ only in K.
constexpr std::pair<std::size_t, double> kTableGroups[] = {{16, 0.15}, {32, 0.15}, {16, 0.075}};
constexpr std::size_t kTableListSizes[] = {2, 4, 8};

constexpr PolicyKind kTablePolicies[] = {PolicyKind::CascadeUcb1, PolicyKind::CascadeKlUcb};

std::string fmt(const char* pattern, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, value);
  return buf;
}

std::string row_label(const ReferenceRow& row) {
  return "L=" + std::to_string(row.num_items) + " K=" + std::to_string(row.list_size) +
         " delta=" + fmt("%g", row.delta);
}

ExperimentConfig base_config(const ReproduceOptions& options) {
  ExperimentConfig config;
  config.n_steps = options.n_steps;
  config.n_runs = options.n_runs;
  config.master_seed = options.master_seed;
  config.log_every = std::max<std::uint64_t>(1, options.n_steps / 100);
  return config;
}

ExperimentConfig table_config(const ReferenceRow& row, PolicyKind policy, Ordering ordering,
                              const ReproduceOptions& options) {
  ExperimentConfig config = base_config(options);
  config.environment.kind = EnvironmentKind::Cascade;
  config.environment.num_items = row.num_items;
  config.environment.list_size = row.list_size;
  config.environment.p = kTableP;
  config.environment.delta = row.delta;
  config.policy.kind = policy;
  config.policy.ordering = ordering;
  return config;
}

ExperimentConfig dbn_config(double nu, double gamma, PolicyKind policy,
                            const ReproduceOptions& options) {
  ExperimentConfig config = base_config(options);
  config.environment.kind = EnvironmentKind::Dbn;
  config.environment.num_items = kDbnItems;
  config.environment.list_size = kDbnListSize;
  config.environment.p = kTableP;
  config.environment.delta = kDbnDelta;
  config.environment.satisfaction = nu;
  config.environment.persistence = gamma;
  config.policy.kind = policy;
  return config;
}

std::string file_stem(const ExperimentConfig& c) {
  const auto& e = c.environment;
  std::string stem = to_string(e.kind) + "_L" + std::to_string(e.num_items) + "_K" +
                     std::to_string(e.list_size) + "_d" + fmt("%g", e.delta);
  if (e.kind == EnvironmentKind::Dbn) {
    stem += "_nu" + fmt("%g", e.satisfaction) + "_gamma" + fmt("%g", e.persistence);
  }
  stem += "_" + to_string(c.policy.kind) + "_" + to_string(c.policy.ordering);
  return stem;
}

class SuiteRunner {
 public:
  SuiteRunner(Suite suite, const ReproduceOptions& options, ExperimentCache& cache)
      : options_(options), cache_(cache) {
    report_.suite = suite;
    report_.n_steps = options.n_steps;
    report_.n_runs = options.n_runs;
  }

  const AggregateResult& run(const ExperimentConfig& config, const std::string& label,
                             std::optional<double> paper = std::nullopt,
                             std::optional<double> paper_stderr = std::nullopt) {
    const AggregateResult& result = cache_.get(config, options_);
    CellResult cell;
    cell.label = label;
    cell.config = config;
    cell.measured = result.final_row().mean;
    cell.measured_stderr = result.final_row().stderr_;
    cell.paper = paper;
    cell.paper_stderr = paper_stderr;
    report_.cells.push_back(cell);
    if (!options_.out_dir.empty()) {
      write_results(result, options_.out_dir / to_string(report_.suite) /
                                (file_stem(config) + ".csv"));
    }
    return result;
  }

  void add(CriterionResult criterion) { report_.criteria.push_back(std::move(criterion)); }

  SuiteReport finish() { return std::move(report_); }

 private:
  const ReproduceOptions& options_;
  ExperimentCache& cache_;
  SuiteReport report_;
};

// Final mean regret for each (row, policy) of one ordering's table.
struct TableRun {
  std::vector<double> ucb1;
  std::vector<double> klucb;

  const std::vector<double>& of(PolicyKind kind) const {
    return kind == PolicyKind::CascadeUcb1 ? ucb1 : klucb;
  }
};

TableRun run_table(SuiteRunner& runner, Ordering ordering, const ReproduceOptions& options,
                   CriterionResult* within) {
  TableRun out;
  const auto& rows = reference_rows(ordering);
  for (const auto& row : rows) {
    for (PolicyKind kind : kTablePolicies) {
      const bool ucb1 = kind == PolicyKind::CascadeUcb1;
      const double paper = ucb1 ? row.ucb1_mean : row.klucb_mean;
      const std::string label =
          row_label(row) + " " + to_string(kind) + " " + to_string(ordering);
      const double measured =
          runner.run(table_config(row, kind, ordering, options), label, paper,
                     ucb1 ? row.ucb1_stderr : row.klucb_stderr)
              .final_row()
              .mean;
      (ucb1 ? out.ucb1 : out.klucb).push_back(measured);
      if (within) {
        const double rel = (measured - paper) / paper;
        if (std::abs(rel) > kTableRelativeTolerance) {
          within->passed = false;
          within->details.push_back(label + ": " + fmt("%.1f", measured) + " vs " +
                                    fmt("%.1f", paper) + " (" + fmt("%+.1f%%", 100 * rel) + ")");
        }
      }
    }
  }
  return out;
}

std::size_t row_index(const std::vector<ReferenceRow>& rows, std::size_t num_items,
                      std::size_t list_size, double delta) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].num_items == num_items && rows[i].list_size == list_size &&
        rows[i].delta == delta) {
      return i;
    }
  }
  throw InputError("no reference row for the requested instance");
}

CriterionResult trend_checks(const TableRun& run) {
  const auto& rows = kDecreasingRows;
  CriterionResult c{3, "regret trends across L, K, delta and policy", true, {}};
  auto fail = [&c](std::string line) {
    c.passed = false;
    c.details.push_back(std::move(line));
  };
  for (PolicyKind kind : kTablePolicies) {
    const auto& values = run.of(kind);
    const std::string name = to_string(kind);
    for (std::size_t k : kTableListSizes) {
      const double ratio =
          values[row_index(rows, 32, k, 0.15)] / values[row_index(rows, 16, k, 0.15)];
      const std::string line = name + " K=" + std::to_string(k) + ": L32/L16 = " +
                               fmt("%.3f", ratio);
      if (ratio < kLengthRatioMin || ratio > kLengthRatioMax) fail(line);

      const double coarse = values[row_index(rows, 16, k, 0.075)];
      const double fine = values[row_index(rows, 16, k, 0.15)];
      if (!(coarse > fine)) {
        fail(name + " K=" + std::to_string(k) + ": delta 0.075 gives " + fmt("%.1f", coarse) +
             " <= " + fmt("%.1f", fine));
      }
    }
    for (auto [num_items, delta] : kTableGroups) {
      const double k2 = values[row_index(rows, num_items, 2, delta)];
      const double k4 = values[row_index(rows, num_items, 4, delta)];
      const double k8 = values[row_index(rows, num_items, 8, delta)];
      if (!(k2 > k4 && k4 > k8)) {
        fail(name + " L=" + std::to_string(num_items) + " delta=" + fmt("%g", delta) +
             ": not decreasing in K (" + fmt("%.1f", k2) + ", " + fmt("%.1f", k4) + ", " +
             fmt("%.1f", k8) + ")");
      }
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!(run.klucb[i] < run.ucb1[i])) {
      fail(row_label(rows[i]) + ": KL-UCB " + fmt("%.1f", run.klucb[i]) + " >= UCB1 " +
           fmt("%.1f", run.ucb1[i]));
    }
  }
  return c;
}

CriterionResult bound_checks(const TableRun& run, const ReproduceOptions& options) {
  CriterionResult c{6, "measured regret below the upper bounds", true, {}};
  const PolicySpec defaults;
  for (std::size_t i = 0; i < kDecreasingRows.size(); ++i) {
    const auto& row = kDecreasingRows[i];
    const AttractionModel model(blb_means(row.num_items, row.list_size, kTableP, row.delta));
    const double ucb1 = ucb1_bound(model, row.list_size, options.n_steps);
    if (!(run.ucb1[i] <= ucb1)) {
      c.passed = false;
      c.details.push_back(row_label(row) + ": UCB1 regret " + fmt("%.1f", run.ucb1[i]) +
                          " above bound " + fmt("%.1f", ucb1));
    }
    if (options.n_steps >= 3) {
      const double kl =
          klucb_bound_leading(model, row.list_size, options.n_steps, defaults.epsilon);
      if (!(run.klucb[i] <= kl)) {
        c.passed = false;
        c.details.push_back(row_label(row) + ": KL-UCB regret " + fmt("%.1f", run.klucb[i]) +
                            " above leading bound " + fmt("%.1f", kl));
      }
    }
  }
  return c;
}

SuiteReport table1(const ReproduceOptions& options, ExperimentCache& cache) {
  SuiteRunner runner(Suite::Table1, options, cache);
  CriterionResult within{1, "decreasing-UCB table within 15% of reference values", true, {}};
  const TableRun run = run_table(runner, Ordering::DecreasingUcb, options, &within);
  runner.add(std::move(within));
  runner.add(trend_checks(run));
  runner.add(bound_checks(run, options));
  return runner.finish();
}

SuiteReport table2(const ReproduceOptions& options, ExperimentCache& cache) {
  SuiteRunner runner(Suite::Table2, options, cache);
  CriterionResult c{2, "increasing-UCB table within 15%, below decreasing, largest drop at K=8",
                    true, {}};
  const TableRun increasing = run_table(runner, Ordering::IncreasingUcb, options, &c);
  const TableRun decreasing = run_table(runner, Ordering::DecreasingUcb, options, nullptr);
  const auto& rows = kIncreasingRows;
  for (PolicyKind kind : kTablePolicies) {
    const auto& inc = increasing.of(kind);
    const auto& dec = decreasing.of(kind);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!(inc[i] < dec[i])) {
        c.passed = false;
        c.details.push_back(row_label(rows[i]) + " " + to_string(kind) + ": increasing " +
                            fmt("%.1f", inc[i]) + " >= decreasing " + fmt("%.1f", dec[i]));
      }
    }
    for (auto [num_items, delta] : kTableGroups) {
      std::size_t best = 0;
      double best_drop = -std::numeric_limits<double>::infinity();
      std::string drops;
      for (std::size_t k : kTableListSizes) {
        const std::size_t i = row_index(rows, num_items, k, delta);
        const double drop = (dec[i] - inc[i]) / dec[i];
        drops += (drops.empty() ? "" : ", ") + fmt("%.1f%%", 100 * drop);
        if (drop > best_drop) {
          best_drop = drop;
          best = k;
        }
      }
      if (best != 8) {
        c.passed = false;
        c.details.push_back(to_string(kind) + " L=" + std::to_string(num_items) +
                            " delta=" + fmt("%g", delta) + ": drops by K=2,4,8 are " + drops);
      }
    }
  }
  runner.add(std::move(c));
  return runner.finish();
}

std::string dbn_label(double nu, double gamma, PolicyKind kind) {
  return "nu=" + fmt("%g", nu) + " gamma=" + fmt("%g", gamma) + " " + to_string(kind);
}

SuiteReport dbn(const ReproduceOptions& options, ExperimentCache& cache) {
  SuiteRunner runner(Suite::Dbn, options, cache);
  CriterionResult c{4, "CascadeKL-UCB regret flattens on the DBN user", true, {}};
  const auto tail_start = static_cast<std::uint64_t>(
      std::floor((1.0 - kFlatteningTail) * static_cast<double>(options.n_steps)));
  for (double nu : kDbnGrid) {
    for (double gamma : kDbnGrid) {
      const auto& result = runner.run(dbn_config(nu, gamma, PolicyKind::CascadeKlUcb, options),
                                      dbn_label(nu, gamma, PolicyKind::CascadeKlUcb));
      double at_tail = 0.0;
      for (const auto& row : result.rows) {
        if (row.step <= tail_start) at_tail = row.mean;
      }
      const double total = result.final_row().mean;
      const double gained = total - at_tail;
      const std::string line = "nu=" + fmt("%g", nu) + " gamma=" + fmt("%g", gamma) +
                               ": tail gain " + fmt("%.1f", gained) + " of " +
                               fmt("%.1f", total) + " (" +
                               fmt("%.1f%%", total > 0 ? 100 * gained / total : 0.0) + ")";
      c.details.push_back(line);
      if (!(gained <= kFlatteningMaxShare * total)) c.passed = false;
    }
  }
  runner.add(std::move(c));
  return runner.finish();
}

SuiteReport ranked(const ReproduceOptions& options, ExperimentCache& cache) {
  SuiteRunner runner(Suite::Ranked, options, cache);
  CriterionResult c{5, "RankedKL-UCB regret 2 to 5 times CascadeKL-UCB (nu=1, gamma=1)", true,
                    {}};
  for (double nu : kDbnGrid) {
    for (double gamma : kDbnGrid) {
      const double cascade =
          runner.run(dbn_config(nu, gamma, PolicyKind::CascadeKlUcb, options),
                     dbn_label(nu, gamma, PolicyKind::CascadeKlUcb))
              .final_row()
              .mean;
      const double baseline = runner.run(dbn_config(nu, gamma, PolicyKind::RankedKlUcb, options),
                                         dbn_label(nu, gamma, PolicyKind::RankedKlUcb))
                                  .final_row()
                                  .mean;
      const double ratio = baseline / cascade;
      c.details.push_back("nu=" + fmt("%g", nu) + " gamma=" + fmt("%g", gamma) +
                          ": ratio " + fmt("%.2f", ratio));
      if (nu == 1.0 && gamma == 1.0 &&
          !(ratio >= kRankedRatioMin && ratio <= kRankedRatioMax)) {
        c.passed = false;
      }
    }
  }
  runner.add(std::move(c));
  return runner.finish();
}

}  // namespace

std::string to_string(Suite suite) {
  switch (suite) {
    case Suite::Table1: return "table1";
    case Suite::Table2: return "table2";
    case Suite::Dbn: return "dbn";
    case Suite::Ranked: return "ranked";
  }
  return "unknown";
}

std::optional<Suite> parse_suite(const std::string& name) {
  for (Suite s : {Suite::Table1, Suite::Table2, Suite::Dbn, Suite::Ranked}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

const std::vector<ReferenceRow>& reference_rows(Ordering ordering) {
  return ordering == Ordering::DecreasingUcb ? kDecreasingRows : kIncreasingRows;
}

const AggregateResult& ExperimentCache::get(const ExperimentConfig& config,
                                            const ReproduceOptions& options) {
  const std::string key = fingerprint(config);
  auto it = results_.find(key);
  if (it != results_.end()) return it->second;
  if (options.progress) options.progress("running " + file_stem(config));
  return results_.emplace(key, run_experiment(config, options.threads)).first->second;
}

bool SuiteReport::passed() const {
  return std::all_of(criteria.begin(), criteria.end(),
                     [](const CriterionResult& c) { return c.passed; });
}

SuiteReport reproduce(Suite suite, const ReproduceOptions& options, ExperimentCache& cache) {
  if (options.n_steps == 0 || options.n_runs == 0) {
    throw ConfigError("reproduce needs at least one step and one run");
  }
  switch (suite) {
    case Suite::Table1: return table1(options, cache);
    case Suite::Table2: return table2(options, cache);
    case Suite::Dbn: return dbn(options, cache);
    case Suite::Ranked: return ranked(options, cache);
  }
  throw InputError("unknown suite");
}

std::string format_report(const SuiteReport& report) {
  std::ostringstream out;
  out << "suite " << to_string(report.suite) << ": n=" << report.n_steps
      << ", runs=" << report.n_runs << "\n\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-42s %18s %18s %9s\n", "cell", "measured", "reference",
                "rel.diff");
  out << line;
  for (const auto& cell : report.cells) {
    std::string measured = fmt("%.1f", cell.measured);
    if (cell.measured_stderr) measured += " +- " + fmt("%.1f", *cell.measured_stderr);
    std::string paper = "-";
    std::string rel = "-";
    if (cell.paper) {
      paper = fmt("%.1f", *cell.paper);
      if (cell.paper_stderr) paper += " +- " + fmt("%.1f", *cell.paper_stderr);
      rel = fmt("%+.1f%%", 100 * (cell.measured - *cell.paper) / *cell.paper);
    }
    std::snprintf(line, sizeof line, "%-42s %18s %18s %9s\n", cell.label.c_str(),
                  measured.c_str(), paper.c_str(), rel.c_str());
    out << line;
  }
  out << '\n';
  for (const auto& c : report.criteria) {
    out << (c.passed ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.name << '\n';
    for (const auto& d : c.details) out << "      " << d << '\n';
  }
  return out.str();
}

}  // namespace cascade

// Runs every benchmark suite at full scale (n = 1e5, 20 runs) and prints
// one PASS/FAIL line per acceptance criterion, followed by the details.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <thread>

#include "cascade/analysis.hpp"
#include "cascade/environments.hpp"
#include "cascade/reproduce.hpp"
#include "cascade/selfcheck.hpp"

using namespace cascade;

namespace {

constexpr double kLowerConstantTolerance = 1e-3;
constexpr double kLowerConstantReference = 17.883;
constexpr double kUcb1BoundReference = 12947.1;
constexpr double kUcb1BoundTolerance = 0.05;

// (L - K) Delta (1 - p)^(K-1) / kl(p - Delta, p) written out by hand for
// the (16, 2, 0.2, 0.15) instance.
double lower_constant_by_hand() {
  const double q = 0.05, p = 0.2;
  const double kl = q * std::log(q / p) + (1 - q) * std::log((1 - q) / (1 - p));
  return 14.0 * 0.15 * 0.8 / kl;
}

// 14 suboptimal items at gap 0.15, 16 items in total.
double ucb1_bound_by_hand() {
  const double pi = 3.14159265358979323846;
  return 14.0 * (12.0 / 0.15) * std::log(1e5) + pi * pi / 3.0 * 16.0;
}

CriterionResult bound_oracles() {
  CriterionResult c{6, "bound evaluators against hand-computed references", true, {}};
  const double lower = lower_bound_constant(16, 2, 0.2, 0.15);
  const double oracle = lower_constant_by_hand();
  char line[200];
  std::snprintf(line, sizeof line, "lower constant %.6f, by hand %.6f, reference %.3f", lower,
                oracle, kLowerConstantReference);
  c.details.push_back(line);
  if (!(std::abs(lower - oracle) <= kLowerConstantTolerance &&
        std::abs(lower - kLowerConstantReference) <= kLowerConstantTolerance)) {
    c.passed = false;
  }
  const double ucb1 = ucb1_bound(AttractionModel(blb_means(16, 2, 0.2, 0.15)), 2, 100000);
  std::snprintf(line, sizeof line, "UCB1 bound %.3f, by hand %.3f", ucb1, ucb1_bound_by_hand());
  c.details.push_back(line);
  if (!(std::abs(ucb1 - ucb1_bound_by_hand()) < 1e-6 &&
        std::abs(ucb1 - kUcb1BoundReference) < kUcb1BoundTolerance)) {
    c.passed = false;
  }
  return c;
}

CriterionResult property_suites() {
  CriterionResult c{7, "property suites with zero failures", true, {}};
  for (const auto& r : run_selfcheck()) {
    char line[400];
    std::snprintf(line, sizeof line, "%s: %llu checks, %llu failures%s%s", r.name.c_str(),
                  static_cast<unsigned long long>(r.cases),
                  static_cast<unsigned long long>(r.failures),
                  r.first_failure.empty() ? "" : "; first: ", r.first_failure.c_str());
    c.details.push_back(line);
    if (!r.passed()) c.passed = false;
  }
  return c;
}

// Merges two results for the same criterion id.
void merge(std::map<int, CriterionResult>& out, const CriterionResult& c) {
  auto [it, inserted] = out.emplace(c.id, c);
  if (inserted) return;
  it->second.passed = it->second.passed && c.passed;
  it->second.details.insert(it->second.details.end(), c.details.begin(), c.details.end());
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  ReproduceOptions options;
  options.threads = std::max(1u, std::thread::hardware_concurrency());
  options.progress = [](const std::string& msg) { std::fprintf(stderr, "%s\n", msg.c_str()); };

  ExperimentCache cache;
  std::map<int, CriterionResult> criteria;
  for (Suite suite : {Suite::Table1, Suite::Table2, Suite::Dbn, Suite::Ranked}) {
    const SuiteReport report = reproduce(suite, options, cache);
    std::printf("%s\n", format_report(report).c_str());
    for (const auto& c : report.criteria) merge(criteria, c);
  }
  merge(criteria, bound_oracles());
  merge(criteria, property_suites());

  bool all = true;
  std::printf("acceptance summary\n");
  for (const auto& [id, c] : criteria) {
    std::printf("criterion %d %s: %s\n", id, c.passed ? "PASS" : "FAIL", c.name.c_str());
    all = all && c.passed;
  }
  std::printf("\ndetails\n");
  for (const auto& [id, c] : criteria) {
    for (const auto& d : c.details) std::printf("  [%d] %s\n", id, d.c_str());
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("\n%zu experiment configurations, %.1f s\n", cache.size(), seconds);
  return all ? 0 : 1;
}

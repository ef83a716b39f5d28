#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cascade {

inline constexpr double kLemma1Tolerance = 1e-12;
inline constexpr double kKlFeasibilitySlack = 1e-9;
inline constexpr double kKlMaximalityStep = 1e-6;

struct PropertyResult {
  std::string name;
  std::uint64_t cases = 0;
  std::uint64_t failures = 0;
  std::string first_failure;

  bool passed() const { return failures == 0 && cases > 0; }
};

struct SelfcheckOptions {
  std::uint64_t seed = 1;
  std::uint64_t lemma1_cases = 1000;
  std::uint64_t lemma3_cases = 10000;
  std::uint64_t solver_cases = 20000;
  std::uint64_t conservation_runs = 50;
  std::uint64_t selection_cases = 2000;
};

PropertyResult check_lemma1(const SelfcheckOptions& options);
PropertyResult check_lemma3(const SelfcheckOptions& options);
/// Feasibility, maximality at +kKlMaximalityStep, monotonicity in the
/// threshold and the count, and the closed-form boundary values.
PropertyResult check_klucb_solver(const SelfcheckOptions& options);
/// sum_e (T(e) - 1) equals sum_t min(C_t, K) over a run, with no click
/// counting as K.
PropertyResult check_observation_conservation(const SelfcheckOptions& options);
/// select() agrees with a search over all K-subsets for L <= 8.
PropertyResult check_select_optimality(const SelfcheckOptions& options);
/// Two runs of the same config write byte-identical CSV files, for one and
/// for several worker threads.
PropertyResult check_reruns(const SelfcheckOptions& options);

std::vector<PropertyResult> run_selfcheck(const SelfcheckOptions& options = {});

std::string format_selfcheck(const std::vector<PropertyResult>& results);

}  // namespace cascade

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "cascade/policies.hpp"

namespace cascade {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EnvironmentKind { Cascade, Dbn };
enum class PolicyKind { CascadeUcb1, CascadeKlUcb, RankedKlUcb, Oracle };

inline constexpr std::uint64_t kDefaultMasterSeed = 20150706;

/// Synthetic instance B(L, K, p, delta). For the DBN user the attraction
/// vector is that instance and every item shares nu and gamma.
struct EnvironmentSpec {
  EnvironmentKind kind = EnvironmentKind::Cascade;
  std::size_t num_items = 16;
  std::size_t list_size = 2;
  double p = 0.2;
  double delta = 0.15;
  double satisfaction = 1.0;  // nu, DBN only
  double persistence = 1.0;   // gamma, DBN only
  bool operator==(const EnvironmentSpec&) const = default;
};

struct PolicySpec {
  PolicyKind kind = PolicyKind::CascadeKlUcb;
  Ordering ordering = Ordering::DecreasingUcb;
  double epsilon = 0.1;  // only enters the KL-UCB bound report
  bool operator==(const PolicySpec&) const = default;
};

struct ExperimentConfig {
  EnvironmentSpec environment;
  PolicySpec policy;
  std::uint64_t n_steps = 100000;
  std::uint64_t n_runs = 20;
  std::uint64_t master_seed = kDefaultMasterSeed;
  std::uint64_t log_every = 1000;
  std::string output;
  bool operator==(const ExperimentConfig&) const = default;
};

std::string to_string(EnvironmentKind kind);
std::string to_string(PolicyKind kind);
std::string to_string(Ordering ordering);

/// Parses the INI text:
///
///   [environment]  type = cascade|dbn, L, K, p, delta, nu, gamma
///   [policy]       name = cascade-ucb1|cascade-klucb|ranked-klucb|oracle,
///                  ordering = decreasing|increasing, epsilon
///   [experiment]   n_steps, n_runs, master_seed, log_every, output
///
/// Missing keys take the defaults above; unknown keys are an error.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError on inconsistent settings (K > L, delta >= p, ...).
void validate(const ExperimentConfig& config);

/// Canonical INI rendering: fixed section and key order, doubles printed
/// with 17 significant digits. parse_config(to_ini(c)) == c.
std::string to_ini(const ExperimentConfig& config);

/// 16 hex digits of FNV-1a 64 over to_ini(config).
std::string fingerprint(const ExperimentConfig& config);

}  // namespace cascade

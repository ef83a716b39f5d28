#include "cascade/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "cascade/environments.hpp"

namespace cascade {

namespace pt = boost::property_tree;

namespace {

template <typename T>
T read_value(const pt::ptree& section, const std::string& name, const std::string& key,
             T fallback) {
  const auto node = section.get_child_optional(key);
  if (!node) return fallback;
  const auto value = node->get_value_optional<T>();
  if (!value) {
    throw ConfigError("[" + name + "] " + key + ": cannot parse '" + node->data() + "'");
  }
  return *value;
}

std::uint64_t read_count(const pt::ptree& section, const std::string& name,
                         const std::string& key, std::uint64_t fallback) {
  const auto node = section.get_child_optional(key);
  if (!node) return fallback;
  const std::string& text = node->data();
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError("[" + name + "] " + key + ": expected a nonnegative integer, got '" +
                      text + "'");
  }
  try {
    return std::stoull(text);
  } catch (const std::exception&) {
    throw ConfigError("[" + name + "] " + key + ": integer out of range '" + text + "'");
  }
}

void reject_unknown(const pt::ptree& section, const std::string& name,
                    const std::set<std::string>& known) {
  for (const auto& [key, child] : section) {
    if (!known.contains(key)) throw ConfigError("[" + name + "] unknown key '" + key + "'");
  }
}

EnvironmentKind parse_environment_kind(const std::string& text) {
  if (text == "cascade") return EnvironmentKind::Cascade;
  if (text == "dbn") return EnvironmentKind::Dbn;
  throw ConfigError("[environment] type: expected cascade or dbn, got '" + text + "'");
}

PolicyKind parse_policy_kind(const std::string& text) {
  if (text == "cascade-ucb1") return PolicyKind::CascadeUcb1;
  if (text == "cascade-klucb") return PolicyKind::CascadeKlUcb;
  if (text == "ranked-klucb") return PolicyKind::RankedKlUcb;
  if (text == "oracle") return PolicyKind::Oracle;
  throw ConfigError("[policy] name: unknown policy '" + text + "'");
}

Ordering parse_ordering(const std::string& text) {
  if (text == "decreasing") return Ordering::DecreasingUcb;
  if (text == "increasing") return Ordering::IncreasingUcb;
  throw ConfigError("[policy] ordering: expected decreasing or increasing, got '" + text + "'");
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace

std::string to_string(EnvironmentKind kind) {
  return kind == EnvironmentKind::Cascade ? "cascade" : "dbn";
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::CascadeUcb1: return "cascade-ucb1";
    case PolicyKind::CascadeKlUcb: return "cascade-klucb";
    case PolicyKind::RankedKlUcb: return "ranked-klucb";
    case PolicyKind::Oracle: return "oracle";
  }
  return "unknown";
}

std::string to_string(Ordering ordering) {
  return ordering == Ordering::DecreasingUcb ? "decreasing" : "increasing";
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& err) {
    throw ConfigError(std::string("malformed config: ") + err.message() + " (line " +
                      std::to_string(err.line()) + ")");
  }
  for (const auto& [name, section] : tree) {
    if (name != "environment" && name != "policy" && name != "experiment") {
      throw ConfigError("unknown section or top-level key '" + name + "'");
    }
  }

  ExperimentConfig config;
  const pt::ptree empty;
  const pt::ptree& env = tree.get_child("environment", empty);
  const pt::ptree& pol = tree.get_child("policy", empty);
  const pt::ptree& exp = tree.get_child("experiment", empty);
  reject_unknown(env, "environment", {"type", "L", "K", "p", "delta", "nu", "gamma"});
  reject_unknown(pol, "policy", {"name", "ordering", "epsilon"});
  reject_unknown(exp, "experiment",
                 {"n_steps", "n_runs", "master_seed", "log_every", "output"});

  auto& e = config.environment;
  e.kind = parse_environment_kind(read_value<std::string>(env, "environment", "type", "cascade"));
  e.num_items = read_count(env, "environment", "L", e.num_items);
  e.list_size = read_count(env, "environment", "K", e.list_size);
  e.p = read_value(env, "environment", "p", e.p);
  e.delta = read_value(env, "environment", "delta", e.delta);
  e.satisfaction = read_value(env, "environment", "nu", e.satisfaction);
  e.persistence = read_value(env, "environment", "gamma", e.persistence);

  auto& p = config.policy;
  p.kind = parse_policy_kind(read_value<std::string>(pol, "policy", "name", to_string(p.kind)));
  p.ordering = parse_ordering(read_value<std::string>(pol, "policy", "ordering", "decreasing"));
  p.epsilon = read_value(pol, "policy", "epsilon", p.epsilon);

  config.n_steps = read_count(exp, "experiment", "n_steps", config.n_steps);
  config.n_runs = read_count(exp, "experiment", "n_runs", config.n_runs);
  config.master_seed = read_count(exp, "experiment", "master_seed", config.master_seed);
  config.log_every = read_count(exp, "experiment", "log_every", config.log_every);
  config.output = read_value<std::string>(exp, "experiment", "output", config.output);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const ConfigError& err) {
    throw ConfigError(path.string() + ": " + err.what());
  }
}

void validate(const ExperimentConfig& config) {
  const auto& e = config.environment;
  try {
    blb_means(e.num_items, e.list_size, e.p, e.delta);
  } catch (const InputError& err) {
    throw ConfigError(std::string("[environment] ") + err.what());
  }
  if (e.kind == EnvironmentKind::Dbn) {
    if (!(e.satisfaction >= 0.0 && e.satisfaction <= 1.0)) {
      throw ConfigError("[environment] nu must lie in [0,1]");
    }
    if (!(e.persistence > 0.0 && e.persistence <= 1.0)) {
      throw ConfigError("[environment] gamma must lie in (0,1]");
    }
  }
  if (!(config.policy.epsilon > 0.0)) throw ConfigError("[policy] epsilon must be > 0");
  if (config.n_steps < 1) throw ConfigError("[experiment] n_steps must be >= 1");
  if (config.n_runs < 1) throw ConfigError("[experiment] n_runs must be >= 1");
  if (config.log_every < 1 || config.log_every > config.n_steps) {
    throw ConfigError("[experiment] log_every must lie in [1, n_steps]");
  }
}

std::string to_ini(const ExperimentConfig& c) {
  std::ostringstream out;
  const auto& e = c.environment;
  out << "[environment]\n"
      << "type=" << to_string(e.kind) << "\n"
      << "L=" << e.num_items << "\n"
      << "K=" << e.list_size << "\n"
      << "p=" << format_double(e.p) << "\n"
      << "delta=" << format_double(e.delta) << "\n"
      << "nu=" << format_double(e.satisfaction) << "\n"
      << "gamma=" << format_double(e.persistence) << "\n"
      << "[policy]\n"
      << "name=" << to_string(c.policy.kind) << "\n"
      << "ordering=" << to_string(c.policy.ordering) << "\n"
      << "epsilon=" << format_double(c.policy.epsilon) << "\n"
      << "[experiment]\n"
      << "n_steps=" << c.n_steps << "\n"
      << "n_runs=" << c.n_runs << "\n"
      << "master_seed=" << c.master_seed << "\n"
      << "log_every=" << c.log_every << "\n"
      << "output=" << c.output << "\n";
  return out.str();
}

std::string fingerprint(const ExperimentConfig& config) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_ini(config)) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, hash);
  return buf;
}

}  // namespace cascade

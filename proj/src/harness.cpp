#include "cascade/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <thread>

#include "cascade/environments.hpp"

namespace cascade {

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

std::vector<double> satisfaction_vector(const EnvironmentSpec& env) {
  return std::vector<double>(env.num_items, env.satisfaction);
}

class CheckpointRecorder {
 public:
  explicit CheckpointRecorder(const ExperimentConfig& config, std::uint64_t run_index)
      : steps_(checkpoint_steps(config)) {
    trace_.run_index = run_index;
    trace_.checkpoints.reserve(steps_.size());
  }

  void record(std::uint64_t step, double cumulative) {
    if (next_ < steps_.size() && steps_[next_] == step) {
      trace_.checkpoints.push_back({step, cumulative});
      ++next_;
    }
  }

  RegretTrace take() { return std::move(trace_); }

 private:
  std::vector<std::uint64_t> steps_;
  std::size_t next_ = 0;
  RegretTrace trace_;
};

RegretTrace run_cascade(const ExperimentConfig& config, std::uint64_t run_index,
                        const StepObserver& observer) {
  const auto& spec = config.environment;
  const CascadeEnv env = make_blb(spec.num_items, spec.list_size, spec.p, spec.delta);
  const Recommendation optimal = optimal_list(env.model(), spec.list_size);
  auto policy = make_policy(config);

  Rng rng = run_rng(config, run_index);
  policy->initialize(env.init_sample(rng));

  CheckpointRecorder recorder(config, run_index);
  WeightVector weights;
  std::vector<std::size_t> clicks;
  CompensatedSum cumulative;
  for (std::uint64_t t = 1; t <= config.n_steps; ++t) {
    const Recommendation& chosen = policy->select();
    env.draw_weights(rng, weights);
    const CascadeFeedback feedback = first_click(chosen, weights);
    const double regret = list_value(optimal, weights) - list_value(chosen, weights);
    cumulative.add(regret);
    if (observer) observer({t, chosen, optimal, weights, regret});
    clicks.clear();
    if (feedback.click) clicks.push_back(*feedback.click);
    policy->observe(clicks);
    recorder.record(t, cumulative.value());
  }
  return recorder.take();
}

RegretTrace run_dbn(const ExperimentConfig& config, std::uint64_t run_index,
                    const StepObserver& observer) {
  const auto& spec = config.environment;
  const DbnEnv env(blb_means(spec.num_items, spec.list_size, spec.p, spec.delta),
                   satisfaction_vector(spec), spec.persistence);
  const Recommendation optimal = env.optimal_list(spec.list_size);
  auto policy = make_policy(config);

  Rng rng = run_rng(config, run_index);
  policy->initialize(env.init_sample(rng));

  CheckpointRecorder recorder(config, run_index);
  DbnDraws draws;
  CompensatedSum cumulative;
  for (std::uint64_t t = 1; t <= config.n_steps; ++t) {
    const Recommendation& chosen = policy->select();
    env.draw(rng, spec.list_size, draws);
    const DbnFeedback feedback = env.simulate(chosen, draws);
    const DbnFeedback best = env.simulate(optimal, draws);
    const double regret = (best.satisfied ? 1.0 : 0.0) - (feedback.satisfied ? 1.0 : 0.0);
    cumulative.add(regret);
    if (observer) observer({t, chosen, optimal, {}, regret});
    policy->observe(feedback.clicks);
    recorder.record(t, cumulative.value());
  }
  return recorder.take();
}

// Policies consume no randomness, so without this tag two policies with the
// same master seed would face identical users.
std::uint64_t policy_tag(const PolicySpec& policy) {
  return 1 + 2 * static_cast<std::uint64_t>(policy.kind) +
         16 * static_cast<std::uint64_t>(policy.ordering);
}

std::string format_fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

}  // namespace

Rng run_rng(const ExperimentConfig& config, std::uint64_t run_index) {
  return Rng::for_run(config.master_seed ^ mix64(policy_tag(config.policy)), run_index);
}

std::vector<std::uint64_t> checkpoint_steps(const ExperimentConfig& config) {
  std::vector<std::uint64_t> steps;
  if (config.log_every == 0) return {config.n_steps};
  for (std::uint64_t s = config.log_every; s <= config.n_steps; s += config.log_every) {
    steps.push_back(s);
  }
  if (steps.empty() || steps.back() != config.n_steps) steps.push_back(config.n_steps);
  return steps;
}

std::unique_ptr<Policy> make_policy(const ExperimentConfig& config) {
  const auto& env = config.environment;
  switch (config.policy.kind) {
    case PolicyKind::CascadeUcb1:
      return std::make_unique<CascadeUcbPolicy>(UcbRule::Ucb1, config.policy.ordering,
                                                env.list_size);
    case PolicyKind::CascadeKlUcb:
      return std::make_unique<CascadeUcbPolicy>(UcbRule::KlUcb, config.policy.ordering,
                                                env.list_size);
    case PolicyKind::RankedKlUcb:
      return std::make_unique<RankedKlUcbPolicy>(env.list_size);
    case PolicyKind::Oracle: {
      const auto means = blb_means(env.num_items, env.list_size, env.p, env.delta);
      if (env.kind == EnvironmentKind::Dbn) {
        return std::make_unique<OraclePolicy>(
            oracle_select(DbnEnv(means, satisfaction_vector(env), env.persistence),
                          env.list_size));
      }
      return std::make_unique<OraclePolicy>(
          oracle_select(AttractionModel(means), env.list_size));
    }
  }
  throw ConfigError("unknown policy");
}

RegretTrace run_single(const ExperimentConfig& config, std::uint64_t run_index,
                       const StepObserver& observer) {
  validate(config);
  return config.environment.kind == EnvironmentKind::Cascade
             ? run_cascade(config, run_index, observer)
             : run_dbn(config, run_index, observer);
}

AggregateResult aggregate(const ExperimentConfig& config, std::span<const RegretTrace> traces) {
  if (traces.empty()) throw InputError("aggregate: no traces");
  std::vector<const RegretTrace*> ordered;
  ordered.reserve(traces.size());
  for (const auto& t : traces) ordered.push_back(&t);
  std::sort(ordered.begin(), ordered.end(),
            [](const RegretTrace* a, const RegretTrace* b) { return a->run_index < b->run_index; });

  const std::size_t num_points = ordered.front()->checkpoints.size();
  for (const auto* t : ordered) {
    if (t->checkpoints.size() != num_points) {
      throw InputError("aggregate: traces have different checkpoint counts");
    }
  }

  AggregateResult result;
  result.config = config;
  result.fingerprint = fingerprint(config);
  result.n_runs = ordered.size();
  result.rows.reserve(num_points);
  const double runs = static_cast<double>(ordered.size());
  for (std::size_t i = 0; i < num_points; ++i) {
    CompensatedSum sum;
    for (const auto* t : ordered) sum.add(t->checkpoints[i].cumulative_regret);
    const double mean = sum.value() / runs;
    AggregateRow row{ordered.front()->checkpoints[i].step, mean, std::nullopt};
    if (ordered.size() >= 2) {
      CompensatedSum squares;
      for (const auto* t : ordered) {
        const double d = t->checkpoints[i].cumulative_regret - mean;
        squares.add(d * d);
      }
      row.stderr_ = std::sqrt(squares.value() / (runs - 1.0)) / std::sqrt(runs);
    }
    result.rows.push_back(row);
  }
  return result;
}

AggregateResult run_experiment(const ExperimentConfig& config, unsigned threads) {
  validate(config);
  const std::size_t runs = config.n_runs;
  std::vector<RegretTrace> traces(runs);
  std::vector<std::exception_ptr> errors(runs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < runs; i = next++) {
      try {
        traces[i] = run_single(config, i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::size_t>(threads == 0 ? 1 : threads, 1, runs));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return aggregate(config, traces);
}

std::filesystem::path json_sibling(const std::filesystem::path& csv_path) {
  auto out = csv_path;
  out.replace_extension(".json");
  return out;
}

void write_results(const AggregateResult& result, const std::filesystem::path& csv_path) {
  if (result.rows.empty()) throw InputError("write_results: empty result");
  if (csv_path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(csv_path.parent_path(), ec);
  }

  std::ofstream csv(csv_path, std::ios::binary | std::ios::trunc);
  if (!csv) throw IoError("cannot open " + csv_path.string() + " for writing");
  csv << "step,mean_cum_regret,stderr,n_runs,config_fingerprint\n";
  for (const auto& row : result.rows) {
    csv << row.step << ',' << format_fixed(row.mean) << ','
        << (row.stderr_ ? format_fixed(*row.stderr_) : std::string()) << ',' << result.n_runs
        << ',' << result.fingerprint << '\n';
  }
  csv.flush();
  if (!csv) throw IoError("failed writing " + csv_path.string());

  const auto& c = result.config;
  const auto& e = c.environment;
  const auto& last = result.final_row();
  nlohmann::ordered_json doc;
  doc["config"] = {
      {"environment",
       {{"type", to_string(e.kind)},
        {"L", e.num_items},
        {"K", e.list_size},
        {"p", e.p},
        {"delta", e.delta},
        {"nu", e.satisfaction},
        {"gamma", e.persistence}}},
      {"policy",
       {{"name", to_string(c.policy.kind)},
        {"ordering", to_string(c.policy.ordering)},
        {"epsilon", c.policy.epsilon}}},
      {"experiment",
       {{"n_steps", c.n_steps},
        {"n_runs", c.n_runs},
        {"master_seed", c.master_seed},
        {"log_every", c.log_every},
        {"output", c.output}}}};
  doc["config_fingerprint"] = result.fingerprint;
  doc["canonical_config"] = to_ini(c);
  doc["summary"] = {{"step", last.step},
                    {"mean_cum_regret", last.mean},
                    {"stderr", last.stderr_ ? nlohmann::ordered_json(*last.stderr_)
                                            : nlohmann::ordered_json(nullptr)},
                    {"n_runs", result.n_runs}};

  const auto json_path = json_sibling(csv_path);
  std::ofstream js(json_path, std::ios::binary | std::ios::trunc);
  if (!js) throw IoError("cannot open " + json_path.string() + " for writing");
  js << doc.dump(2) << '\n';
  js.flush();
  if (!js) throw IoError("failed writing " + json_path.string());
}

}  // namespace cascade

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cascade/analysis.hpp"
#include "cascade/config.hpp"
#include "cascade/core.hpp"
#include "cascade/environments.hpp"
#include "cascade/estimation.hpp"
#include "cascade/harness.hpp"
#include "cascade/reproduce.hpp"
#include "cascade/selfcheck.hpp"

namespace py = pybind11;
using namespace cascade;

namespace {

// Configs cross the boundary as INI text, the same format the CLI reads.
ExperimentConfig config_from(const std::string& ini) {
  auto config = parse_config(ini);
  validate(config);
  return config;
}

py::dict aggregate_dict(const AggregateResult& result) {
  py::list steps, means, errors;
  for (const auto& row : result.rows) {
    steps.append(row.step);
    means.append(row.mean);
    errors.append(row.stderr_ ? py::cast(*row.stderr_) : py::none());
  }
  py::dict out;
  out["step"] = steps;
  out["mean_cum_regret"] = means;
  out["stderr"] = errors;
  out["n_runs"] = result.n_runs;
  out["fingerprint"] = result.fingerprint;
  return out;
}

py::dict criterion_dict(const CriterionResult& c) {
  py::dict out;
  out["id"] = c.id;
  out["name"] = c.name;
  out["passed"] = c.passed;
  out["details"] = c.details;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "C++ core of the cascading bandit simulator";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("list_value",
        [](const std::vector<ItemId>& list, const std::vector<double>& w) {
          return list_value(list, w);
        },
        py::arg("items"), py::arg("weights"), "1 - prod(1 - w[a]) over the list");
  m.def("first_click",
        [](const std::vector<ItemId>& list, const std::vector<std::uint8_t>& w) {
          return first_click(list, w).click;
        },
        py::arg("items"), py::arg("weights"),
        "1-based position of the first attractive item, or None");
  m.def("observed_weights",
        [](std::optional<std::size_t> click, std::size_t list_size) {
          std::vector<std::pair<std::size_t, int>> out;
          for (auto o : observed_weights({click}, list_size)) out.emplace_back(o.position, o.weight);
          return out;
        },
        py::arg("click"), py::arg("list_size"));
  m.def("optimal_list",
        [](const std::vector<double>& means, std::size_t k) {
          return optimal_list(AttractionModel(means), k);
        },
        py::arg("means"), py::arg("list_size"));

  m.def("ucb1_radius", &ucb1_radius, py::arg("step"), py::arg("count"));
  m.def("bernoulli_kl", &bernoulli_kl, py::arg("p"), py::arg("q"));
  m.def("klucb_threshold", &klucb_threshold, py::arg("step"));
  m.def("klucb_upper", &klucb_upper, py::arg("mean"), py::arg("count"), py::arg("threshold"));
  m.def("blb_means", &blb_means, py::arg("num_items"), py::arg("list_size"), py::arg("p"),
        py::arg("delta"));

  m.def("ucb1_bound",
        [](const std::vector<double>& means, std::size_t k, std::uint64_t n) {
          return ucb1_bound(AttractionModel(means), k, n);
        },
        py::arg("means"), py::arg("list_size"), py::arg("n"));
  m.def("klucb_bound_leading",
        [](const std::vector<double>& means, std::size_t k, std::uint64_t n, double eps) {
          return klucb_bound_leading(AttractionModel(means), k, n, eps);
        },
        py::arg("means"), py::arg("list_size"), py::arg("n"), py::arg("epsilon") = 0.1);
  m.def("lower_bound_constant", &lower_bound_constant, py::arg("num_items"),
        py::arg("list_size"), py::arg("p"), py::arg("delta"));
  m.def("bound_report",
        [](std::size_t l, std::size_t k, double p, double delta, std::uint64_t n, double eps) {
          const auto r = bound_report(l, k, p, delta, n, eps);
          py::dict out;
          out["instance"] = r.instance;
          out["n"] = r.n;
          out["ucb1_upper"] = r.ucb1_upper;
          out["klucb_upper_leading"] = r.klucb_upper_leading;
          out["lower_constant"] = r.lower_constant;
          out["lower_asymptotic"] = r.lower_asymptotic;
          out["notes"] = r.notes;
          return out;
        },
        py::arg("num_items"), py::arg("list_size"), py::arg("p"), py::arg("delta"),
        py::arg("n"), py::arg("epsilon") = 0.1);
  m.def("lemma1_oracle",
        [](const std::vector<ItemId>& a, const std::vector<ItemId>& b,
           const std::vector<double>& means) {
          const auto r = lemma1_oracle(a, b, AttractionModel(means));
          return std::make_pair(r.lhs, r.rhs);
        },
        py::arg("a"), py::arg("b"), py::arg("means"));
  m.def("lemma3_check",
        [](const std::vector<double>& ps, double p) {
          const auto r = lemma3_check(ps, p);
          return py::make_tuple(r.lhs, r.rhs, r.holds);
        },
        py::arg("ps"), py::arg("p"));

  m.def("parse_config", [](const std::string& ini) { return to_ini(config_from(ini)); },
        py::arg("ini"), "Validates INI text and returns its canonical form");
  m.def("to_ini", [](const std::string& ini) { return to_ini(parse_config(ini)); },
        py::arg("ini"));
  m.def("fingerprint", [](const std::string& ini) { return fingerprint(parse_config(ini)); },
        py::arg("ini"));

  m.def("run_single",
        [](const std::string& ini, std::uint64_t run_index) {
          const auto config = config_from(ini);
          RegretTrace trace;
          {
            py::gil_scoped_release release;
            trace = run_single(config, run_index);
          }
          std::vector<std::pair<std::uint64_t, double>> out;
          for (const auto& cp : trace.checkpoints) out.emplace_back(cp.step, cp.cumulative_regret);
          return out;
        },
        py::arg("ini"), py::arg("run_index") = 0);
  m.def("run_experiment",
        [](const std::string& ini, unsigned threads) {
          const auto config = config_from(ini);
          AggregateResult result;
          {
            py::gil_scoped_release release;
            result = run_experiment(config, threads);
          }
          return aggregate_dict(result);
        },
        py::arg("ini"), py::arg("threads") = 1);
  m.def("write_results",
        [](const std::string& ini, const std::filesystem::path& path, unsigned threads) {
          const auto config = config_from(ini);
          py::gil_scoped_release release;
          write_results(run_experiment(config, threads), path);
        },
        py::arg("ini"), py::arg("path"), py::arg("threads") = 1,
        "Runs the experiment and writes the CSV plus its JSON sibling");

  m.def("reproduce",
        [](const std::string& suite_name, std::uint64_t n_steps, std::uint64_t n_runs,
           unsigned threads) {
          const auto suite = parse_suite(suite_name);
          if (!suite) throw ConfigError("unknown suite '" + suite_name + "'");
          ReproduceOptions options;
          options.n_steps = n_steps;
          options.n_runs = n_runs;
          options.threads = threads;
          ExperimentCache cache;
          SuiteReport report;
          {
            py::gil_scoped_release release;
            report = reproduce(*suite, options, cache);
          }
          py::list cells, criteria;
          for (const auto& c : report.cells) {
            py::dict cell;
            cell["label"] = c.label;
            cell["measured"] = c.measured;
            cell["paper"] = c.paper ? py::cast(*c.paper) : py::none();
            cells.append(cell);
          }
          for (const auto& c : report.criteria) criteria.append(criterion_dict(c));
          py::dict out;
          out["cells"] = cells;
          out["criteria"] = criteria;
          out["passed"] = report.passed();
          out["report"] = format_report(report);
          return out;
        },
        py::arg("suite"), py::arg("n_steps") = 100000, py::arg("n_runs") = 20,
        py::arg("threads") = 1);

  m.def("run_selfcheck", [] {
    py::list out;
    for (const auto& r : run_selfcheck()) {
      py::dict d;
      d["name"] = r.name;
      d["cases"] = r.cases;
      d["failures"] = r.failures;
      d["passed"] = r.passed();
      out.append(d);
    }
    return out;
  });
}

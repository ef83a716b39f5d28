#include <doctest.h>

#include <filesystem>

#include "cascade/reproduce.hpp"

using namespace cascade;

TEST_CASE("reference tables") {
  const auto& dec = reference_rows(Ordering::DecreasingUcb);
  const auto& inc = reference_rows(Ordering::IncreasingUcb);
  REQUIRE(dec.size() == 9);
  REQUIRE(inc.size() == 9);
  CHECK(dec[0].klucb_mean == 357.9);
  CHECK(dec[2].klucb_mean == 149.1);
  CHECK(dec[2].klucb_stderr == 3.2);
  CHECK(inc[2].ucb1_mean == 181.4);
  CHECK(inc[2].ucb1_stderr == 3.9);
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(dec[i].num_items == inc[i].num_items);
    CHECK(dec[i].list_size == inc[i].list_size);
    CHECK(dec[i].delta == inc[i].delta);
  }
}

TEST_CASE("suite names") {
  CHECK(parse_suite("table1") == Suite::Table1);
  CHECK(parse_suite("ranked") == Suite::Ranked);
  CHECK_FALSE(parse_suite("table3").has_value());
  CHECK(to_string(Suite::Dbn) == "dbn");
}

TEST_CASE("short suites run, share cached cells and write files") {
  ReproduceOptions options;
  options.n_steps = 500;
  options.n_runs = 2;
  options.out_dir = std::filesystem::temp_directory_path() / "cascade-unit-reproduce";
  std::filesystem::remove_all(options.out_dir);
  ExperimentCache cache;

  const auto t1 = reproduce(Suite::Table1, options, cache);
  CHECK(t1.cells.size() == 18);
  CHECK(t1.criteria.size() == 3);
  CHECK(cache.size() == 18);
  const auto t2 = reproduce(Suite::Table2, options, cache);
  CHECK(t2.cells.size() == 36);
  CHECK(cache.size() == 36);  // the decreasing half came from the cache
  const auto ranked = reproduce(Suite::Ranked, options, cache);
  CHECK(ranked.criteria.front().id == 5);
  CHECK(ranked.criteria.front().details.size() == 4);

  const std::string text = format_report(t1);
  CHECK(text.find("criterion 1") != std::string::npos);
  CHECK(text.find("357.9") != std::string::npos);
  CHECK(std::filesystem::exists(options.out_dir / "table1" /
                                "cascade_L16_K2_d0.15_cascade-klucb_decreasing.csv"));
  std::filesystem::remove_all(options.out_dir);
}

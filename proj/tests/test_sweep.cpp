#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stmrta/sweep.hpp"

using namespace stmrta;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny(unsigned threads) {
  auto c = parse_config(
      "robot_count = 4\n"
      "task_counts = 3, 5\n"
      "strategies = dbta2, ibta\n"
      "transports = chaos, netflood\n"
      "iterations = 2\n");
  c.threads = threads;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const char* name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("seeds") {
  CHECK(scenario_seed(1, 40, 0) == scenario_seed(1, 40, 0));
  CHECK(scenario_seed(1, 40, 0) != scenario_seed(1, 40, 1));
  CHECK(scenario_seed(1, 40, 0) != scenario_seed(1, 80, 0));
  CHECK(scenario_seed(1, 40, 0) != scenario_seed(2, 40, 0));
  const auto s = scenario_seed(1, 40, 0);
  CHECK(protocol_seed(s, Strategy::parse("ibta"), Transport::chaos) !=
        protocol_seed(s, Strategy::parse("dbta2"), Transport::chaos));
  CHECK(protocol_seed(s, Strategy::parse("ibta"), Transport::chaos) !=
        protocol_seed(s, Strategy::parse("ibta"), Transport::netflood));
}

TEST_CASE("rows come back in nesting order and share scenarios") {
  const auto rows = run_sweep(tiny(3));
  REQUIRE(rows.size() == 16);
  CHECK(rows[0].strategy.name() == "dbta2");
  CHECK(rows[0].transport == Transport::chaos);
  CHECK(rows[0].task_count == 3);
  CHECK(rows[1].iteration == 1);
  CHECK(rows[2].task_count == 5);
  CHECK(rows[4].transport == Transport::netflood);
  CHECK(rows[8].strategy.name() == "ibta");
  for (std::size_t i = 0; i < 8; ++i) CHECK(rows[i].seed == rows[i + 8].seed);
  for (const auto& r : rows) CHECK(r.metrics.assignments.size() == r.task_count);
}

TEST_CASE("thread count does not change results") {
  const auto a = run_sweep(tiny(1));
  const auto b = run_sweep(tiny(5));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].metrics.makespan_ms == b[i].metrics.makespan_ms);
    CHECK(a[i].metrics.total_convergence_ms == b[i].metrics.total_convergence_ms);
    CHECK(a[i].metrics.assignments == b[i].metrics.assignments);
  }
}

TEST_CASE("outputs are byte-identical across runs") {
  const auto one = scratch("stmrta_sweep_a"), two = scratch("stmrta_sweep_b");
  const auto cfg = tiny(2);
  write_outputs(cfg, run_sweep(cfg), one);
  write_outputs(cfg, run_sweep(cfg), two);
  for (const char* f : {"runs.csv", "aggregate.csv", "makespan.dat", "convergence.dat",
                        "radio_on.dat", "run_header.txt"}) {
    CAPTURE(f);
    const auto text = slurp(one / f);
    CHECK_FALSE(text.empty());
    CHECK(text == slurp(two / f));
  }
  const auto runs = slurp(one / "runs.csv");
  CHECK(std::count(runs.begin(), runs.end(), '\n') == 17);
  const auto agg = slurp(one / "aggregate.csv");
  CHECK(std::count(agg.begin(), agg.end(), '\n') == 9);
  const auto dat = slurp(one / "makespan.dat");
  CHECK(dat.rfind("# task_count dbta2-chaos_mean dbta2-chaos_sd dbta2-netflood_mean", 0) == 0);
  fs::remove_all(one);
  fs::remove_all(two);
}

TEST_CASE("trace directory gets one log per chaos mission") {
  const auto dir = scratch("stmrta_sweep_trace");
  run_sweep(tiny(2), dir);
  std::size_t logs = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    ++logs;
    CHECK(e.path().extension() == ".log");
  }
  CHECK(logs == 8);
  CHECK(fs::exists(dir / "ibta_5_it1.log"));
  fs::remove_all(dir);
}

TEST_CASE("invalid sweeps are refused before any work") {
  auto c = tiny(1);
  c.strategies = {Strategy::parse("dbta7")};
  CHECK_THROWS_AS(run_sweep(c), ConfigError);
}

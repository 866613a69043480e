#include <doctest.h>

#include <set>
#include <sstream>
#include <string>

#include "stmrta/scenario.hpp"
#include "support.hpp"

using namespace stmrta;

namespace {

Scenario one_robot(std::initializer_list<std::pair<Point, double>> tasks) {
  Scenario sc;
  sc.robots = {{0, 0}};
  std::uint8_t id = 1;
  for (const auto& [where, at] : tasks) sc.tasks.emplace_back(TaskId{id++}, where, at);
  return sc;
}

MissionConfig mission(const std::string& strategy) {
  MissionConfig m;
  m.strategy = Strategy::parse(strategy);
  m.seed = 5;
  return m;
}

}  // namespace

TEST_CASE("arrival patterns") {
  std::mt19937_64 rng(1);
  const auto stat = arrival_times(5, {ArrivalKind::all_at_start}, rng);
  CHECK(stat == std::vector<double>(5, 0.0));

  const auto cont = arrival_times(140, {ArrivalKind::continuous}, rng);
  REQUIRE(cont.size() == 140);
  CHECK(cont.front() == 2000.0);
  CHECK(cont[3] == 2000.0);
  CHECK(cont[4] == 4000.0);
  CHECK(cont.back() == 70000.0);

  const auto spike = arrival_times(60, {ArrivalKind::spiking, 1000.0}, rng);
  std::map<double, int> batch;
  for (double t : spike) ++batch[t];
  std::vector<int> sizes;
  for (const auto& [t, c] : batch) sizes.push_back(c);
  REQUIRE(sizes.size() >= 10);
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    if (i % 5 < 3) CHECK((sizes[i] == 1 || sizes[i] == 2));
    else CHECK(sizes[i] == 8);
  }
  CHECK(std::is_sorted(spike.begin(), spike.end()));
  CHECK_THROWS_AS(arrival_times(3, {ArrivalKind::continuous, 0.0}, rng), std::invalid_argument);
}

TEST_CASE("arrival pattern names") {
  for (auto k : {ArrivalKind::all_at_start, ArrivalKind::continuous, ArrivalKind::spiking})
    CHECK(parse_arrival_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_arrival_kind("bursty"), std::invalid_argument);
  CHECK(parse_transport("netflood") == Transport::netflood);
  CHECK(parse_bid_origin("queue_end") == BidOrigin::queue_end);
  CHECK_THROWS_AS(parse_transport("wifi"), std::invalid_argument);
}

TEST_CASE("generated scenarios are deterministic, connected and well formed") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto a = generate_scenario(seed, 25, 80, {});
    const auto b = generate_scenario(seed, 25, 80, {});
    REQUIRE(a.robots.size() == 25);
    REQUIRE(a.tasks.size() == 80);
    CHECK(Topology(a.robots, a.radio_range).connected());
    for (std::size_t i = 0; i < a.robots.size(); ++i) {
      CHECK(a.robots[i].x == b.robots[i].x);
      CHECK(a.robots[i].y == b.robots[i].y);
    }
    for (std::size_t t = 0; t < a.tasks.size(); ++t) {
      CHECK(a.tasks[t].id().value == t + 1);
      CHECK(a.tasks[t].location().x == b.tasks[t].location().x);
      CHECK(a.tasks[t].location().x >= 0.0);
      CHECK(a.tasks[t].location().x <= 1000.0);
      CHECK(a.tasks[t].location().y <= 1000.0);
    }
  }
  const auto other = generate_scenario(31, 25, 80, {});
  CHECK(other.tasks[0].location().x != generate_scenario(30, 25, 80, {}).tasks[0].location().x);
  CHECK(generate_scenario(1, 3, 0, {}).tasks.empty());
  CHECK_THROWS_AS(generate_scenario(1, 3, 256, {}), std::invalid_argument);
  Deployment sparse;
  sparse.spacing = 1000;
  CHECK_THROWS_AS(generate_scenario(1, 4, 1, {}, {}, sparse), ScenarioError);
}

TEST_CASE("frames per transmission") {
  MissionConfig m = mission("dbta2");
  CHECK(frames_for(m) == 1);
  m.strategy = Strategy::parse("dbta3");
  CHECK_THROWS_AS(frames_for(m), std::invalid_argument);
  m.multi_packet = true;
  CHECK(frames_for(m) == 2);
  m.strategy = Strategy::parse("dbta5");
  CHECK(frames_for(m) == 3);
  m.layout = PacketLayout::wide();
  CHECK(frames_for(m) == 1);
  m.strategy = Strategy::parse("aata");
  CHECK(frames_for(m) == 1);
}

// A lone robot converges in one data slot plus the three completion slots,
// 32 ms, then drives 500 m at 1 m/ms.
TEST_CASE("lone robot mission by hand") {
  for (std::string s : {"dbta2", "ibta", "aata"}) {
    CAPTURE(s);
    const auto m = run_mission(one_robot({{{300, 400}, 0.0}}), mission(s));
    CHECK(m.makespan_ms == doctest::Approx(532.0));
    CHECK(m.total_convergence_ms == doctest::Approx(32.0));
    CHECK(m.radio_on_ms == std::vector<double>{32.0});
    CHECK(m.rounds_used == 1);
    CHECK(m.failed_rounds == 0);
  }
  auto slow = mission("dbta2");
  slow.robot_speed = 1.0;
  CHECK(run_mission(one_robot({{{300, 400}, 0.0}}), slow).makespan_ms == doctest::Approx(500032.0));
}

TEST_CASE("lone robot with two tasks: round counts per strategy") {
  const auto sc = one_robot({{{300, 400}, 0.0}, {{600, 800}, 0.0}});
  // DBTA2 and AATA settle both tasks in one round; IBTA needs one per task.
  const auto d = run_mission(sc, mission("dbta2"));
  CHECK(d.rounds_used == 1);
  CHECK(d.makespan_ms == doctest::Approx(1032.0));
  const auto a = run_mission(sc, mission("aata"));
  CHECK(a.rounds_used == 1);
  CHECK(a.makespan_ms == doctest::Approx(1032.0));
  const auto i = run_mission(sc, mission("ibta"));
  CHECK(i.rounds_used == 2);
  CHECK(i.total_convergence_ms == doctest::Approx(64.0));
  CHECK(i.makespan_ms == doctest::Approx(1032.0));
  REQUIRE(i.assignments.size() == 2);
  CHECK(i.assignments[0].task == TaskId{1});
}

TEST_CASE("a task discovered later starts a fresh round") {
  const auto m = run_mission(one_robot({{{300, 400}, 0.0}, {{300, 400}, 5000.0}}), mission("dbta2"));
  CHECK(m.rounds_used == 2);
  // second round at 5000 ms, robot already on site
  CHECK(m.makespan_ms == doctest::Approx(5032.0));
}

TEST_CASE("queue-end bids measure from the last queued task") {
  Scenario sc;
  sc.robots = {{0, 0}, {100, 0}};
  sc.tasks.emplace_back(TaskId{1}, Point{900, 0}, 0.0);
  sc.tasks.emplace_back(TaskId{2}, Point{950, 0}, 1.0);
  auto live = mission("ibta");
  auto queued = live;
  queued.bid_origin = BidOrigin::queue_end;
  // R1 takes T1; a live bid for T2 still favours R1 (it is en route), a
  // queue-end bid favours it even more, so both agree here...
  CHECK(run_mission(sc, live).assignments[1].robot == RobotId{1});
  CHECK(run_mission(sc, queued).assignments[1].robot == RobotId{1});
  // ...but with T2 behind R0, only the live origin hands it to R0.
  sc.tasks[1] = Task(TaskId{2}, Point{-300, 0}, 1.0);
  CHECK(run_mission(sc, live).assignments[1].robot == RobotId{0});
}

TEST_CASE("mission invariants on generated scenarios") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto sc = generate_scenario(seed, 9, 20, {});
    for (std::string s : {"dbta2", "ibta", "aata"}) {
      CAPTURE(s);
      const auto m = run_mission(sc, mission(s));
      CHECK(m.assignments.size() == 20);
      std::set<TaskId> tasks;
      for (const auto& a : m.assignments) tasks.insert(a.task);
      CHECK(tasks.size() == 20);
      CHECK(m.makespan_ms >= sc.tasks.back().discovery_ms());
      CHECK(m.radio_on_ms.size() == 9);
      for (double r : m.radio_on_ms) CHECK(r == doctest::Approx(m.total_convergence_ms));
      CHECK(m.failed_rounds == 0);
    }
  }
}

TEST_CASE("missions are reproducible") {
  const auto sc = generate_scenario(7, 16, 30, {});
  for (std::string s : {"dbta2", "ibta", "aata"}) {
    const auto a = run_mission(sc, mission(s));
    const auto b = run_mission(sc, mission(s));
    CHECK(a.makespan_ms == b.makespan_ms);
    CHECK(a.total_convergence_ms == b.total_convergence_ms);
    CHECK(a.assignments == b.assignments);
  }
}

TEST_CASE("netflood transport completes missions, more slowly") {
  const auto sc = generate_scenario(3, 9, 10, {});
  auto chaos = mission("dbta2");
  auto flood = chaos;
  flood.transport = Transport::netflood;
  const auto c = run_mission(sc, chaos);
  const auto f = run_mission(sc, flood);
  CHECK(f.assignments.size() == 10);
  CHECK(f.total_convergence_ms > c.total_convergence_ms);
  CHECK(f.mean_radio_on_ms() > c.mean_radio_on_ms());
}

TEST_CASE("chaos traces are written per round") {
  std::ostringstream log;
  auto m = mission("dbta2");
  m.trace = &log;
  run_mission(testing::golden_scenario(), m);
  CHECK(log.str().find("slot") != std::string::npos);
}

TEST_CASE("the clock ceiling stops runaway missions") {
  Scenario split;
  split.robots = {{0, 0}, {1500, 0}};
  split.tasks.emplace_back(TaskId{1}, Point{10, 0}, 0.0);
  auto m = mission("dbta2");
  m.clock_ceiling_ms = 1e5;
  CHECK_THROWS_AS(run_mission(split, m), MissionTimeout);

  auto far = mission("ibta");
  far.clock_ceiling_ms = 100;
  CHECK_THROWS_AS(run_mission(one_robot({{{900, 1200}, 0.0}}), far), MissionTimeout);
}

TEST_CASE("malformed scenarios are rejected") {
  CHECK_THROWS_AS(run_mission(Scenario{}, mission("dbta2")), std::invalid_argument);
  Scenario sc = one_robot({{{1, 1}, 0.0}});
  sc.tasks[0] = Task(TaskId{4}, Point{1, 1}, 0.0);
  CHECK_THROWS_AS(run_mission(sc, mission("dbta2")), std::invalid_argument);
  auto m = mission("dbta3");
  CHECK_THROWS_AS(run_mission(one_robot({}), m), std::invalid_argument);
}

#include <doctest.h>

#include <set>
#include <sstream>

#include "stmrta/chaos.hpp"
#include "support.hpp"

using namespace stmrta;
using namespace stmrta::testing;

namespace {

std::string marks(const SlotRecord& rec) {
  std::string s;
  for (Mark m : rec.marks) s.push_back(static_cast<char>(m));
  return s;
}

// Set-propagation model of a flags-only round with retries disabled: a robot
// relays in the slot after its set grew, listeners take the nearest in-range
// transmitter (capture always succeeds). Returns the agreement slot or -1.
int spread_oracle(const std::vector<Point>& pos, double range, std::size_t initiator,
                  int max_slots) {
  const std::size_t n = pos.size();
  std::vector<std::set<std::size_t>> know(n);
  for (std::size_t i = 0; i < n; ++i) know[i] = {i};
  std::vector<bool> fresh(n, false);
  for (int slot = 1; slot <= max_slots; ++slot) {
    std::vector<std::size_t> tx;
    for (std::size_t i = 0; i < n; ++i)
      if ((slot == 1 && i == initiator) || (slot > 1 && fresh[i])) tx.push_back(i);
    std::vector<std::set<std::size_t>> sent;
    for (auto t : tx) sent.push_back(know[t]);
    std::fill(fresh.begin(), fresh.end(), false);
    for (std::size_t l = 0; l < n; ++l) {
      if (std::find(tx.begin(), tx.end(), l) != tx.end()) continue;
      int best = -1;
      double best_d = 1e300;
      for (std::size_t k = 0; k < tx.size(); ++k) {
        const double d = distance(pos[l], pos[tx[k]]);
        if (d <= range && d < best_d) best_d = d, best = static_cast<int>(k);
      }
      if (best < 0) continue;
      const auto before = know[l].size();
      know[l].insert(sent[best].begin(), sent[best].end());
      fresh[l] = know[l].size() != before;
    }
    bool done = std::none_of(fresh.begin(), fresh.end(), [](bool b) { return b; });
    for (const auto& k : know) done = done && k.size() == n;
    if (done) return slot;
  }
  return -1;
}

}  // namespace

TEST_CASE("golden round reproduces the worked example slot by slot") {
  const GoldenRun run = run_golden();
  REQUIRE(run.stats.converged);
  CHECK(run.stats.slots_used == 6);
  REQUIRE(run.trace.slots.size() == 6);
  const char* want[] = {"TN-", "---", "NTN", "TNT", "NTO", "TO-"};
  for (int s = 0; s < 6; ++s) CHECK(marks(run.trace.slots[s]) == want[s]);
  CHECK(run.stats.duration_ms == doctest::Approx(48.0));
  // every robot stays awake for the whole round
  CHECK(run.stats.radio_on_ms == std::vector<double>(3, 48.0));
}

TEST_CASE("trace dump is line oriented") {
  GoldenRun run = run_golden();
  run.trace.keep_frames = false;
  for (auto& s : run.trace.slots) s.frames.clear();
  std::ostringstream out;
  run.trace.write(out);
  CHECK(out.str() ==
        "round seq=1 initiator=R0\n"
        "slot 1 R0:T R1:N R2:-\n"
        "slot 2 R0:- R1:- R2:-\n"
        "slot 3 R0:N R1:T R2:N\n"
        "slot 4 R0:T R1:N R2:T\n"
        "slot 5 R0:N R1:T R2:O\n"
        "slot 6 R0:T R1:O R2:-\n"
        "end slots=6\n");
}

TEST_CASE("singleton network agrees in one slot") {
  std::vector<FlagParticipant> one{FlagParticipant(RobotId{0}, 1, 13)};
  RoundConfig rc;
  rc.completion_tx = 0;
  const auto stats = run_chaos_round(std::span(one), Topology({{0, 0}}, 350), RobotId{0}, rc, 1);
  CHECK(stats.converged);
  CHECK(stats.slots_used == 1);
  CHECK(one[0].flags().count() == 1);
}

TEST_CASE("completion burst extends the round by completion_tx slots") {
  std::vector<FlagParticipant> two{FlagParticipant(RobotId{0}, 1, 13), FlagParticipant(RobotId{1}, 1, 13)};
  RoundConfig rc;
  rc.first_relay_slot = 2;
  const auto stats = run_chaos_round(std::span(two), Topology({{0, 0}, {10, 0}}, 350), RobotId{0}, rc, 1);
  CHECK(stats.converged);
  CHECK(stats.data_slots == 3);
  CHECK(stats.slots_used == 3 + rc.completion_tx);
}

TEST_CASE("flag spreading on a line matches the set-propagation oracle") {
  RoundConfig rc;
  rc.completion_tx = 0;
  rc.first_relay_slot = 2;
  rc.retry_timeout_slots = 100000;
  rc.radio.capture_ratio = 1.0;
  // uneven spacing so every listener has a unique nearest transmitter
  const std::vector<Point> line{{0, 0}, {100, 0}, {230, 0}, {340, 0}, {480, 0}};
  for (std::size_t init = 0; init < line.size(); ++init) {
    std::vector<FlagParticipant> nodes;
    for (std::uint16_t i = 0; i < line.size(); ++i) nodes.emplace_back(RobotId{i}, 3, 13);
    const auto stats = run_chaos_round(std::span(nodes), Topology(line, 150),
                                       RobotId{static_cast<std::uint16_t>(init)}, rc, 9);
    const int want = spread_oracle(line, 150, init, rc.max_slots);
    CAPTURE(init);
    CHECK(stats.converged == (want > 0));
    if (want > 0) CHECK(stats.data_slots == want);
    if (stats.converged)
      for (const auto& n : nodes) CHECK(n.flags().all_of_first(5));
  }
}

TEST_CASE("merge_flags ORs flags and ignores stale sequences") {
  ChaosPacket a, b;
  a.sequence = b.sequence = 4;
  a.flags = b.flags = FlagSet(1);
  a.flags.set(RobotId{0});
  b.flags.set(RobotId{1});
  auto m = merge_flags(a, b);
  CHECK(m.changed);
  CHECK_FALSE(m.stale);
  CHECK(m.packet.flags.bytes()[0] == 0b011);

  ChaosPacket all = m.packet;
  all.flags.set(RobotId{2});
  m = merge_flags(all, b);
  CHECK_FALSE(m.changed);
  CHECK(m.packet == all);

  b.sequence = 5;
  m = merge_flags(a, b);
  CHECK(m.stale);
  CHECK_FALSE(m.changed);
  CHECK(m.packet == a);
}

TEST_CASE("merge_flags equals set union on random pairs") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 1000; ++i) {
    ChaosPacket a, b;
    a.flags = b.flags = FlagSet(4);
    std::set<int> want;
    for (int r = 0; r < 32; ++r) {
      if (rng() % 2) a.flags.set(RobotId{std::uint16_t(r)}), want.insert(r);
      if (rng() % 2) b.flags.set(RobotId{std::uint16_t(r)}), want.insert(r);
    }
    const auto m = merge_flags(a, b);
    std::set<int> got;
    for (int r = 0; r < 32; ++r)
      if (m.packet.flags.test(RobotId{std::uint16_t(r)})) got.insert(r);
    REQUIRE(got == want);
    REQUIRE(m.changed == !b.flags.is_subset_of(a.flags));
  }
}

TEST_CASE("stale frames leave a participant untouched") {
  FlagParticipant p(RobotId{0}, 10, 2);
  p.begin(false);
  FlagParticipant other(RobotId{1}, 11, 2);
  other.begin(true);
  const auto before = p.packet();
  const auto r = p.receive(other.frame());
  CHECK(r.stale);
  CHECK_FALSE(r.changed);
  CHECK(p.packet() == before);
}

TEST_CASE("round parameters are validated") {
  std::vector<FlagParticipant> one{FlagParticipant(RobotId{0}, 1, 1)};
  RoundConfig rc;
  CHECK_THROWS_AS(run_chaos_round(std::span(one), Topology({{0, 0}, {1, 1}}, 350), RobotId{0}, rc, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_chaos_round(std::span(one), Topology({{0, 0}}, 350), RobotId{1}, rc, 1),
                  std::invalid_argument);
  rc.max_slots = 0;
  CHECK_THROWS_AS(run_chaos_round(std::span(one), Topology({{0, 0}}, 350), RobotId{0}, rc, 1),
                  std::invalid_argument);
}

TEST_CASE("a disconnected network times out at max_slots") {
  std::vector<FlagParticipant> nodes{FlagParticipant(RobotId{0}, 1, 1), FlagParticipant(RobotId{1}, 1, 1)};
  RoundConfig rc;
  rc.max_slots = 40;
  const auto stats = run_chaos_round(std::span(nodes), Topology({{0, 0}, {1000, 0}}, 350), RobotId{0}, rc, 1);
  CHECK_FALSE(stats.converged);
  CHECK(stats.slots_used == 40);
  CHECK(stats.duration_ms == doctest::Approx(320.0));
}

#include "stmrta/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace stmrta {

ExperimentConfig::ExperimentConfig()
    : strategies{Strategy::parse("aata"), Strategy::parse("ibta"),
                 Strategy::parse("dbta2")} {
  for (std::size_t t = 10; t <= 140; t += 10) task_counts.push_back(t);
}

ConfigError::ConfigError(std::size_t line, const std::string& what)
    : std::runtime_error(line ? "config line " + std::to_string(line) + ": " + what
                              : "config: " + what),
      line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) return out;
    s.remove_prefix(pos + 1);
  }
}

template <class T>
T number(std::string_view s) {
  s = trim(s);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw std::invalid_argument("'" + std::string(s) + "' is not a valid number");
  return value;
}

bool boolean(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("'" + std::string(s) + "' is not a boolean");
}

template <class T, class F>
std::vector<T> list_of(std::string_view s, F parse_one) {
  std::vector<T> out;
  for (auto item : split(s, ',')) out.push_back(parse_one(item));
  return out;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"robot_count", [](auto& c, auto v) { c.robot_count = number<std::size_t>(v); }},
      {"task_count", [](auto& c, auto v) { c.task_counts = parse_count_list(v); }},
      {"task_counts", [](auto& c, auto v) { c.task_counts = parse_count_list(v); }},
      {"strategy", [](auto& c, auto v) { c.strategies = list_of<Strategy>(v, Strategy::parse); }},
      {"strategies", [](auto& c, auto v) { c.strategies = list_of<Strategy>(v, Strategy::parse); }},
      {"transport", [](auto& c, auto v) { c.transports = list_of<Transport>(v, parse_transport); }},
      {"transports", [](auto& c, auto v) { c.transports = list_of<Transport>(v, parse_transport); }},
      {"pattern", [](auto& c, auto v) { c.pattern.kind = parse_arrival_kind(v); }},
      {"interval_ms", [](auto& c, auto v) { c.pattern.interval_ms = number<double>(v); }},
      {"tasks_per_interval", [](auto& c, auto v) { c.pattern.per_interval = number<int>(v); }},
      {"seed_base", [](auto& c, auto v) { c.seed_base = number<std::uint64_t>(v); }},
      {"iterations", [](auto& c, auto v) { c.iterations = number<int>(v); }},
      {"threads", [](auto& c, auto v) { c.threads = number<unsigned>(v); }},
      {"arena_width", [](auto& c, auto v) { c.arena.width = number<double>(v); }},
      {"arena_height", [](auto& c, auto v) { c.arena.height = number<double>(v); }},
      {"grid_spacing", [](auto& c, auto v) { c.deployment.spacing = number<double>(v); }},
      {"grid_jitter", [](auto& c, auto v) { c.deployment.jitter = number<double>(v); }},
      {"radio_range", [](auto& c, auto v) { c.deployment.radio_range = number<double>(v); }},
      {"capture_ratio",
       [](auto& c, auto v) {
         c.mission.round.radio.capture_ratio = number<double>(v);
         c.mission.netflood.radio.capture_ratio = c.mission.round.radio.capture_ratio;
       }},
      {"loss_probability",
       [](auto& c, auto v) {
         c.mission.round.radio.loss_probability = number<double>(v);
         c.mission.netflood.radio.loss_probability = c.mission.round.radio.loss_probability;
       }},
      {"slot_ms", [](auto& c, auto v) { c.mission.round.slot_ms = number<double>(v); }},
      {"max_slots", [](auto& c, auto v) { c.mission.round.max_slots = number<int>(v); }},
      {"completion_tx", [](auto& c, auto v) { c.mission.round.completion_tx = number<int>(v); }},
      {"first_relay_slot", [](auto& c, auto v) { c.mission.round.first_relay_slot = number<int>(v); }},
      {"retry_timeout_slots",
       [](auto& c, auto v) { c.mission.round.retry_timeout_slots = number<int>(v); }},
      {"retry_jitter_slots",
       [](auto& c, auto v) { c.mission.round.retry_jitter_slots = number<int>(v); }},
      {"keepalive_factor", [](auto& c, auto v) { c.mission.round.keepalive_factor = number<int>(v); }},
      {"layout",
       [](auto& c, auto v) {
         v = trim(v);
         if (v == "standard") c.mission.layout = PacketLayout::standard();
         else if (v == "wide") c.mission.layout = PacketLayout::wide();
         else throw std::invalid_argument("layout must be standard or wide");
       }},
      {"entries", [](auto& c, auto v) { c.mission.layout.entries = number<std::size_t>(v); }},
      {"flag_bytes", [](auto& c, auto v) { c.mission.layout.flag_bytes = number<std::size_t>(v); }},
      {"multi_packet", [](auto& c, auto v) { c.mission.multi_packet = boolean(v); }},
      {"robot_speed", [](auto& c, auto v) { c.mission.robot_speed = number<double>(v); }},
      {"bid_origin", [](auto& c, auto v) { c.mission.bid_origin = parse_bid_origin(trim(v)); }},
      {"bid_scale", [](auto& c, auto v) { c.mission.bid_scale = number<BidValue>(v); }},
      {"aata_max_rounds", [](auto& c, auto v) { c.mission.aata_max_rounds = number<int>(v); }},
      {"clock_ceiling_ms", [](auto& c, auto v) { c.mission.clock_ceiling_ms = number<double>(v); }},
      {"netflood_ttl", [](auto& c, auto v) { c.mission.netflood.ttl = number<int>(v); }},
      {"netflood_per_hop_ms",
       [](auto& c, auto v) { c.mission.netflood.per_hop_delay_ms = number<double>(v); }},
      {"netflood_backoff_slots",
       [](auto& c, auto v) { c.mission.netflood.backoff_window_slots = number<int>(v); }},
  };
  return table;
}

}  // namespace

std::vector<std::size_t> parse_count_list(std::string_view text) {
  text = trim(text);
  std::vector<std::size_t> out;
  if (const auto dots = text.find(".."); dots != std::string_view::npos) {
    const auto first = number<std::size_t>(text.substr(0, dots));
    std::string_view rest = text.substr(dots + 2);
    std::size_t step = 1;
    if (const auto s = rest.find("step"); s != std::string_view::npos) {
      step = number<std::size_t>(rest.substr(s + 4));
      rest = rest.substr(0, s);
    }
    const auto last = number<std::size_t>(rest);
    if (step == 0 || last < first) throw std::invalid_argument("empty range '" + std::string(text) + "'");
    for (std::size_t v = first; v <= last; v += step) out.push_back(v);
    return out;
  }
  return list_of<std::size_t>(text, number<std::size_t>);
}

void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& what) { throw ConfigError(0, what); };
  if (c.robot_count == 0) fail("robot_count must be >= 1");
  if (c.iterations < 1) fail("iterations must be >= 1");
  if (c.task_counts.empty()) fail("no task counts");
  if (c.strategies.empty()) fail("no strategies");
  if (c.transports.empty()) fail("no transports");
  for (auto t : c.task_counts)
    if (t > 255) fail("task count " + std::to_string(t) + " exceeds the 255 one-byte task ids");
  try {
    validate_layout(c.mission.layout);
  } catch (const CodecError& e) {
    fail(e.what());
  }
  if (c.robot_count > max_robots_for_layout(c.mission.layout))
    fail(std::to_string(c.robot_count) + " robots do not fit " +
         std::to_string(c.mission.layout.flag_bytes) + " flag bytes");
  if (!(c.mission.robot_speed > 0.0)) fail("robot_speed must be > 0");
  if (!(c.mission.round.slot_ms > 0.0)) fail("slot_ms must be > 0");
  if (c.mission.round.max_slots < 1) fail("max_slots must be >= 1");
  const double loss = c.mission.round.radio.loss_probability;
  if (loss < 0.0 || loss > 1.0) fail("loss_probability must lie in [0, 1]");
  for (const auto& s : c.strategies) {
    MissionConfig m = c.mission;
    m.strategy = s;
    try {
      frames_for(m);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  cfg.source = std::string(text);
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(line_no, "unknown key '" + std::string(key) + "'");
    if (!seen.insert(std::string(key)).second)
      throw ConfigError(line_no, "duplicate key '" + std::string(key) + "'");
    if (value.empty()) throw ConfigError(line_no, "missing value for '" + std::string(key) + "'");
    try {
      it->second(cfg, value);
    } catch (const std::exception& e) {
      throw ConfigError(line_no, std::string(key) + ": " + e.what());
    }
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace stmrta

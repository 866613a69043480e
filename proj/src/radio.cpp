#include "stmrta/radio.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace stmrta {

Topology::Topology(std::vector<Point> positions, double radio_range)
    : positions_(std::move(positions)), range_(radio_range) {
  if (range_ <= 0.0) throw std::invalid_argument("radio range must be positive");
}

bool Topology::linked(RobotId a, RobotId b) const {
  if (a == b) return false;
  return distance(position(a), position(b)) <= range_;
}

std::vector<RobotId> Topology::neighbours(RobotId r) const {
  std::vector<RobotId> out;
  for (std::size_t i = 0; i < size(); ++i) {
    const RobotId other{static_cast<std::uint16_t>(i)};
    if (linked(r, other)) out.push_back(other);
  }
  return out;
}

std::vector<int> Topology::hops_from(RobotId from) const {
  std::vector<int> hops(size(), -1);
  std::queue<RobotId> frontier;
  hops.at(from.value) = 0;
  frontier.push(from);
  while (!frontier.empty()) {
    const RobotId r = frontier.front();
    frontier.pop();
    for (RobotId n : neighbours(r)) {
      if (hops[n.value] >= 0) continue;
      hops[n.value] = hops[r.value] + 1;
      frontier.push(n);
    }
  }
  return hops;
}

bool Topology::connected() const {
  if (size() <= 1) return true;
  const auto hops = hops_from(RobotId{0});
  return std::ranges::none_of(hops, [](int h) { return h < 0; });
}

int Topology::diameter() const {
  int best = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    for (int h : hops_from(RobotId{static_cast<std::uint16_t>(i)})) {
      if (h < 0) return -1;
      best = std::max(best, h);
    }
  }
  return best;
}

SlotOutcome resolve_slot(const Topology& topology,
                         std::span<const Transmission> transmissions,
                         std::span<const RobotId> listeners,
                         const RadioParams& params) {
  SlotOutcome out;
  out.per_receiver.resize(topology.size());

  for (const auto& tx : transmissions) {
    if (std::ranges::find(listeners, tx.from) != listeners.end())
      throw std::invalid_argument(to_string(tx.from) +
                                  " cannot transmit and listen in one slot");
  }

  struct InRange {
    double dist;
    const Transmission* tx;
  };
  std::vector<InRange> heard;

  for (RobotId listener : listeners) {
    heard.clear();
    for (const auto& tx : transmissions) {
      if (topology.linked(listener, tx.from))
        heard.push_back({distance(topology.position(listener),
                                  topology.position(tx.from)),
                         &tx});
    }
    Reception& rx = out.per_receiver.at(listener.value);
    if (heard.empty()) continue;

    std::ranges::sort(heard, [](const InRange& a, const InRange& b) {
      if (a.dist != b.dist) return a.dist < b.dist;
      return a.tx->from < b.tx->from;
    });

    const bool identical = std::ranges::all_of(heard, [&](const InRange& h) {
      return h.tx->frame == heard.front().tx->frame;
    });

    bool captured = identical;
    if (!identical) {
      const double d1 = heard[0].dist;
      const double d2 = heard[1].dist;
      captured = d1 <= 0.0 || d2 / d1 >= params.capture_ratio;
    }

    if (!captured) {
      rx.kind = Reception::Kind::collision;
      continue;
    }
    if (params.loss_probability > 0.0) {
      if (!params.rng)
        throw std::invalid_argument("loss_probability requires an rng");
      std::bernoulli_distribution lost(params.loss_probability);
      if (lost(*params.rng)) continue;
    }
    rx.kind = Reception::Kind::received;
    rx.from = heard.front().tx->from;
    rx.frame = heard.front().tx->frame;
  }
  return out;
}

void account_radio_time(std::span<double> radio_on_ms,
                        std::span<const SlotActivity> activity, double slot_ms) {
  if (radio_on_ms.size() != activity.size())
    throw std::invalid_argument("activity/robot count mismatch");
  for (std::size_t i = 0; i < activity.size(); ++i) {
    if (activity[i] != SlotActivity::sleep) radio_on_ms[i] += slot_ms;
  }
}

void account_radio_time(std::span<Robot> robots,
                        std::span<const SlotActivity> activity, double slot_ms) {
  if (robots.size() != activity.size())
    throw std::invalid_argument("activity/robot count mismatch");
  for (std::size_t i = 0; i < activity.size(); ++i) {
    if (activity[i] != SlotActivity::sleep) robots[i].radio_on_ms += slot_ms;
  }
}

}  // namespace stmrta

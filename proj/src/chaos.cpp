#include "stmrta/chaos.hpp"

#include <ostream>

namespace stmrta {

FlagMerge merge_flags(const ChaosPacket& local, const ChaosPacket& received) {
  FlagMerge out{local, false, false};
  if (received.sequence != local.sequence) {
    out.stale = true;
    return out;
  }
  out.changed = out.packet.flags.merge(received.flags);
  return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 0xF]);
  }
  return s;
}

void RoundTrace::write(std::ostream& out) const {
  out << "round seq=" << sequence << " initiator=" << to_string(initiator)
      << '\n';
  for (const auto& rec : slots) {
    out << "slot " << rec.slot;
    for (std::size_t i = 0; i < rec.marks.size(); ++i)
      out << ' ' << to_string(RobotId{static_cast<std::uint16_t>(i)}) << ':'
          << static_cast<char>(rec.marks[i]);
    out << '\n';
    for (const auto& tx : rec.frames)
      out << "  frame " << to_string(tx.from) << ' ' << to_hex(tx.frame) << '\n';
  }
  if (completion_slots > 0) out << "completion " << completion_slots << '\n';
  out << "end slots=" << slots.size() + static_cast<std::size_t>(completion_slots)
      << '\n';
}

FlagParticipant::FlagParticipant(RobotId self, std::uint32_t sequence,
                                 std::size_t flag_bytes)
    : self_(self), layout_{1, flag_bytes} {
  packet_.sequence = sequence;
  packet_.flags = FlagSet(flag_bytes);
}

void FlagParticipant::begin(bool) { packet_.flags.set(self_); }

Frame FlagParticipant::frame() const { return encode(packet_, layout_); }

ReceiveResult FlagParticipant::receive(std::span<const std::uint8_t> bytes) {
  const ChaosPacket received = decode(bytes, layout_);
  FlagMerge m = merge_flags(packet_, received);
  if (m.stale) return {false, true};
  packet_ = std::move(m.packet);
  return {m.changed, false};
}

}  // namespace stmrta

#include "stmrta/codec.hpp"

#include <bit>
#include <string>

namespace stmrta {

namespace {

void put_u32(std::uint8_t* out, std::uint32_t v) {
  out[0] = static_cast<std::uint8_t>(v >> 24);
  out[1] = static_cast<std::uint8_t>(v >> 16);
  out[2] = static_cast<std::uint8_t>(v >> 8);
  out[3] = static_cast<std::uint8_t>(v);
}

std::uint32_t get_u32(const std::uint8_t* in) {
  return (std::uint32_t{in[0]} << 24) | (std::uint32_t{in[1]} << 16) |
         (std::uint32_t{in[2]} << 8) | std::uint32_t{in[3]};
}

void put_u16(std::uint8_t* out, std::uint16_t v) {
  out[0] = static_cast<std::uint8_t>(v >> 8);
  out[1] = static_cast<std::uint8_t>(v);
}

std::uint16_t get_u16(const std::uint8_t* in) {
  return static_cast<std::uint16_t>((in[0] << 8) | in[1]);
}

}  // namespace

std::size_t max_robots_for_layout(const PacketLayout& layout) {
  return 8 * layout.flag_bytes;
}

void validate_layout(const PacketLayout& layout) {
  if (layout.entries == 0) throw CodecError("layout has no entry slots");
  if (layout.flag_bytes == 0) throw CodecError("layout has no flag bytes");
  if (layout.frame_size() > kFrameDataBudget)
    throw CodecError("layout needs " + std::to_string(layout.frame_size()) +
                     " bytes, frame budget is " +
                     std::to_string(kFrameDataBudget));
}

bool FlagSet::test(RobotId r) const {
  if (r.value >= capacity()) return false;
  return (bytes_[r.value / 8] >> (r.value % 8)) & 1u;
}

void FlagSet::set(RobotId r) {
  if (r.value >= capacity())
    throw CodecError(to_string(r) + " exceeds flag capacity " +
                     std::to_string(capacity()));
  bytes_[r.value / 8] |= static_cast<std::uint8_t>(1u << (r.value % 8));
}

std::size_t FlagSet::count() const {
  std::size_t n = 0;
  for (auto b : bytes_) n += static_cast<std::size_t>(std::popcount(b));
  return n;
}

bool FlagSet::all_of_first(std::size_t n) const {
  if (n > capacity()) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!test(RobotId{static_cast<std::uint16_t>(i)})) return false;
  }
  return true;
}

bool FlagSet::is_subset_of(const FlagSet& other) const {
  for (std::size_t i = 0; i < bytes_.size(); ++i) {
    const std::uint8_t theirs = i < other.bytes_.size() ? other.bytes_[i] : 0;
    if (bytes_[i] & ~theirs) return false;
  }
  return true;
}

bool FlagSet::merge(const FlagSet& other) {
  if (other.bytes_.size() != bytes_.size())
    throw CodecError("flag width mismatch");
  bool added = false;
  for (std::size_t i = 0; i < bytes_.size(); ++i) {
    const auto merged = static_cast<std::uint8_t>(bytes_[i] | other.bytes_[i]);
    added |= merged != bytes_[i];
    bytes_[i] = merged;
  }
  return added;
}

Frame encode(const ChaosPacket& packet, const PacketLayout& layout,
             std::size_t frames) {
  validate_layout(layout);
  if (frames == 0) throw CodecError("frame count must be positive");
  if (packet.entries.size() > layout.entries * frames)
    throw CodecError(std::to_string(packet.entries.size()) +
                     " entries exceed layout capacity " +
                     std::to_string(layout.entries * frames));
  if (packet.flags.byte_size() != layout.flag_bytes)
    throw CodecError("flags are " + std::to_string(packet.flags.byte_size()) +
                     " bytes, layout expects " +
                     std::to_string(layout.flag_bytes));

  const std::size_t k = layout.entries;
  const std::size_t size = layout.frame_size();
  Frame out(size * frames, 0);

  for (std::size_t f = 0; f < frames; ++f) {
    std::uint8_t* base = out.data() + f * size;
    put_u32(base, packet.sequence);
    std::uint8_t* tasks = base + kSequenceBytes;
    std::uint8_t* winners = tasks + k;
    std::uint8_t* priorities = winners + k;
    std::uint8_t* bids = priorities + k;
    std::uint8_t* flags = bids + 2 * k;

    for (std::size_t slot = 0; slot < k; ++slot) {
      const std::size_t idx = f * k + slot;
      if (idx >= packet.entries.size()) break;
      const BidEntry& e = packet.entries[idx];
      if (e.bid == 0) throw CodecError("entry with zero bid cannot be encoded");
      if (e.priority == 0) throw CodecError("entry priority must be >= 1");
      if (e.winner.value > 0xFF)
        throw CodecError(to_string(e.winner) + " does not fit the winner byte");
      tasks[slot] = e.task.value;
      winners[slot] = static_cast<std::uint8_t>(e.winner.value);
      priorities[slot] = e.priority;
      put_u16(bids + 2 * slot, e.bid);
    }
    std::copy(packet.flags.bytes().begin(), packet.flags.bytes().end(), flags);
  }
  return out;
}

ChaosPacket decode(std::span<const std::uint8_t> bytes,
                   const PacketLayout& layout, std::size_t frames) {
  validate_layout(layout);
  const std::size_t size = layout.frame_size();
  if (frames == 0 || bytes.size() != size * frames)
    throw MalformedFrame("frame is " + std::to_string(bytes.size()) +
                         " bytes, expected " + std::to_string(size * frames));

  const std::size_t k = layout.entries;
  ChaosPacket packet;
  packet.flags = FlagSet(layout.flag_bytes);

  for (std::size_t f = 0; f < frames; ++f) {
    const std::uint8_t* base = bytes.data() + f * size;
    const std::uint32_t seq = get_u32(base);
    if (f == 0) {
      packet.sequence = seq;
    } else if (seq != packet.sequence) {
      throw MalformedFrame("sequence differs between frames of one packet");
    }
    const std::uint8_t* tasks = base + kSequenceBytes;
    const std::uint8_t* winners = tasks + k;
    const std::uint8_t* priorities = winners + k;
    const std::uint8_t* bids = priorities + k;
    const std::uint8_t* flags = bids + 2 * k;

    for (std::size_t slot = 0; slot < k; ++slot) {
      const BidValue bid = get_u16(bids + 2 * slot);
      if (bid == 0) continue;
      packet.entries.push_back(BidEntry{TaskId{tasks[slot]}, bid,
                                        priorities[slot],
                                        RobotId{winners[slot]}});
    }
    FlagSet frame_flags(layout.flag_bytes);
    std::copy(flags, flags + layout.flag_bytes, frame_flags.raw().begin());
    packet.flags.merge(frame_flags);
  }
  return packet;
}

std::size_t tuple_capacity(std::size_t flag_bytes) {
  if (flag_bytes + kSequenceBytes >= kFrameDataBudget) return 0;
  return (kFrameDataBudget - kSequenceBytes - flag_bytes) / kTupleBytes;
}

Frame encode_tuples(const TuplePacket& packet, std::size_t flag_bytes) {
  const std::size_t cap = tuple_capacity(flag_bytes);
  if (cap == 0) throw CodecError("no room for tuples beside the flags");
  if (packet.tuples.size() > cap)
    throw CodecError(std::to_string(packet.tuples.size()) +
                     " tuples exceed capacity " + std::to_string(cap));
  if (packet.flags.byte_size() != flag_bytes)
    throw CodecError("flag width mismatch");

  Frame out(kFrameDataBudget, 0);
  put_u32(out.data(), packet.sequence);
  std::uint8_t* p = out.data() + kSequenceBytes;
  for (const auto& t : packet.tuples) {
    if (t.bid == 0) throw CodecError("tuple with zero bid cannot be encoded");
    if (t.robot.value > 0xFF)
      throw CodecError(to_string(t.robot) + " does not fit the robot byte");
    p[0] = static_cast<std::uint8_t>(t.robot.value);
    p[1] = t.task.value;
    put_u16(p + 2, t.bid);
    p += kTupleBytes;
  }
  std::uint8_t* flags = out.data() + kFrameDataBudget - flag_bytes;
  std::copy(packet.flags.bytes().begin(), packet.flags.bytes().end(), flags);
  return out;
}

TuplePacket decode_tuples(std::span<const std::uint8_t> bytes,
                          std::size_t flag_bytes) {
  const std::size_t cap = tuple_capacity(flag_bytes);
  if (bytes.size() != kFrameDataBudget || cap == 0)
    throw MalformedFrame("tuple frame is " + std::to_string(bytes.size()) +
                         " bytes, expected " +
                         std::to_string(kFrameDataBudget));
  TuplePacket packet;
  packet.sequence = get_u32(bytes.data());
  const std::uint8_t* p = bytes.data() + kSequenceBytes;
  for (std::size_t i = 0; i < cap; ++i, p += kTupleBytes) {
    const BidValue bid = get_u16(p + 2);
    if (bid == 0) continue;
    packet.tuples.push_back(BidTuple{RobotId{p[0]}, TaskId{p[1]}, bid});
  }
  packet.flags = FlagSet(flag_bytes);
  const std::uint8_t* flags = bytes.data() + kFrameDataBudget - flag_bytes;
  std::copy(flags, flags + flag_bytes, packet.flags.raw().begin());
  return packet;
}

}  // namespace stmrta

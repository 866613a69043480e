#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "stmrta/model.hpp"
#include "stmrta/radio.hpp"

namespace stmrta {

/// 802.15.4 frames carry at most 125 data bytes after the Chaos header.
inline constexpr std::size_t kFrameDataBudget = 125;
inline constexpr std::size_t kSequenceBytes = 4;
/// taskId + winner + priority + 2-byte bid.
inline constexpr std::size_t kEntryBytes = 5;
/// robotId + taskId + 2-byte bid.
inline constexpr std::size_t kTupleBytes = 4;

/// Shape of one consensus frame: `entries` bid slots and `flag_bytes` of flags.
struct PacketLayout {
  std::size_t entries = 2;
  std::size_t flag_bytes = 103;

  std::size_t frame_size() const {
    return kSequenceBytes + entries * kEntryBytes + flag_bytes;
  }

  friend bool operator==(const PacketLayout&, const PacketLayout&) = default;

  /// [seq 4 | taskIds 2 | winners 2 | priorities 2 | bids 4 | flags 103]
  static constexpr PacketLayout standard() { return {2, 103}; }
  /// [seq 4 | taskIds 20 | winners 20 | priorities 20 | bids 40 | flags 13]
  static constexpr PacketLayout wide() { return {20, 13}; }
};

/// 8 * flag_bytes.
std::size_t max_robots_for_layout(const PacketLayout& layout);

/// Throws CodecError if the layout overflows the frame budget or is empty.
void validate_layout(const PacketLayout& layout);

/// One bit per robot; bit i of the bitmap is bit (i % 8) of byte (i / 8).
class FlagSet {
 public:
  FlagSet() = default;
  explicit FlagSet(std::size_t bytes) : bytes_(bytes, 0) {}

  std::size_t byte_size() const { return bytes_.size(); }
  std::size_t capacity() const { return bytes_.size() * 8; }
  bool test(RobotId r) const;
  void set(RobotId r);
  std::size_t count() const;
  /// True if robots 0..n-1 all have their bit set.
  bool all_of_first(std::size_t n) const;
  bool is_subset_of(const FlagSet& other) const;
  /// Bitwise OR; returns true if any bit was added.
  bool merge(const FlagSet& other);

  std::span<const std::uint8_t> bytes() const { return bytes_; }
  std::vector<std::uint8_t>& raw() { return bytes_; }

  friend bool operator==(const FlagSet&, const FlagSet&) = default;

 private:
  std::vector<std::uint8_t> bytes_;
};

struct ChaosPacket {
  std::uint32_t sequence = 0;
  std::vector<BidEntry> entries;
  FlagSet flags;

  friend bool operator==(const ChaosPacket&, const ChaosPacket&) = default;
};

class CodecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedFrame : public CodecError {
 public:
  using CodecError::CodecError;
};

/// Fixed-length, big-endian encoding; unused entry slots are zero.
/// A packet may span several frames (multi-packet mode): entries are split
/// into chunks of layout.entries and every frame repeats seq and flags.
Frame encode(const ChaosPacket& packet, const PacketLayout& layout,
             std::size_t frames = 1);

/// Inverse of encode. Slots whose bid is zero decode as absent entries.
ChaosPacket decode(std::span<const std::uint8_t> bytes,
                   const PacketLayout& layout, std::size_t frames = 1);

/// All-to-all sharing payload: (robot, task, bid) tuples.
struct BidTuple {
  RobotId robot;
  TaskId task;
  BidValue bid = 0;

  friend auto operator<=>(const BidTuple&, const BidTuple&) = default;
};

struct TuplePacket {
  std::uint32_t sequence = 0;
  std::vector<BidTuple> tuples;
  FlagSet flags;

  friend bool operator==(const TuplePacket&, const TuplePacket&) = default;
};

/// Tuples that fit beside seq and flags in one 125-byte frame.
std::size_t tuple_capacity(std::size_t flag_bytes);

/// [seq 4 | tuples (robot 1, task 1, bid 2) x capacity | zero pad | flags]
/// Always kFrameDataBudget bytes long.
Frame encode_tuples(const TuplePacket& packet, std::size_t flag_bytes);
TuplePacket decode_tuples(std::span<const std::uint8_t> bytes,
                          std::size_t flag_bytes);

}  // namespace stmrta

#include "stmrta/netflood.hpp"

#include "stmrta/codec.hpp"

namespace stmrta {

Frame encode_flood(const FloodFrame& frame) {
  Frame out(kFloodHeaderBytes + frame.payload.size());
  out[0] = static_cast<std::uint8_t>(frame.sender.value >> 8);
  out[1] = static_cast<std::uint8_t>(frame.sender.value);
  out[2] = static_cast<std::uint8_t>(frame.packet_id >> 24);
  out[3] = static_cast<std::uint8_t>(frame.packet_id >> 16);
  out[4] = static_cast<std::uint8_t>(frame.packet_id >> 8);
  out[5] = static_cast<std::uint8_t>(frame.packet_id);
  out[6] = frame.ttl;
  out[7] = static_cast<std::uint8_t>(frame.forwarder.value >> 8);
  out[8] = static_cast<std::uint8_t>(frame.forwarder.value);
  std::copy(frame.payload.begin(), frame.payload.end(),
            out.begin() + kFloodHeaderBytes);
  return out;
}

FloodFrame decode_flood(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFloodHeaderBytes)
    throw MalformedFrame("flood frame shorter than its header");
  FloodFrame f;
  f.sender = RobotId{static_cast<std::uint16_t>((bytes[0] << 8) | bytes[1])};
  f.packet_id = (std::uint32_t{bytes[2]} << 24) | (std::uint32_t{bytes[3]} << 16) |
                (std::uint32_t{bytes[4]} << 8) | std::uint32_t{bytes[5]};
  f.ttl = bytes[6];
  f.forwarder = RobotId{static_cast<std::uint16_t>((bytes[7] << 8) | bytes[8])};
  f.payload.assign(bytes.begin() + kFloodHeaderBytes, bytes.end());
  return f;
}

}  // namespace stmrta

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wsn::frame {

// Wire layout: 0x7E | length hi | length lo | frame data | checksum.
// The length field counts frame data bytes only. In escaped mode every byte
// after the start delimiter that collides with {0x7E, 0x7D, 0x11, 0x13} is
// sent as 0x7D followed by (byte XOR 0x20).
inline constexpr uint8_t kStartDelimiter = 0x7E;
inline constexpr uint8_t kEscapeMarker = 0x7D;
inline constexpr uint8_t kXon = 0x11;
inline constexpr uint8_t kXoff = 0x13;
inline constexpr uint8_t kEscapeXor = 0x20;

inline constexpr uint8_t kIoSampleFrameType = 0x92;
inline constexpr uint8_t kRemoteCommandFrameType = 0x17;

enum class FrameErrc {
  empty_frame,
  no_start_delimiter,
  truncated_frame,
  checksum_mismatch,
  wrong_frame_type,
  malformed_payload,
};

const char* to_string(FrameErrc errc);

class FrameError : public std::runtime_error {
 public:
  FrameError(FrameErrc errc, const std::string& detail);
  explicit FrameError(FrameErrc errc);

  FrameErrc errc() const { return errc_; }

 private:
  FrameErrc errc_;
};

struct ApiFrame {
  std::vector<uint8_t> frame_data;  // first byte is the frame type

  uint16_t length() const { return static_cast<uint16_t>(frame_data.size()); }
  uint8_t type() const { return frame_data.at(0); }
  uint8_t checksum() const;

  bool operator==(const ApiFrame&) const = default;
};

// Decoded I/O sample report. digital_samples is carried on the wire only
// when digital_mask is nonzero; analog_values holds one 10-bit reading per
// set analog_mask bit, ascending.
struct IoSample {
  uint64_t source_addr64 = 0;
  uint16_t source_addr16 = 0xFFFE;
  uint8_t recv_options = 0x01;
  uint8_t sample_count = 1;
  uint16_t digital_mask = 0;
  uint8_t analog_mask = 0;
  uint16_t digital_samples = 0;
  std::vector<uint16_t> analog_values;

  bool operator==(const IoSample&) const = default;
};

struct PollRequest {
  uint64_t dest_addr64 = 0;
  uint8_t frame_id = 0;  // 0 = no ack requested; otherwise cycles 1..255
  uint16_t dest_addr16 = 0xFFFE;
  uint8_t options = 0;

  bool operator==(const PollRequest&) const = default;
};

// 0xFF minus the byte sum of frame_data, reduced mod 256.
uint8_t compute_checksum(std::span<const uint8_t> frame_data);
bool verify_checksum(std::span<const uint8_t> frame_data, uint8_t checksum);

std::vector<uint8_t> encode_frame(const ApiFrame& frame, bool escaped);

// Encodes with an explicit checksum byte instead of recomputing it. Lets
// tests and fault injection put corrupted-but-well-formed frames on the wire.
std::vector<uint8_t> encode_frame_raw(std::span<const uint8_t> frame_data,
                                      uint8_t checksum, bool escaped);

// Decodes the first complete frame in bytes. Leading bytes before the start
// delimiter are skipped; trailing bytes are ignored. When consumed is
// non-null it receives the offset one past the decoded frame.
ApiFrame decode_frame(std::span<const uint8_t> bytes, bool escaped,
                      size_t* consumed = nullptr);

IoSample parse_io_sample(std::span<const uint8_t> frame_data,
                         uint8_t expected_type = kIoSampleFrameType);
std::vector<uint8_t> serialize_io_sample(const IoSample& sample,
                                         uint8_t frame_type = kIoSampleFrameType);

ApiFrame build_poll_request(const PollRequest& req,
                            uint8_t frame_type = kRemoteCommandFrameType);
PollRequest parse_poll_request(std::span<const uint8_t> frame_data,
                               uint8_t expected_type = kRemoteCommandFrameType);

std::string to_hex(std::span<const uint8_t> bytes);
std::vector<uint8_t> from_hex(std::string_view hex);

}  // namespace wsn::frame

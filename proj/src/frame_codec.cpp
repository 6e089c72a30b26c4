#include "wsn/frame_codec.hpp"

#include <bit>
#include <cctype>
#include <cstdio>

namespace wsn::frame {

namespace {

bool needs_escape(uint8_t b) {
  return b == kStartDelimiter || b == kEscapeMarker || b == kXon || b == kXoff;
}

void put_escaped(std::vector<uint8_t>& out, uint8_t b, bool escaped) {
  if (escaped && needs_escape(b)) {
    out.push_back(kEscapeMarker);
    out.push_back(static_cast<uint8_t>(b ^ kEscapeXor));
  } else {
    out.push_back(b);
  }
}

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v & 0xFF));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<uint8_t>((v >> shift) & 0xFF));
  }
}

// Reads bytes off the wire image, undoing escape pairs in escaped mode.
class WireReader {
 public:
  WireReader(std::span<const uint8_t> bytes, size_t pos, bool escaped)
      : bytes_(bytes), pos_(pos), escaped_(escaped) {}

  uint8_t next() {
    if (pos_ >= bytes_.size()) {
      throw FrameError(FrameErrc::truncated_frame, "unexpected end of input");
    }
    uint8_t b = bytes_[pos_++];
    if (escaped_ && b == kEscapeMarker) {
      if (pos_ >= bytes_.size()) {
        throw FrameError(FrameErrc::truncated_frame,
                         "escape marker at end of input");
      }
      b = static_cast<uint8_t>(bytes_[pos_++] ^ kEscapeXor);
    }
    return b;
  }

  size_t pos() const { return pos_; }

 private:
  std::span<const uint8_t> bytes_;
  size_t pos_;
  bool escaped_;
};

std::string hex_byte(uint8_t b) {
  char buf[3];
  std::snprintf(buf, sizeof buf, "%02X", b);
  return buf;
}

}  // namespace

const char* to_string(FrameErrc errc) {
  switch (errc) {
    case FrameErrc::empty_frame: return "empty-frame";
    case FrameErrc::no_start_delimiter: return "no-start-delimiter";
    case FrameErrc::truncated_frame: return "truncated-frame";
    case FrameErrc::checksum_mismatch: return "checksum-mismatch";
    case FrameErrc::wrong_frame_type: return "wrong-frame-type";
    case FrameErrc::malformed_payload: return "malformed-payload";
  }
  return "unknown";
}

FrameError::FrameError(FrameErrc errc, const std::string& detail)
    : std::runtime_error(std::string(to_string(errc)) +
                         (detail.empty() ? "" : " " + detail)),
      errc_(errc) {}

FrameError::FrameError(FrameErrc errc) : FrameError(errc, "") {}

uint8_t ApiFrame::checksum() const { return compute_checksum(frame_data); }

uint8_t compute_checksum(std::span<const uint8_t> frame_data) {
  if (frame_data.empty()) {
    throw FrameError(FrameErrc::empty_frame, "checksum of empty frame data");
  }
  unsigned sum = 0;
  for (uint8_t b : frame_data) sum += b;
  return static_cast<uint8_t>(0xFF - (sum & 0xFF));
}

bool verify_checksum(std::span<const uint8_t> frame_data, uint8_t checksum) {
  unsigned sum = checksum;
  for (uint8_t b : frame_data) sum += b;
  return (sum & 0xFF) == 0xFF;
}

std::vector<uint8_t> encode_frame(const ApiFrame& frame, bool escaped) {
  if (frame.frame_data.empty()) {
    throw FrameError(FrameErrc::empty_frame, "cannot encode empty frame data");
  }
  if (frame.frame_data.size() > 0xFFFF) {
    throw FrameError(FrameErrc::malformed_payload, "frame data exceeds 65535 bytes");
  }
  std::vector<uint8_t> out;
  out.reserve(frame.frame_data.size() + 8);
  out.push_back(kStartDelimiter);
  uint16_t len = frame.length();
  put_escaped(out, static_cast<uint8_t>(len >> 8), escaped);
  put_escaped(out, static_cast<uint8_t>(len & 0xFF), escaped);
  for (uint8_t b : frame.frame_data) put_escaped(out, b, escaped);
  put_escaped(out, frame.checksum(), escaped);
  return out;
}

std::vector<uint8_t> encode_frame_raw(std::span<const uint8_t> frame_data,
                                      uint8_t checksum, bool escaped) {
  std::vector<uint8_t> out;
  out.reserve(frame_data.size() + 8);
  out.push_back(kStartDelimiter);
  uint16_t len = static_cast<uint16_t>(frame_data.size());
  put_escaped(out, static_cast<uint8_t>(len >> 8), escaped);
  put_escaped(out, static_cast<uint8_t>(len & 0xFF), escaped);
  for (uint8_t b : frame_data) put_escaped(out, b, escaped);
  put_escaped(out, checksum, escaped);
  return out;
}

ApiFrame decode_frame(std::span<const uint8_t> bytes, bool escaped,
                      size_t* consumed) {
  size_t start = 0;
  while (start < bytes.size() && bytes[start] != kStartDelimiter) ++start;
  if (start >= bytes.size()) {
    throw FrameError(FrameErrc::no_start_delimiter);
  }
  WireReader in(bytes, start + 1, escaped);
  uint16_t len = static_cast<uint16_t>(in.next()) << 8;
  len |= in.next();
  if (len == 0) {
    throw FrameError(FrameErrc::empty_frame, "declared length 0");
  }
  ApiFrame frame;
  frame.frame_data.reserve(len);
  for (uint16_t i = 0; i < len; ++i) frame.frame_data.push_back(in.next());
  uint8_t found = in.next();
  uint8_t expected = compute_checksum(frame.frame_data);
  if (found != expected) {
    throw FrameError(FrameErrc::checksum_mismatch,
                     "expected=" + hex_byte(expected) + " found=" + hex_byte(found));
  }
  if (consumed != nullptr) *consumed = in.pos();
  return frame;
}

// Frame data layout:
// [type][addr64: 8 BE][addr16: 2 BE][recv options][sample count]
// [digital mask: 2 BE][analog mask][digital samples: 2 BE, only if
// digital mask != 0][analog values: 2 BE each]
IoSample parse_io_sample(std::span<const uint8_t> frame_data,
                         uint8_t expected_type) {
  if (frame_data.empty()) {
    throw FrameError(FrameErrc::malformed_payload, "empty frame data");
  }
  if (frame_data[0] != expected_type) {
    throw FrameError(FrameErrc::wrong_frame_type,
                     "expected=" + hex_byte(expected_type) +
                         " found=" + hex_byte(frame_data[0]));
  }
  constexpr size_t kHeader = 1 + 8 + 2 + 1 + 1 + 2 + 1;
  if (frame_data.size() < kHeader) {
    throw FrameError(FrameErrc::malformed_payload, "io sample header truncated");
  }
  IoSample s;
  size_t i = 1;
  s.source_addr64 = 0;
  for (int k = 0; k < 8; ++k) s.source_addr64 = (s.source_addr64 << 8) | frame_data[i++];
  s.source_addr16 = static_cast<uint16_t>((frame_data[i] << 8) | frame_data[i + 1]);
  i += 2;
  s.recv_options = frame_data[i++];
  s.sample_count = frame_data[i++];
  s.digital_mask = static_cast<uint16_t>((frame_data[i] << 8) | frame_data[i + 1]);
  i += 2;
  s.analog_mask = frame_data[i++];

  size_t expect = kHeader + (s.digital_mask != 0 ? 2 : 0) +
                  2 * static_cast<size_t>(std::popcount(s.analog_mask));
  if (frame_data.size() != expect) {
    throw FrameError(FrameErrc::malformed_payload,
                     "length does not match masks: expected " +
                         std::to_string(expect) + " bytes, got " +
                         std::to_string(frame_data.size()));
  }
  if (s.digital_mask != 0) {
    s.digital_samples = static_cast<uint16_t>((frame_data[i] << 8) | frame_data[i + 1]);
    i += 2;
  }
  for (int bit = 0; bit < 8; ++bit) {
    if (!(s.analog_mask & (1u << bit))) continue;
    uint16_t v = static_cast<uint16_t>((frame_data[i] << 8) | frame_data[i + 1]);
    i += 2;
    if (v > 1023) {
      throw FrameError(FrameErrc::malformed_payload,
                       "analog value exceeds 10 bits: " + std::to_string(v));
    }
    s.analog_values.push_back(v);
  }
  return s;
}

std::vector<uint8_t> serialize_io_sample(const IoSample& sample,
                                         uint8_t frame_type) {
  if (sample.analog_values.size() !=
      static_cast<size_t>(std::popcount(sample.analog_mask))) {
    throw FrameError(FrameErrc::malformed_payload,
                     "analog value count does not match analog mask");
  }
  for (uint16_t v : sample.analog_values) {
    if (v > 1023) {
      throw FrameError(FrameErrc::malformed_payload,
                       "analog value exceeds 10 bits: " + std::to_string(v));
    }
  }
  std::vector<uint8_t> out;
  out.push_back(frame_type);
  put_u64(out, sample.source_addr64);
  put_u16(out, sample.source_addr16);
  out.push_back(sample.recv_options);
  out.push_back(sample.sample_count);
  put_u16(out, sample.digital_mask);
  out.push_back(sample.analog_mask);
  if (sample.digital_mask != 0) put_u16(out, sample.digital_samples);
  for (uint16_t v : sample.analog_values) put_u16(out, v);
  return out;
}

// Frame data layout:
// [type][frame id][addr64: 8 BE][addr16: 2 BE, 0xFFFE if unknown][options]
// [command: "IS"]
ApiFrame build_poll_request(const PollRequest& req, uint8_t frame_type) {
  ApiFrame frame;
  frame.frame_data.push_back(frame_type);
  frame.frame_data.push_back(req.frame_id);
  put_u64(frame.frame_data, req.dest_addr64);
  uint16_t addr16 = req.dest_addr16 == 0xFFFF ? 0xFFFE : req.dest_addr16;
  put_u16(frame.frame_data, addr16);
  frame.frame_data.push_back(req.options);
  frame.frame_data.push_back('I');
  frame.frame_data.push_back('S');
  return frame;
}

PollRequest parse_poll_request(std::span<const uint8_t> frame_data,
                               uint8_t expected_type) {
  if (frame_data.empty()) {
    throw FrameError(FrameErrc::malformed_payload, "empty frame data");
  }
  if (frame_data[0] != expected_type) {
    throw FrameError(FrameErrc::wrong_frame_type,
                     "expected=" + hex_byte(expected_type) +
                         " found=" + hex_byte(frame_data[0]));
  }
  constexpr size_t kLen = 1 + 1 + 8 + 2 + 1 + 2;
  if (frame_data.size() != kLen) {
    throw FrameError(FrameErrc::malformed_payload, "bad poll request length");
  }
  if (frame_data[kLen - 2] != 'I' || frame_data[kLen - 1] != 'S') {
    throw FrameError(FrameErrc::malformed_payload, "missing IS command");
  }
  PollRequest req;
  req.frame_id = frame_data[1];
  req.dest_addr64 = 0;
  for (int k = 0; k < 8; ++k) req.dest_addr64 = (req.dest_addr64 << 8) | frame_data[2 + k];
  req.dest_addr16 = static_cast<uint16_t>((frame_data[10] << 8) | frame_data[11]);
  req.options = frame_data[12];
  return req;
}

std::string to_hex(std::span<const uint8_t> bytes) {
  static const char* digits = "0123456789ABCDEF";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

std::vector<uint8_t> from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::vector<uint8_t> out;
  int hi = -1;
  for (char c : hex) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    int n = nibble(c);
    if (n < 0) throw std::invalid_argument("invalid hex character");
    if (hi < 0) {
      hi = n;
    } else {
      out.push_back(static_cast<uint8_t>((hi << 4) | n));
      hi = -1;
    }
  }
  if (hi >= 0) throw std::invalid_argument("odd number of hex digits");
  return out;
}

}  // namespace wsn::frame

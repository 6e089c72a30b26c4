#include "wsn/frame_codec.hpp"

#include <random>

#include "doctest.h"

using namespace wsn::frame;

namespace {

std::vector<uint8_t> bytes(std::initializer_list<int> xs) {
  std::vector<uint8_t> out;
  for (int x : xs) out.push_back(static_cast<uint8_t>(x));
  return out;
}

// Escape-heavy generator so the escaped path gets real coverage.
ApiFrame random_frame(std::mt19937_64& rng) {
  std::uniform_int_distribution<size_t> len_dist(1, 80);
  std::uniform_int_distribution<int> byte_dist(0, 255);
  std::uniform_int_distribution<int> pick(0, 4);
  static const uint8_t specials[] = {0x7E, 0x7D, 0x11, 0x13};
  ApiFrame f;
  size_t len = len_dist(rng);
  f.frame_data.reserve(len);
  for (size_t i = 0; i < len; ++i) {
    if (pick(rng) == 0) {
      f.frame_data.push_back(specials[byte_dist(rng) % 4]);
    } else {
      f.frame_data.push_back(static_cast<uint8_t>(byte_dist(rng)));
    }
  }
  return f;
}

IoSample random_io_sample(std::mt19937_64& rng) {
  std::uniform_int_distribution<uint64_t> addr(0, ~uint64_t{0});
  std::uniform_int_distribution<int> byte_dist(0, 255);
  std::uniform_int_distribution<int> val(0, 1023);
  IoSample s;
  s.source_addr64 = addr(rng);
  s.source_addr16 = static_cast<uint16_t>(byte_dist(rng) << 8 | byte_dist(rng));
  s.recv_options = static_cast<uint8_t>(byte_dist(rng));
  s.sample_count = 1;
  s.digital_mask = (byte_dist(rng) % 2 == 0)
                       ? 0
                       : static_cast<uint16_t>(byte_dist(rng) << 8 | byte_dist(rng));
  s.analog_mask = static_cast<uint8_t>(byte_dist(rng));
  if (s.digital_mask != 0) {
    s.digital_samples = static_cast<uint16_t>(byte_dist(rng) << 8 | byte_dist(rng));
  }
  for (int bit = 0; bit < 8; ++bit) {
    if (s.analog_mask & (1u << bit)) {
      s.analog_values.push_back(static_cast<uint16_t>(val(rng)));
    }
  }
  return s;
}

}  // namespace

TEST_CASE("checksum examples") {
  CHECK(compute_checksum(bytes({0x00})) == 0xFF);
  CHECK(compute_checksum(bytes({0x92, 0x00})) == 0x6D);
  CHECK(compute_checksum(bytes({0xFF, 0x01})) == 0xFF);
  CHECK_THROWS_AS(compute_checksum({}), FrameError);
}

TEST_CASE("checksum verification") {
  CHECK(verify_checksum(bytes({0x00}), 0xFF));
  CHECK(verify_checksum(bytes({0x92, 0x00}), 0x6D));
  CHECK_FALSE(verify_checksum(bytes({0x92, 0x00}), 0x6E));
}

TEST_CASE("encode layout") {
  CHECK(encode_frame(ApiFrame{bytes({0x00})}, false) ==
        bytes({0x7E, 0x00, 0x01, 0x00, 0xFF}));
  // 0x7E escapes to 0x7D 0x5E; checksum 0xFF - 0x7E = 0x81
  CHECK(encode_frame(ApiFrame{bytes({0x7E})}, true) ==
        bytes({0x7E, 0x00, 0x01, 0x7D, 0x5E, 0x81}));
  CHECK_THROWS_AS(encode_frame(ApiFrame{}, false), FrameError);
}

TEST_CASE("decode examples and errors") {
  ApiFrame f = decode_frame(bytes({0x7E, 0x00, 0x01, 0x00, 0xFF}), false);
  CHECK(f.frame_data == bytes({0x00}));

  CHECK_THROWS_AS(decode_frame(bytes({0x7E, 0x00, 0x02, 0x00}), false), FrameError);
  try {
    decode_frame(bytes({0x7E, 0x00, 0x02, 0x00}), false);
  } catch (const FrameError& err) {
    CHECK(err.errc() == FrameErrc::truncated_frame);
  }

  try {
    decode_frame(bytes({0x7E, 0x00, 0x01, 0x00, 0x00}), false);
    FAIL("expected checksum mismatch");
  } catch (const FrameError& err) {
    CHECK(err.errc() == FrameErrc::checksum_mismatch);
    CHECK(std::string(err.what()) == "checksum-mismatch expected=FF found=00");
  }

  try {
    decode_frame(bytes({0x01, 0x02, 0x03}), false);
    FAIL("expected no start delimiter");
  } catch (const FrameError& err) {
    CHECK(err.errc() == FrameErrc::no_start_delimiter);
  }
}

TEST_CASE("decode skips leading noise") {
  ApiFrame f = decode_frame(bytes({0x42, 0x13, 0x7E, 0x00, 0x01, 0x00, 0xFF}), false);
  CHECK(f.frame_data == bytes({0x00}));
}

TEST_CASE("decode reports consumed offset") {
  size_t consumed = 0;
  auto wire = bytes({0x7E, 0x00, 0x01, 0x00, 0xFF, 0xAA, 0xBB});
  decode_frame(wire, false, &consumed);
  CHECK(consumed == 5);
}

TEST_CASE("roundtrip property, both escape modes") {
  std::mt19937_64 rng(0xC0DEC);
  for (int i = 0; i < 2000; ++i) {
    ApiFrame f = random_frame(rng);
    for (bool escaped : {false, true}) {
      auto wire = encode_frame(f, escaped);
      CHECK(decode_frame(wire, escaped) == f);
    }
  }
}

TEST_CASE("escaped wire never holds a raw control byte after the delimiter") {
  std::mt19937_64 rng(0x5CA9E);
  for (int i = 0; i < 500; ++i) {
    auto wire = encode_frame(random_frame(rng), true);
    for (size_t k = 1; k < wire.size(); ++k) {
      CHECK(wire[k] != kStartDelimiter);
      CHECK(wire[k] != kXon);
      CHECK(wire[k] != kXoff);
      if (wire[k] == kEscapeMarker) ++k;  // escape pair; next byte is data
    }
  }
}

TEST_CASE("single byte payload corruption always breaks the checksum") {
  std::mt19937_64 rng(0xBADF00D);
  std::uniform_int_distribution<int> flip(1, 255);
  for (int i = 0; i < 150; ++i) {
    ApiFrame f = random_frame(rng);
    uint8_t ck = compute_checksum(f.frame_data);
    CHECK(verify_checksum(f.frame_data, ck));
    for (size_t k = 0; k < f.frame_data.size(); ++k) {
      auto corrupted = f.frame_data;
      corrupted[k] ^= static_cast<uint8_t>(flip(rng));
      CHECK_FALSE(verify_checksum(corrupted, ck));
    }
  }
}

TEST_CASE("io sample parsing") {
  IoSample s;
  s.source_addr64 = 0x0013A200409C2679ULL;
  s.analog_mask = 0b00000011;
  s.analog_values = {512, 937};
  auto data = serialize_io_sample(s);
  IoSample parsed = parse_io_sample(data);
  CHECK(parsed.source_addr64 == 0x0013A200409C2679ULL);
  CHECK(parsed.analog_values == std::vector<uint16_t>{512, 937});
  CHECK(parsed == s);

  SUBCASE("no analog channels") {
    IoSample empty;
    empty.source_addr64 = 1;
    empty.analog_mask = 0;
    IoSample back = parse_io_sample(serialize_io_sample(empty));
    CHECK(back.analog_values.empty());
  }

  SUBCASE("mask promises a value that is missing") {
    auto raw = serialize_io_sample(IoSample{});  // no analog block
    raw[15] = 0b1;                               // analog mask offset
    CHECK_THROWS_AS(parse_io_sample(raw), FrameError);
  }

  SUBCASE("wrong frame type") {
    auto raw = serialize_io_sample(s);
    raw[0] = 0x17;
    try {
      parse_io_sample(raw);
      FAIL("expected wrong frame type");
    } catch (const FrameError& err) {
      CHECK(err.errc() == FrameErrc::wrong_frame_type);
    }
  }
}

TEST_CASE("io sample roundtrip property") {
  std::mt19937_64 rng(0x10541);
  for (int i = 0; i < 2000; ++i) {
    IoSample s = random_io_sample(rng);
    CHECK(parse_io_sample(serialize_io_sample(s)) == s);
  }
}

TEST_CASE("poll request construction") {
  PollRequest req;
  req.dest_addr64 = 0x0013A200409C2679ULL;
  req.frame_id = 1;
  ApiFrame f = build_poll_request(req);

  // recompute the checksum independently of compute_checksum
  unsigned sum = 0;
  for (uint8_t b : f.frame_data) sum += b;
  CHECK(((sum + f.checksum()) & 0xFF) == 0xFF);

  SUBCASE("frame id is the only payload difference") {
    PollRequest req2 = req;
    req2.frame_id = 2;
    ApiFrame g = build_poll_request(req2);
    REQUIRE(f.frame_data.size() == g.frame_data.size());
    size_t diffs = 0;
    size_t diff_at = 0;
    for (size_t i = 0; i < f.frame_data.size(); ++i) {
      if (f.frame_data[i] != g.frame_data[i]) {
        ++diffs;
        diff_at = i;
      }
    }
    CHECK(diffs == 1);
    CHECK(diff_at == 1);  // frame id byte
    CHECK(f.checksum() != g.checksum());
  }

  SUBCASE("unknown 16-bit address becomes the 0xFFFE placeholder") {
    PollRequest bcast = req;
    bcast.dest_addr16 = 0xFFFF;
    ApiFrame g = build_poll_request(bcast);
    CHECK(g.frame_data[10] == 0xFF);
    CHECK(g.frame_data[11] == 0xFE);
  }

  SUBCASE("parse inverts build") {
    PollRequest back = parse_poll_request(f.frame_data);
    CHECK(back.dest_addr64 == req.dest_addr64);
    CHECK(back.frame_id == 1);
  }
}

TEST_CASE("hex helpers") {
  CHECK(to_hex(bytes({0x7E, 0x00, 0x01})) == "7E0001");
  CHECK(from_hex("7e 00 01") == bytes({0x7E, 0x00, 0x01}));
  CHECK_THROWS_AS(from_hex("7"), std::invalid_argument);
  CHECK_THROWS_AS(from_hex("zz"), std::invalid_argument);
}

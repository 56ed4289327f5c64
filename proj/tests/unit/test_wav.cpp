#include <cstring>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "wavefield/error.hpp"
#include "wavefield/wav.hpp"

using namespace wavefield;

namespace {

template <typename T>
T read_le(const std::vector<std::uint8_t>& b, std::size_t at) {
  T v;
  std::memcpy(&v, b.data() + at, sizeof(T));
  return v;
}

std::string tag(const std::vector<std::uint8_t>& b, std::size_t at) {
  return {reinterpret_cast<const char*>(b.data() + at), 4};
}

RenderOutput random_output(std::size_t channels, std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> unit(-1.0f, 1.0f);
  RenderOutput out;
  out.channels.assign(channels, std::vector<double>(n));
  for (auto& ch : out.channels) {
    for (auto& v : ch) v = unit(rng);  // float-representable, so float32 round trips exactly
  }
  return out;
}

}  // namespace

TEST_CASE("float header arithmetic") {
  RenderOutput mono;
  mono.channels = {std::vector<double>(48000, 0.25)};
  const auto bytes = encode_wav(mono);
  REQUIRE(tag(bytes, 0) == "RIFF");
  CHECK(read_le<std::uint32_t>(bytes, 4) == bytes.size() - 8);
  CHECK(tag(bytes, 8) == "WAVE");

  // Walk the chunks like a generic reader would.
  std::size_t pos = 12;
  bool saw_fmt = false, saw_data = false;
  while (pos + 8 <= bytes.size()) {
    const std::string id = tag(bytes, pos);
    const auto size = read_le<std::uint32_t>(bytes, pos + 4);
    if (id == "fmt ") {
      saw_fmt = true;
      CHECK(read_le<std::uint16_t>(bytes, pos + 8) == 3);
      CHECK(read_le<std::uint16_t>(bytes, pos + 10) == 1);
      CHECK(read_le<std::uint32_t>(bytes, pos + 12) == 48000);
      CHECK(read_le<std::uint32_t>(bytes, pos + 16) == 48000 * 4);
      CHECK(read_le<std::uint16_t>(bytes, pos + 20) == 4);
      CHECK(read_le<std::uint16_t>(bytes, pos + 22) == 32);
    } else if (id == "data") {
      saw_data = true;
      CHECK(size == 48000 * 4);
      // 1.0 s = bytes / byte rate
      CHECK(size / (48000.0 * 4) == 1.0);
    }
    pos += 8 + size + (size & 1);
  }
  CHECK(pos == bytes.size());
  CHECK(saw_fmt);
  CHECK(saw_data);
}

TEST_CASE("round trips") {
  const auto out = random_output(4, 1001, 3);
  CHECK(decode_wav(encode_wav(out)).channels == out.channels);

  const auto pcm = decode_wav(encode_wav(out, WavFormat::Pcm16));
  REQUIRE(pcm.channels.size() == 4);
  for (std::size_t ch = 0; ch < 4; ++ch) {
    for (std::size_t n = 0; n < 1001; ++n) CHECK(std::abs(pcm.channels[ch][n] - out.channels[ch][n]) <= 2.0 / 32768.0);  // x32767 in, /32768 out
  }

  const auto path = (std::filesystem::temp_directory_path() / "wavefield_roundtrip.wav").string();
  write_wav(out, path);
  CHECK(read_wav(path).channels == out.channels);
  CHECK_THROWS_AS(read_mono_wav(path), InvalidArgument);
  std::filesystem::remove(path);
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(decode_wav({}), ParseError);
  auto bytes = encode_wav(random_output(1, 10, 1));
  bytes[8] = 'X';
  CHECK_THROWS_AS(decode_wav(bytes), ParseError);
  CHECK_THROWS_AS(read_wav("/nonexistent/file.wav"), Error);
  CHECK_THROWS_AS(write_wav(random_output(1, 10, 1), "/nonexistent/dir/x.wav"), IoError);
}

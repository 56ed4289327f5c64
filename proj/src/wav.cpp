#include "wavefield/wav.hpp"

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "wavefield/error.hpp"

namespace wavefield {

namespace {

static_assert(std::endian::native == std::endian::little, "WAV codec assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
void put(std::vector<std::uint8_t>& buf, T value) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
  buf.insert(buf.end(), p, p + sizeof(T));
}

void put_tag(std::vector<std::uint8_t>& buf, const char (&tag)[5]) { buf.insert(buf.end(), tag, tag + 4); }

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  template <typename T>
  T get(std::size_t offset) const {
    if (offset + sizeof(T) > bytes_.size()) throw ParseError("WAV data truncated", 0);
    T value;
    std::memcpy(&value, bytes_.data() + offset, sizeof(T));
    return value;
  }

  bool tag_at(std::size_t offset, const char* tag) const {
    return offset + 4 <= bytes_.size() && std::memcmp(bytes_.data() + offset, tag, 4) == 0;
  }

  std::size_t size() const { return bytes_.size(); }
  const std::uint8_t* data() const { return bytes_.data(); }

 private:
  const std::vector<std::uint8_t>& bytes_;
};

}  // namespace

std::vector<std::uint8_t> encode_wav(const RenderOutput& out, WavFormat format) {
  if (out.channels.empty()) throw InvalidArgument("cannot write a WAV file without channels");
  const std::size_t n_frames = out.n_samples();
  for (const auto& ch : out.channels) {
    if (ch.size() != n_frames) throw InvalidArgument("all channels must have the same length");
  }
  const auto n_channels = static_cast<std::uint16_t>(out.channels.size());
  const std::uint16_t bytes_per_sample = format == WavFormat::Float32 ? 4 : 2;
  const auto rate = static_cast<std::uint32_t>(std::lround(out.sample_rate));
  const std::uint64_t data_bytes = static_cast<std::uint64_t>(n_frames) * n_channels * bytes_per_sample;
  if (data_bytes > 0xFFFFFFFFull - 64) throw InvalidArgument("render too large for a RIFF file");

  std::vector<std::uint8_t> buf;
  buf.reserve(static_cast<std::size_t>(data_bytes) + 64);
  const bool is_float = format == WavFormat::Float32;
  // Float data needs the fact chunk (and cbSize) to be standard-conforming.
  const std::uint32_t fmt_size = is_float ? 18 : 16;
  const std::uint32_t fact_bytes = is_float ? 12 : 0;
  put_tag(buf, "RIFF");
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(4 + (8 + fmt_size) + fact_bytes + 8 + data_bytes));
  put_tag(buf, "WAVE");
  put_tag(buf, "fmt ");
  put<std::uint32_t>(buf, fmt_size);
  put<std::uint16_t>(buf, is_float ? kFormatFloat : kFormatPcm);
  put<std::uint16_t>(buf, n_channels);
  put<std::uint32_t>(buf, rate);
  put<std::uint32_t>(buf, rate * n_channels * bytes_per_sample);
  put<std::uint16_t>(buf, static_cast<std::uint16_t>(n_channels * bytes_per_sample));
  put<std::uint16_t>(buf, static_cast<std::uint16_t>(bytes_per_sample * 8));
  if (is_float) {
    put<std::uint16_t>(buf, 0);
    put_tag(buf, "fact");
    put<std::uint32_t>(buf, 4);
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(n_frames));
  }
  put_tag(buf, "data");
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(data_bytes));
  for (std::size_t i = 0; i < n_frames; ++i) {
    for (const auto& ch : out.channels) {
      if (is_float) {
        put<float>(buf, static_cast<float>(ch[i]));
      } else {
        const double clipped = std::clamp(ch[i], -1.0, 1.0);
        put<std::int16_t>(buf, static_cast<std::int16_t>(std::lround(clipped * 32767.0)));
      }
    }
  }
  return buf;
}

RenderOutput decode_wav(const std::vector<std::uint8_t>& bytes) {
  const Reader r(bytes);
  if (!r.tag_at(0, "RIFF") || !r.tag_at(8, "WAVE")) throw ParseError("not a RIFF/WAVE file", 0);

  std::uint16_t format = 0;
  std::uint16_t n_channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  bool have_fmt = false;
  std::size_t data_offset = 0;
  std::size_t data_size = 0;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= r.size()) {
    const auto chunk_size = r.get<std::uint32_t>(pos + 4);
    const std::size_t body = pos + 8;
    if (r.tag_at(pos, "fmt ")) {
      if (chunk_size < 16) throw ParseError("fmt chunk too short", 0);
      format = r.get<std::uint16_t>(body);
      n_channels = r.get<std::uint16_t>(body + 2);
      rate = r.get<std::uint32_t>(body + 4);
      bits = r.get<std::uint16_t>(body + 14);
      if (format == kFormatExtensible) {
        if (chunk_size < 40) throw ParseError("extensible fmt chunk too short", 0);
        format = r.get<std::uint16_t>(body + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (r.tag_at(pos, "data")) {
      data_offset = body;
      data_size = std::min<std::size_t>(chunk_size, r.size() - body);
      have_data = true;
      break;
    }
    pos = body + chunk_size + (chunk_size & 1u);
  }
  if (!have_fmt) throw ParseError("missing fmt chunk", 0);
  if (!have_data) throw ParseError("missing data chunk", 0);
  if (n_channels == 0) throw ParseError("WAV file declares zero channels", 0);
  if (rate == 0) throw ParseError("WAV file declares a zero sample rate", 0);

  const bool supported = (format == kFormatPcm && (bits == 16 || bits == 24 || bits == 32)) ||
                         (format == kFormatFloat && (bits == 32 || bits == 64));
  if (!supported) {
    throw ParseError("unsupported WAV encoding (format " + std::to_string(format) + ", " + std::to_string(bits) +
                         " bits)",
                     0);
  }
  const std::size_t sample_bytes = bits / 8;
  const std::size_t frame_bytes = sample_bytes * n_channels;
  const std::size_t n_frames = data_size / frame_bytes;

  RenderOutput out;
  out.sample_rate = rate;
  out.channels.assign(n_channels, std::vector<double>(n_frames));
  const std::uint8_t* p = r.data() + data_offset;
  for (std::size_t i = 0; i < n_frames; ++i) {
    for (std::size_t ch = 0; ch < n_channels; ++ch, p += sample_bytes) {
      double v = 0.0;
      if (format == kFormatFloat && bits == 32) {
        float f;
        std::memcpy(&f, p, 4);
        v = f;
      } else if (format == kFormatFloat) {
        std::memcpy(&v, p, 8);
      } else if (bits == 16) {
        std::int16_t s;
        std::memcpy(&s, p, 2);
        v = s / 32768.0;
      } else if (bits == 24) {
        std::int32_t s = static_cast<std::int32_t>(static_cast<std::uint32_t>(p[0]) << 8 |
                                                   static_cast<std::uint32_t>(p[1]) << 16 |
                                                   static_cast<std::uint32_t>(p[2]) << 24) >>
                         8;
        v = s / 8388608.0;
      } else {
        std::int32_t s;
        std::memcpy(&s, p, 4);
        v = s / 2147483648.0;
      }
      out.channels[ch][i] = v;
    }
  }
  return out;
}

void write_wav(const RenderOutput& out, const std::string& destination, WavFormat format) {
  const auto bytes = encode_wav(out, format);
  std::ofstream file(destination, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write '" + destination + "': " + std::strerror(errno));
  file.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  file.close();
  if (!file) throw IoError("failed writing '" + destination + "': " + std::strerror(errno));
}

RenderOutput read_wav(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "': " + std::strerror(errno));
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes);
  } catch (const ParseError& e) {
    throw ParseError(e.message(), 0, path);
  }
}

RenderOutput read_mono_wav(const std::string& path) {
  RenderOutput wav = read_wav(path);
  if (wav.channels.size() != 1) {
    throw InvalidArgument("'" + path + "' has " + std::to_string(wav.channels.size()) +
                          " channels; source files must be mono");
  }
  if (wav.channels.front().empty()) throw InvalidArgument("'" + path + "' contains no samples");
  return wav;
}

}  // namespace wavefield

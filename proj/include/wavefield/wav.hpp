#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wavefield/array.hpp"

namespace wavefield {

enum class WavFormat {
  Float32,  // IEEE float, format tag 3
  Pcm16,    // round(x * 32767), clipped to [-1, 1], no dither
};

/// RIFF/WAVE bytes with interleaved samples, channel order = microphone order.
std::vector<std::uint8_t> encode_wav(const RenderOutput& out, WavFormat format = WavFormat::Float32);

/// Accepts PCM 16/24/32-bit integer and 32/64-bit float, plain or WAVE_FORMAT_EXTENSIBLE.
/// Integer PCM is scaled to [-1, 1). Throws ParseError on malformed data.
RenderOutput decode_wav(const std::vector<std::uint8_t>& bytes);

/// Throws IoError naming the destination and the cause.
void write_wav(const RenderOutput& out, const std::string& destination, WavFormat format = WavFormat::Float32);
RenderOutput read_wav(const std::string& path);

/// Reads a single-channel file; multichannel files are rejected with InvalidArgument.
RenderOutput read_mono_wav(const std::string& path);

}  // namespace wavefield

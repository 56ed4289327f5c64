#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "wavefield/kinematics.hpp"

namespace wavefield {

struct Sine {
  double frequency_hz = 1000.0;
  double amplitude = 1.0;
  double phase_rad = 0.0;
};

/// Uniform white noise in [-amplitude, amplitude], held constant over each
/// noise sample. Values are a pure function of (seed, sample index), so any
/// emission time can be evaluated in any order from any thread.
struct WhiteNoise {
  std::uint64_t seed = 0;
  double amplitude = 1.0;
  double rate_hz = 48000.0;
};

struct FileSignal {
  std::shared_ptr<const std::vector<double>> samples;
  double sample_rate_hz = 48000.0;
  double amplitude = 1.0;
  /// Where the samples came from and the rate they were resampled to at load
  /// (0 = none), kept so scenes can be written back out.
  std::string origin;
  double resampled_to = 0.0;
};

using SignalKind = std::variant<Sine, WhiteNoise, FileSignal>;

/// Throws InvalidArgument if the generator parameters are out of range.
void check_signal(const SignalKind& kind);

struct Source {
  SignalKind kind = Sine{};
  Trajectory trajectory = Trajectory::stationary(Vec3::Zero());
  double start_time = 0.0;
  /// Distance at which the signal amplitude is the one emitted (r0 of the spreading law).
  double reference_distance_m = 1.0;
  double gain = 1.0;
};

/// Throws InvalidArgument if any source invariant fails.
void check_source(const Source& src);

/// Signal value at emission time t_e. Silent before `start_time` and, for file
/// signals, after the last sample. Noise is the band-limited (windowed-sinc)
/// reconstruction of its sequence, so it equals noise_value on the grid and
/// supports fractional propagation delays between grid points.
double sample_at(const Source& src, double t_e);

/// Counter-based generator: deterministic uniform value in [-1, 1] for (seed, index).
double noise_value(std::uint64_t seed, std::int64_t index);

/// Kaiser-windowed sinc resampling (8 zero crossings each side of the kernel).
/// Output length is ceil(len * to_rate / from_rate).
std::vector<double> resample_file(const std::vector<double>& samples, double from_rate, double to_rate);

/// Mixes a per-source index into a global seed so sources get independent streams.
std::uint64_t derive_seed(std::uint64_t global_seed, std::uint64_t index);

}  // namespace wavefield

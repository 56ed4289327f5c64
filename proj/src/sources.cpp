#include "wavefield/sources.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "wavefield/error.hpp"

namespace wavefield {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Zeroth-order modified Bessel function of the first kind, power series.
double bessel_i0(double x) {
  double sum = 1.0;
  double term = 1.0;
  const double q = 0.25 * x * x;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

// Index rounding guard: emission times computed as n/fs - delay land a few ulp
// below the grid point they denote.
constexpr double kGridGuard = 1e-7;

}  // namespace

void check_signal(const SignalKind& kind) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sine>) {
          if (!(s.frequency_hz > 0.0 && std::isfinite(s.frequency_hz)))
            throw InvalidArgument("sine frequency must be positive");
          if (!(s.amplitude >= 0.0 && std::isfinite(s.amplitude)))
            throw InvalidArgument("amplitude must be non-negative");
          if (!std::isfinite(s.phase_rad)) throw InvalidArgument("sine phase must be finite");
        } else if constexpr (std::is_same_v<T, WhiteNoise>) {
          if (!(s.amplitude >= 0.0 && std::isfinite(s.amplitude)))
            throw InvalidArgument("amplitude must be non-negative");
          if (!(s.rate_hz > 0.0 && std::isfinite(s.rate_hz))) throw InvalidArgument("noise rate must be positive");
        } else {
          if (!s.samples || s.samples->empty()) throw InvalidArgument("file signal has no samples");
          if (!(s.sample_rate_hz > 0.0 && std::isfinite(s.sample_rate_hz)))
            throw InvalidArgument("file signal sample rate must be positive");
          if (!(s.amplitude >= 0.0 && std::isfinite(s.amplitude)))
            throw InvalidArgument("amplitude must be non-negative");
        }
      },
      kind);
}

void check_source(const Source& src) {
  check_signal(src.kind);
  if (!std::isfinite(src.start_time)) throw InvalidArgument("source start time must be finite");
  if (!(src.reference_distance_m > 0.0 && std::isfinite(src.reference_distance_m)))
    throw InvalidArgument("reference distance must be positive");
  if (!(src.gain >= 0.0 && std::isfinite(src.gain))) throw InvalidArgument("source gain must be non-negative");
}

double noise_value(std::uint64_t seed, std::int64_t index) {
  const std::uint64_t bits = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index)));
  // 53 random bits -> [0, 1) -> [-1, 1)
  const double unit = static_cast<double>(bits >> 11) * 0x1.0p-53;
  return 2.0 * unit - 1.0;
}

namespace {

// Kaiser window over |r| <= 1, tabulated once and read with linear interpolation.
constexpr int kNoiseHalfTaps = 16;
constexpr double kNoiseBeta = 8.0;
constexpr std::size_t kWindowTable = 4096;

const std::array<double, kWindowTable + 2>& kaiser_table() {
  static const auto table = [] {
    std::array<double, kWindowTable + 2> t{};
    const double norm = bessel_i0(kNoiseBeta);
    for (std::size_t i = 0; i <= kWindowTable; ++i) {
      const double r = static_cast<double>(i) / kWindowTable;
      t[i] = bessel_i0(kNoiseBeta * std::sqrt(std::max(0.0, 1.0 - r * r))) / norm;
    }
    t[kWindowTable + 1] = 0.0;
    return t;
  }();
  return table;
}

double kaiser(double r) {
  const auto& t = kaiser_table();
  const double pos = std::abs(r) * kWindowTable;
  const auto i = static_cast<std::size_t>(pos);
  if (i >= kWindowTable) return 0.0;
  const double frac = pos - static_cast<double>(i);
  return t[i] + (t[i + 1] - t[i]) * frac;
}

// Band-limited reconstruction of the noise sequence at fractional index pos.
// Grid points return the sequence value itself; indices before 0 are silent.
double noise_bandlimited(std::uint64_t seed, double pos) {
  const double nearest = std::round(pos);
  if (std::abs(pos - nearest) < kGridGuard) {
    const auto n = static_cast<std::int64_t>(nearest);
    return n < 0 ? 0.0 : noise_value(seed, n);
  }
  const double base = std::floor(pos);
  const double frac = pos - base;
  const auto b = static_cast<std::int64_t>(base);
  const double s = std::sin(std::numbers::pi * frac) / std::numbers::pi;
  double acc = 0.0;
  for (int j = -kNoiseHalfTaps + 1; j <= kNoiseHalfTaps; ++j) {
    const std::int64_t k = b + j;
    if (k < 0) continue;
    const double d = frac - j;
    // sin(pi d) = (-1)^j sin(pi frac)
    const double sn = (j & 1) ? -s : s;
    acc += noise_value(seed, k) * (sn / d) * kaiser(d / kNoiseHalfTaps);
  }
  return acc;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t global_seed, std::uint64_t index) {
  return splitmix64(global_seed + splitmix64(index + 0x5851F42D4C957F2Dull));
}

double sample_at(const Source& src, double t_e) {
  const double local = t_e - src.start_time;
  if (local < 0.0) return 0.0;
  return std::visit(
      [local](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sine>) {
          return s.amplitude * std::sin(2.0 * std::numbers::pi * s.frequency_hz * local + s.phase_rad);
        } else if constexpr (std::is_same_v<T, WhiteNoise>) {
          return s.amplitude * noise_bandlimited(s.seed, local * s.rate_hz);
        } else {
          const auto& x = *s.samples;
          const double pos = local * s.sample_rate_hz;
          const double base = std::floor(pos);
          const auto i = static_cast<std::size_t>(base);
          if (base >= static_cast<double>(x.size())) return 0.0;
          const double frac = pos - base;
          const double next = i + 1 < x.size() ? x[i + 1] : 0.0;
          return s.amplitude * (x[i] + (next - x[i]) * frac);
        }
      },
      src.kind);
}

std::vector<double> resample_file(const std::vector<double>& samples, double from_rate, double to_rate) {
  if (samples.empty()) throw InvalidArgument("cannot resample an empty signal");
  if (!(from_rate > 0.0 && to_rate > 0.0)) throw InvalidArgument("resampling rates must be positive");
  if (from_rate == to_rate) return samples;

  constexpr int kZeroCrossings = 8;
  constexpr double kBeta = 8.0;
  const double ratio = to_rate / from_rate;
  const double cutoff = std::min(1.0, ratio);  // relative to the input Nyquist
  const double half_width = kZeroCrossings / cutoff;  // in input samples
  const double window_norm = bessel_i0(kBeta);

  const auto out_len = static_cast<std::size_t>(std::ceil(static_cast<double>(samples.size()) * ratio));
  const auto n_in = static_cast<std::ptrdiff_t>(samples.size());
  std::vector<double> out(out_len);
  for (std::size_t m = 0; m < out_len; ++m) {
    const double x = static_cast<double>(m) / ratio;
    const auto first = static_cast<std::ptrdiff_t>(std::ceil(x - half_width));
    const auto last = static_cast<std::ptrdiff_t>(std::floor(x + half_width));
    double acc = 0.0;
    double weight_sum = 0.0;
    for (std::ptrdiff_t k = first; k <= last; ++k) {
      const double d = x - static_cast<double>(k);
      const double r = d / half_width;
      if (std::abs(r) >= 1.0) continue;
      const double w = cutoff * sinc(cutoff * d) * bessel_i0(kBeta * std::sqrt(1.0 - r * r)) / window_norm;
      weight_sum += w;
      if (k >= 0 && k < n_in) acc += w * samples[static_cast<std::size_t>(k)];
    }
    // Normalizing by the full kernel sum keeps DC exact; edges still see the zero padding.
    out[m] = weight_sum != 0.0 ? acc / weight_sum : 0.0;
  }
  return out;
}

}  // namespace wavefield

#include <cmath>
#include <numbers>
#include <thread>

#include "doctest.h"
#include "test_helpers.hpp"
#include "wavefield/error.hpp"
#include "wavefield/sources.hpp"

using namespace wavefield;
using doctest::Approx;

TEST_CASE("sine") {
  Source src;
  src.kind = Sine{2000.0, 0.7, 0.4};
  src.start_time = 1.25;
  CHECK(sample_at(src, 1.25) == Approx(0.7 * std::sin(0.4)));
  CHECK(sample_at(src, 1.0) == 0.0);
  // Periodic in 1/f.
  for (double t : {1.3, 1.7, 2.2}) CHECK(sample_at(src, t + 0.0005) == Approx(sample_at(src, t)).epsilon(1e-9));
}

TEST_CASE("file signal interpolation") {
  Source src;
  src.kind = FileSignal{std::make_shared<const std::vector<double>>(std::vector<double>{0.0, 1.0}), 1.0, 1.0, "", 0.0};
  CHECK(sample_at(src, 0.25) == Approx(0.25));
  CHECK(sample_at(src, -0.1) == 0.0);
  CHECK(sample_at(src, 5.0) == 0.0);
}

TEST_CASE("white noise is a pure function of seed and time") {
  Source src;
  src.kind = WhiteNoise{1234, 1.0, 48000.0};
  std::vector<double> a(20000), b(20000);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = sample_at(src, static_cast<double>(i) / 48000.0);
  std::jthread other([&] {
    for (std::size_t i = b.size(); i-- > 0;) b[i] = sample_at(src, static_cast<double>(i) / 48000.0);
  });
  other.join();
  CHECK(a == b);

  double mean = 0.0, power = 0.0, lo = 1.0, hi = -1.0;
  for (double v : a) {
    mean += v;
    power += v * v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  mean /= static_cast<double>(a.size());
  power /= static_cast<double>(a.size());
  CHECK(std::abs(mean) < 0.02);
  CHECK(power == Approx(1.0 / 3.0).epsilon(0.03));
  CHECK(lo >= -1.0);
  CHECK(hi <= 1.0);

  Source other_seed = src;
  std::get<WhiteNoise>(other_seed.kind).seed = 1235;
  int equal = 0;
  for (int i = 0; i < 1000; ++i) equal += sample_at(other_seed, i / 48000.0) == sample_at(src, i / 48000.0);
  CHECK(equal < 5);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("noise between grid points is the windowed-sinc reconstruction") {
  Source src;
  src.kind = WhiteNoise{77, 0.5, 1000.0};
  for (int n = 0; n < 50; ++n) CHECK(sample_at(src, n / 1000.0) == 0.5 * noise_value(77, n));

  // Direct summation with the window computed from scratch.
  auto oracle = [](double pos) {
    const double beta = 8.0;
    double acc = 0.0;
    for (long k = static_cast<long>(std::floor(pos)) - 20; k <= static_cast<long>(std::floor(pos)) + 20; ++k) {
      if (k < 0) continue;
      const double d = pos - static_cast<double>(k);
      const double r = d / 16.0;
      if (std::abs(r) >= 1.0) continue;
      const double w = std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - r * r)) / std::cyl_bessel_i(0.0, beta);
      acc += noise_value(77, k) * std::sin(std::numbers::pi * d) / (std::numbers::pi * d) * w;
    }
    return 0.5 * acc;
  };
  for (double pos : {0.5, 3.25, 17.9, 40.01, 123.456}) {
    CHECK(sample_at(src, pos / 1000.0) == Approx(oracle(pos)).epsilon(1e-6));
  }

  // A half-sample shift keeps the power of a flat spectrum up to the filter's edge.
  double p_grid = 0.0, p_half = 0.0;
  for (int n = 100; n < 20100; ++n) {
    p_grid += std::pow(sample_at(src, n / 1000.0), 2);
    p_half += std::pow(sample_at(src, (n + 0.5) / 1000.0), 2);
  }
  CHECK(p_half / p_grid == Approx(1.0).epsilon(0.08));
}

TEST_CASE("source invariants") {
  Source src;
  src.kind = Sine{-5.0, 1.0, 0.0};
  CHECK_THROWS_AS(check_source(src), InvalidArgument);
  src.kind = Sine{100.0, 1.0, 0.0};
  src.reference_distance_m = 0.0;
  CHECK_THROWS_AS(check_source(src), InvalidArgument);
  src.reference_distance_m = 1.0;
  src.gain = -1.0;
  CHECK_THROWS_AS(check_source(src), InvalidArgument);
  src.gain = 1.0;
  CHECK_NOTHROW(check_source(src));
  src.kind = FileSignal{};
  CHECK_THROWS_AS(check_source(src), InvalidArgument);
}

TEST_CASE("resampling") {
  std::vector<double> tone(4800);
  for (std::size_t i = 0; i < tone.size(); ++i) tone[i] = std::sin(2.0 * std::numbers::pi * 1000.0 * i / 48000.0);
  CHECK(resample_file(tone, 48000.0, 48000.0) == tone);

  const auto up = resample_file(tone, 48000.0, 96000.0);
  CHECK(up.size() == 9600);
  const std::size_t nfft = 16384;
  const double bin = 96000.0 / static_cast<double>(nfft);
  CHECK(std::abs(testing::dominant_frequency(up, 96000.0, nfft) - 1000.0) <= bin);

  const std::vector<double> ones(1000, 1.0);
  for (double to : {22050.0, 44100.0, 96000.0}) {
    const auto r = resample_file(ones, 48000.0, to);
    for (std::size_t i = r.size() / 4; i < 3 * r.size() / 4; ++i) CHECK(std::abs(r[i] - 1.0) < 1e-3);
  }
  CHECK_THROWS_AS(resample_file({}, 48000.0, 44100.0), InvalidArgument);
}

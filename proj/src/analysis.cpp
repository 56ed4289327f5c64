#include "wavefield/analysis.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

#include "wavefield/error.hpp"

namespace wavefield {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_complex(n / 2 + 1);
    const std::lock_guard lock(planner_mutex());
    forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), out_, in_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      const std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(forward_);
      fftw_destroy_plan(inverse_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::span<double> time() { return {in_, n_}; }
  std::span<std::complex<double>> spectrum() {
    return {reinterpret_cast<std::complex<double>*>(out_), n_ / 2 + 1};
  }
  void forward() { fftw_execute(forward_); }
  /// Unnormalized: result is n times the true inverse.
  void inverse() { fftw_execute(inverse_); }

 private:
  std::size_t n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

std::vector<double> hann(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return w;
}

SpectralFrame magnitude_frame(RealFft& fft, std::span<const double> samples, const std::vector<double>& window,
                              double sample_rate) {
  const std::size_t n = samples.size();
  auto in = fft.time();
  double window_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    in[i] = samples[i] * window[i];
    window_sum += window[i];
  }
  fft.forward();
  const auto spec = fft.spectrum();
  SpectralFrame frame;
  frame.frequencies.resize(spec.size());
  frame.magnitudes_db.resize(spec.size());
  const double scale = window_sum > 0.0 ? 2.0 / window_sum : 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    frame.frequencies[k] = static_cast<double>(k) * sample_rate / static_cast<double>(n);
    const double mag = std::abs(spec[k]) * scale;
    frame.magnitudes_db[k] = mag > 0.0 ? std::max(kMagnitudeFloorDb, 20.0 * std::log10(mag)) : kMagnitudeFloorDb;
  }
  return frame;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

SpectralFrame fft_magnitude(std::span<const double> samples, double sample_rate) {
  if (samples.empty()) throw InvalidArgument("cannot take the spectrum of an empty signal");
  RealFft fft(samples.size());
  SpectralFrame frame = magnitude_frame(fft, samples, hann(samples.size()), sample_rate);
  frame.time = 0.5 * static_cast<double>(samples.size()) / sample_rate;
  return frame;
}

std::vector<SpectralFrame> spectrogram(std::span<const double> samples, double sample_rate, std::size_t window_len,
                                       std::size_t hop) {
  if (hop < 1 || window_len < hop) throw InvalidArgument("spectrogram needs window_len >= hop >= 1");
  std::vector<SpectralFrame> frames;
  if (samples.size() < window_len) return frames;
  RealFft fft(window_len);
  const auto window = hann(window_len);
  for (std::size_t start = 0; start + window_len <= samples.size(); start += hop) {
    SpectralFrame frame = magnitude_frame(fft, samples.subspan(start, window_len), window, sample_rate);
    frame.time = (static_cast<double>(start) + 0.5 * static_cast<double>(window_len)) / sample_rate;
    frames.push_back(std::move(frame));
  }
  return frames;
}

double peak_frequency(const SpectralFrame& frame) {
  const auto& m = frame.magnitudes_db;
  if (m.empty()) throw InvalidArgument("empty spectral frame");
  const auto k = static_cast<std::size_t>(std::max_element(m.begin(), m.end()) - m.begin());
  if (k == 0 || k + 1 >= m.size()) return frame.frequencies[k];
  const double denom = m[k - 1] - 2.0 * m[k] + m[k + 1];
  const double delta = denom != 0.0 ? 0.5 * (m[k - 1] - m[k + 1]) / denom : 0.0;
  const double bin = frame.frequencies[1] - frame.frequencies[0];
  return frame.frequencies[k] + delta * bin;
}

double gcc_phat_tdoa(std::span<const double> a, std::span<const double> b, double sample_rate, double max_delay) {
  if (a.size() != b.size()) throw InvalidArgument("GCC-PHAT needs equal-length channels");
  if (a.empty()) throw InvalidArgument("GCC-PHAT needs non-empty channels");
  if (!(max_delay * sample_rate >= 1.0)) throw InvalidArgument("max_delay must cover at least one sample");
  const auto all_zero = [](std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; });
  };
  if (all_zero(a) || all_zero(b)) throw InvalidArgument("GCC-PHAT on an all-zero channel is undefined");

  const std::size_t n = a.size();
  const std::size_t nfft = next_pow2(2 * n);
  RealFft fa(nfft);
  RealFft fb(nfft);
  std::fill(fa.time().begin(), fa.time().end(), 0.0);
  std::fill(fb.time().begin(), fb.time().end(), 0.0);
  std::copy(a.begin(), a.end(), fa.time().begin());
  std::copy(b.begin(), b.end(), fb.time().begin());
  fa.forward();
  fb.forward();

  auto cross = fa.spectrum();
  const auto sb = fb.spectrum();
  double peak_mag = 0.0;
  for (std::size_t k = 0; k < cross.size(); ++k) {
    cross[k] *= std::conj(sb[k]);
    peak_mag = std::max(peak_mag, std::abs(cross[k]));
  }
  const double floor = 1e-12 * peak_mag;
  for (auto& g : cross) {
    const double mag = std::abs(g);
    g = mag > floor ? g / mag : std::complex<double>(0.0, 0.0);
  }
  fa.inverse();
  const auto r = fa.time();

  const auto max_lag = static_cast<std::ptrdiff_t>(
      std::min<double>(std::floor(max_delay * sample_rate), static_cast<double>(n - 1)));
  const auto at = [&](std::ptrdiff_t lag) {
    return r[static_cast<std::size_t>(lag >= 0 ? lag : static_cast<std::ptrdiff_t>(nfft) + lag)];
  };
  std::ptrdiff_t best = 0;
  for (std::ptrdiff_t lag = -max_lag; lag <= max_lag; ++lag) {
    if (at(lag) > at(best)) best = lag;
  }
  double refined = static_cast<double>(best);
  if (best > -max_lag && best < max_lag) {
    const double ym = at(best - 1);
    const double y0 = at(best);
    const double yp = at(best + 1);
    const double denom = ym - 2.0 * y0 + yp;
    if (denom < 0.0) refined += 0.5 * (ym - yp) / denom;
  }
  const double delay = refined / sample_rate;
  return std::clamp(delay, -max_delay, max_delay);
}

double doa_azimuth(const RenderOutput& out, const std::vector<Vec3>& offsets, std::size_t frame_start,
                   std::size_t frame_len, double c) {
  const std::size_t n_mics = offsets.size();
  if (n_mics < 3) throw InvalidArgument("DOA needs at least 3 microphones");
  if (out.channels.size() != n_mics) throw InvalidArgument("channel count does not match the offsets");
  if (frame_len == 0 || frame_start + frame_len > out.n_samples()) {
    throw InvalidArgument("DOA frame lies outside the recording");
  }

  const std::size_t n_pairs = n_mics * (n_mics - 1) / 2;
  Eigen::MatrixXd geometry(n_pairs, 2);
  Eigen::VectorXd path_difference(n_pairs);
  std::size_t row = 0;
  for (std::size_t i = 0; i < n_mics; ++i) {
    for (std::size_t j = i + 1; j < n_mics; ++j, ++row) {
      const Vec3 baseline = offsets[i] - offsets[j];
      // One extra sample of slack so the clamp never bites on a physical delay.
      const double max_delay = baseline.norm() / c + 1.0 / out.sample_rate;
      const auto a = std::span<const double>(out.channels[i]).subspan(frame_start, frame_len);
      const auto b = std::span<const double>(out.channels[j]).subspan(frame_start, frame_len);
      const double tdoa = gcc_phat_tdoa(a, b, out.sample_rate, max_delay);
      // A plane wave travelling along -u reaches mic m at -(m . u) / c.
      geometry(static_cast<Eigen::Index>(row), 0) = baseline.x();
      geometry(static_cast<Eigen::Index>(row), 1) = baseline.y();
      path_difference(static_cast<Eigen::Index>(row)) = -c * tdoa;
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(geometry);
  qr.setThreshold(1e-9);
  if (qr.rank() < 2) throw InvalidArgument("microphone offsets are collinear in the array plane");
  const Eigen::Vector2d u = qr.solve(path_difference);
  const double azimuth = std::atan2(u.y(), u.x()) * 180.0 / std::numbers::pi;
  return std::abs(azimuth);
}

double ground_truth_angle(double p_x, double p_y) {
  if (!(p_y > 0.0)) throw InvalidArgument("ground truth angle needs p_y > 0");
  return 180.0 / std::numbers::pi * (0.5 * std::numbers::pi + std::atan(-p_x / p_y));
}

}  // namespace wavefield

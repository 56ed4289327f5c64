#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wavefield/array.hpp"

namespace wavefield {

/// Magnitude spectrum of one analysis window.
struct SpectralFrame {
  double time = 0.0;  // window center, seconds
  std::vector<double> frequencies;
  std::vector<double> magnitudes_db;
};

/// Floor applied to magnitudes so every value stays finite.
inline constexpr double kMagnitudeFloorDb = -200.0;

/// Hann-windowed magnitude spectrum with floor(n/2)+1 bins, scaled so a
/// unit-amplitude sinusoid on a bin reads 0 dB.
SpectralFrame fft_magnitude(std::span<const double> samples, double sample_rate);

/// Short-time spectra of windows starting every `hop` samples; only full windows are analysed.
std::vector<SpectralFrame> spectrogram(std::span<const double> samples, double sample_rate, std::size_t window_len,
                                       std::size_t hop);

/// Frequency of the largest magnitude, refined by a parabola through the
/// log magnitudes of the peak bin and its neighbours.
double peak_frequency(const SpectralFrame& frame);

/// Delay of `a` relative to `b` in seconds (positive when `a` lags), from the
/// PHAT-weighted cross-correlation with 3-point parabolic refinement, clamped
/// to +-max_delay. Throws InvalidArgument on an all-zero channel.
double gcc_phat_tdoa(std::span<const double> a, std::span<const double> b, double sample_rate, double max_delay);

/// Far-field azimuth, degrees in [0, 180], of the source seen by a planar array.
///
/// Pairwise GCC-PHAT delays over [frame_start, frame_start + frame_len) are
/// fitted in the least-squares sense by a plane wave in the array's x-y
/// plane. 90 degrees is broadside along +y; 0 degrees is +x. Throws
/// InvalidArgument when the offsets do not span the plane.
double doa_azimuth(const RenderOutput& out, const std::vector<Vec3>& offsets, std::size_t frame_start,
                   std::size_t frame_len, double c);

/// Direction of a source at (p_x, p_y) relative to the array, degrees:
/// 90 + atan(-p_x / p_y) expressed in degrees. Requires p_y > 0.
double ground_truth_angle(double p_x, double p_y);

}  // namespace wavefield

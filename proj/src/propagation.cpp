#include "wavefield/propagation.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "text_util.hpp"
#include "wavefield/error.hpp"

namespace wavefield {

namespace {

void require_subsonic(const SegmentKinematics& seg, double c) {
  const double speed = seg.velocity.norm();
  if (!(speed < c)) {
    throw SupersonicError("segment [" + detail::format_double(seg.t_start) + ", " + detail::format_double(seg.t_end) +
                          "] moves at " + detail::format_double(speed) + " m/s, Mach " +
                          detail::format_double(speed / c));
  }
}

// Causal root of the emission-time equation on the infinite extension of `seg`.
double segment_root(const Vec3& p_r, double t_r, const SegmentKinematics& seg, double c) {
  require_subsonic(seg, c);
  if (seg.stationary()) return t_r - (p_r - seg.p_start).norm() / c;

  // Time origin at the segment start keeps the coefficients well scaled.
  const double tau_r = t_r - seg.t_start;
  const Vec3 r0 = p_r - seg.p_start;
  const Vec3& v = seg.velocity;
  const double c2 = c * c;
  const double a = v.squaredNorm() - c2;
  const double b = 2.0 * (c2 * tau_r - r0.dot(v));
  const double cc = r0.squaredNorm() - c2 * tau_r * tau_r;
  // a < 0 and the quadratic is non-negative at tau_r, so the roots straddle tau_r
  // and the causal one is the smaller.
  const double disc = std::max(0.0, b * b - 4.0 * a * cc);
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  double tau = 0.0;
  if (q != 0.0) {
    const double r1 = q / a;
    const double r2 = cc / q;
    tau = std::min(r1, r2);
    // Exactly one root is causal.
    assert(std::max(r1, r2) >= tau_r - 1e-9 * std::max(1.0, std::abs(tau_r)));
  }

  // Newton on the unsquared residual c (tau_r - tau) - |r0 - v tau| to remove squaring round-off.
  for (int iter = 0; iter < 2; ++iter) {
    const Vec3 sep = r0 - v * tau;
    const double dist = sep.norm();
    const double f = c * (tau_r - tau) - dist;
    if (f == 0.0 || dist == 0.0) break;
    const double df = -c + v.dot(sep) / dist;
    tau -= f / df;
  }
  return seg.t_start + tau;
}

double span_tolerance(double t) { return 1e-12 * std::max(1.0, std::abs(t)); }

PropagationSolution make_solution(const Trajectory& traj, const Vec3& p_r, double t_e) {
  PropagationSolution sol;
  sol.t_e = t_e;
  sol.emission_position = traj.position_at(t_e);
  sol.distance = (p_r - sol.emission_position).norm();
  return sol;
}

double lag_at(const Trajectory& traj, const Vec3& p_r, double t_r, double t, double c) {
  if (t == -std::numeric_limits<double>::infinity()) return std::numeric_limits<double>::infinity();
  if (t == std::numeric_limits<double>::infinity()) return -std::numeric_limits<double>::infinity();
  return c * (t_r - t) - (p_r - traj.position_at(t)).norm();
}

}  // namespace

std::optional<double> emission_time_on_segment(const Vec3& p_r, double t_r, const SegmentKinematics& seg, double c) {
  const double t_e = segment_root(p_r, t_r, seg, c);
  const double tol = span_tolerance(t_e);
  if (t_e < seg.t_start - tol || t_e > seg.t_end + tol) return std::nullopt;
  return std::clamp(t_e, seg.t_start, seg.t_end);
}

PropagationSolution solve_emission(const Trajectory& traj, const Vec3& p_r, double t_r, double c) {
  const auto segments = traj.segments();
  for (std::size_t i = segments.size(); i-- > 0;) {
    const SegmentKinematics& seg = segments[i];
    // The lag function is strictly decreasing, and the later segment was rejected
    // because its start lies after the root: the root is in this segment iff it
    // does not lie before its start.
    if (lag_at(traj, p_r, t_r, seg.t_start, c) < 0.0) {
      require_subsonic(seg, c);
      continue;
    }
    const double t_e = std::clamp(segment_root(p_r, t_r, seg, c), seg.t_start, seg.t_end);
    assert(t_e <= t_r);
    return make_solution(traj, p_r, t_e);
  }
  // The lead-in hold starts at -infinity and always brackets the root.
  throw Error("no causal emission time found");
}

EmissionSolver::EmissionSolver(const Trajectory& traj, double c)
    : traj_(traj), segments_(traj.segments()), c_(c), hint_(segments_.size() - 1) {
  check_subsonic(traj, c);
}

double EmissionSolver::lag(const Vec3& p_r, double t_r, double t) const { return lag_at(traj_, p_r, t_r, t, c_); }

PropagationSolution EmissionSolver::solve(const Vec3& p_r, double t_r) {
  std::size_t i = hint_;
  while (true) {
    const SegmentKinematics& seg = segments_[i];
    if (i > 0 && lag(p_r, t_r, seg.t_start) < 0.0) {
      --i;
    } else if (i + 1 < segments_.size() && lag(p_r, t_r, seg.t_end) > 0.0) {
      ++i;
    } else {
      break;
    }
  }
  hint_ = i;
  const SegmentKinematics& seg = segments_[i];
  const double t_e = std::clamp(segment_root(p_r, t_r, seg, c_), seg.t_start, seg.t_end);
  return make_solution(traj_, p_r, t_e);
}

void check_subsonic(const Trajectory& traj, double c) {
  const auto segments = traj.segments();
  for (std::size_t i = 0; i < segments.size(); ++i) {
    try {
      require_subsonic(segments[i], c);
    } catch (const SupersonicError& e) {
      // Segment 0 is the lead-in hold, so moving segment k is keyframes k-1 -> k.
      throw SupersonicError("trajectory segment " + std::to_string(i - 1) + " (keyframes " + std::to_string(i - 1) +
                            "->" + std::to_string(i) + "): " + e.what());
    }
  }
}

double spreading_gain(double distance, double reference_distance) {
  return reference_distance / std::max(distance, reference_distance);
}

AbsorptionFirDesigner::AbsorptionFirDesigner(const Atmosphere& atm, double sample_rate, std::size_t n_taps)
    : n_taps_(n_taps) {
  if (n_taps < 3 || n_taps % 2 == 0) throw InvalidArgument("absorption FIR needs an odd tap count >= 3");
  alpha_db_per_m_ = absorption_spectrum(sample_rate, n_taps, atm);

  const std::size_t half = (n_taps - 1) / 2;
  const double n_plus_1 = static_cast<double>(n_taps + 1);
  window_.resize(half + 1);
  for (std::size_t n = 0; n <= half; ++n) {
    window_[n] = 0.5 + 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / n_plus_1);
  }

  const std::size_t period = 2 * (n_taps - 1);
  cos_table_.resize(period);
  for (std::size_t j = 0; j < period; ++j) {
    cos_table_[j] = std::cos(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(period));
  }
}

std::vector<double> AbsorptionFirDesigner::design(double distance) const {
  const std::size_t n_bins = n_taps_;
  const std::size_t period = 2 * (n_taps_ - 1);
  const std::size_t half = (n_taps_ - 1) / 2;

  std::vector<double> taps(n_taps_, 0.0);
  if (distance == 0.0) {
    // The cosine sum is an impulse only up to rounding; make the no-op filter exact.
    taps[half] = 1.0;
    return taps;
  }

  std::vector<double> magnitude(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    magnitude[k] = std::pow(10.0, -alpha_db_per_m_[k] * distance / 20.0);
  }

  for (std::size_t n = 0; n <= half; ++n) {
    // Zero-phase real inverse transform of the half spectrum, evaluated at lag n.
    double acc = magnitude[0] + ((n % 2 == 0) ? magnitude[n_bins - 1] : -magnitude[n_bins - 1]);
    for (std::size_t k = 1; k + 1 < n_bins; ++k) {
      acc += 2.0 * magnitude[k] * cos_table_[(k * n) % period];
    }
    const double tap = acc / static_cast<double>(period) * window_[n];
    taps[half + n] = tap;
    taps[half - n] = tap;
  }
  return taps;
}

std::vector<double> design_absorption_fir(double distance, const Atmosphere& atm, double sample_rate,
                                          std::size_t n_taps) {
  if (!(distance >= 0.0)) throw InvalidArgument("absorption distance must be non-negative");
  return AbsorptionFirDesigner(atm, sample_rate, n_taps).design(distance);
}

namespace {

double filter_at(std::span<const double> x, const std::vector<double>& taps, std::size_t n) {
  const auto len = static_cast<std::ptrdiff_t>(x.size());
  const auto n_taps = static_cast<std::ptrdiff_t>(taps.size());
  const std::ptrdiff_t center = static_cast<std::ptrdiff_t>(n) + (n_taps - 1) / 2;
  // out = sum_k taps[k] x[center - k], with x zero outside [0, len)
  const std::ptrdiff_t k_lo = std::max<std::ptrdiff_t>(0, center - (len - 1));
  const std::ptrdiff_t k_hi = std::min<std::ptrdiff_t>(n_taps - 1, center);
  double acc = 0.0;
  for (std::ptrdiff_t k = k_lo; k <= k_hi; ++k) acc += taps[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(center - k)];
  return acc;
}

}  // namespace

std::vector<double> apply_time_varying_fir(std::span<const double> signal,
                                           const std::vector<std::vector<double>>& tap_schedule,
                                           std::size_t block_size) {
  if (block_size == 0) throw InvalidArgument("block size must be positive");
  const std::size_t n_blocks = (signal.size() + block_size - 1) / block_size;
  if (tap_schedule.size() != n_blocks) {
    throw InvalidArgument("tap schedule has " + std::to_string(tap_schedule.size()) + " entries, expected " +
                          std::to_string(n_blocks));
  }
  std::vector<double> out(signal.size());
  if (signal.empty()) return out;
  const std::size_t n_taps = tap_schedule.front().size();
  for (const auto& taps : tap_schedule) {
    if (taps.size() != n_taps || n_taps % 2 == 0) throw InvalidArgument("tap vectors must share one odd length");
  }

  std::vector<bool> same_as_next(n_blocks, true);
  for (std::size_t b = 0; b + 1 < n_blocks; ++b) same_as_next[b] = tap_schedule[b] == tap_schedule[b + 1];

  const double block = static_cast<double>(block_size);
  for (std::size_t n = 0; n < signal.size(); ++n) {
    // Block coordinate with block centers at integers.
    const double u = (static_cast<double>(n) + 0.5) / block - 0.5;
    double lower = std::floor(u);
    double frac = u - lower;
    if (lower < 0.0) {
      lower = 0.0;
      frac = 0.0;
    }
    auto b = static_cast<std::size_t>(lower);
    if (b >= n_blocks - 1) {
      b = n_blocks - 1;
      frac = 0.0;
    }
    const double y0 = filter_at(signal, tap_schedule[b], n);
    if (frac == 0.0 || same_as_next[b]) {
      out[n] = y0;
    } else {
      const double y1 = filter_at(signal, tap_schedule[b + 1], n);
      out[n] = y0 + frac * (y1 - y0);
    }
  }
  return out;
}

std::vector<double> render_path(const Source& src, const ReceiverPath& receiver, const Atmosphere& atm,
                                const RenderSettings& settings) {
  return render_path(src, receiver, atm, settings, nullptr);
}

std::vector<double> render_path(const Source& src, const ReceiverPath& receiver, const Atmosphere& atm,
                                const RenderSettings& settings, std::vector<PropagationSolution>* solutions) {
  if (!(settings.sample_rate > 0.0)) throw InvalidArgument("sample rate must be positive");
  const double c = speed_of_sound(atm);
  EmissionSolver solver(src.trajectory, c);  // throws on supersonic segments

  const std::size_t n_samples = settings.n_samples;
  std::vector<double> raw(n_samples);
  std::vector<double> distance(n_samples);
  if (solutions) solutions->resize(n_samples);
  for (std::size_t n = 0; n < n_samples; ++n) {
    const double t_r = static_cast<double>(n) / settings.sample_rate;
    const PropagationSolution sol = solver.solve(receiver(t_r), t_r);
    raw[n] = sample_at(src, sol.t_e) * spreading_gain(sol.distance, src.reference_distance_m) * src.gain;
    distance[n] = sol.distance;
    if (solutions) (*solutions)[n] = sol;
  }
  if (!settings.air_absorption || n_samples == 0) return raw;

  const AbsorptionFirDesigner designer(atm, settings.sample_rate, settings.fir_taps);
  const std::size_t block = settings.block_size;
  if (block == 0) throw InvalidArgument("block size must be positive");
  const std::size_t n_blocks = (n_samples + block - 1) / block;
  std::vector<std::vector<double>> schedule(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    const std::size_t center = std::min(b * block + block / 2, n_samples - 1);
    if (b > 0 && distance[center] == distance[std::min((b - 1) * block + block / 2, n_samples - 1)]) {
      schedule[b] = schedule[b - 1];
    } else {
      schedule[b] = designer.design(distance[center]);
    }
  }
  return apply_time_varying_fir(raw, schedule, block);
}

}  // namespace wavefield

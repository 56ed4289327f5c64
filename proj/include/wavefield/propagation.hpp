#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "wavefield/atmosphere.hpp"
#include "wavefield/kinematics.hpp"
#include "wavefield/sources.hpp"

namespace wavefield {

/// Direct path, or the first-order reflection off plane `plane_index`.
struct PathKind {
  static PathKind direct() { return {}; }
  static PathKind image(int plane) { return {plane}; }

  bool is_direct() const { return plane_index < 0; }

  int plane_index = -1;

  friend bool operator==(const PathKind&, const PathKind&) = default;
};

/// Retarded-time solution for one receiver instant.
struct PropagationSolution {
  double t_e = 0.0;
  Vec3 emission_position = Vec3::Zero();
  double distance = 0.0;
  PathKind path_kind{};
};

/// Causal root of |p_r - p(t_e)| = c (t_r - t_e) on one constant-velocity segment.
///
/// The quadratic is formed with the segment start as time origin, the causal
/// root (the smaller one, since the leading coefficient |v|^2 - c^2 is negative)
/// is polished with a Newton step on the unsquared equation, and returned only
/// if it lies inside [t_start, t_end]. Stationary segments use t_e = t_r - r/c.
/// Throws SupersonicError if |v| >= c.
std::optional<double> emission_time_on_segment(const Vec3& p_r, double t_r, const SegmentKinematics& seg,
                                               double c);

/// Scans the segments of `traj` (holds included) from latest to earliest and
/// returns the first valid causal root.
PropagationSolution solve_emission(const Trajectory& traj, const Vec3& p_r, double t_r, double c);

/// Same solutions as solve_emission, but starts from the segment used by the
/// previous call and walks toward the root, which is O(1) for sample-by-sample
/// rendering. One instance per thread.
class EmissionSolver {
 public:
  EmissionSolver(const Trajectory& traj, double c);

  PropagationSolution solve(const Vec3& p_r, double t_r);

 private:
  // Sign of c (t_r - t) - |p_r - p(t)| at a segment boundary; the function is
  // strictly decreasing in t for subsonic motion.
  double lag(const Vec3& p_r, double t_r, double t) const;

  Trajectory traj_;
  std::vector<SegmentKinematics> segments_;
  double c_;
  std::size_t hint_ = 0;
};

/// Throws SupersonicError naming the first segment moving at or above c.
void check_subsonic(const Trajectory& traj, double c);

/// reference_distance / max(distance, reference_distance): the near field is clamped at unit gain.
double spreading_gain(double distance, double reference_distance);

/// Linear-phase FIR approximating the air-absorption magnitude 10^(-alpha(f) d / 20).
///
/// The target magnitude is sampled at n_taps points on [0, fs/2], inverse
/// transformed with zero phase, centered, and tapered with a Hann window whose
/// zero end points fall just outside the filter. The absorption spectrum and
/// cosine table are computed once, so designs for many distances are cheap.
class AbsorptionFirDesigner {
 public:
  AbsorptionFirDesigner(const Atmosphere& atm, double sample_rate, std::size_t n_taps);

  std::size_t n_taps() const { return n_taps_; }
  std::vector<double> design(double distance) const;

 private:
  std::size_t n_taps_;
  std::vector<double> alpha_db_per_m_;  // n_taps bins on [0, fs/2]
  std::vector<double> window_;          // one side, center first
  std::vector<double> cos_table_;       // cos(2 pi j / L), L = 2 (n_taps - 1)
};

std::vector<double> design_absorption_fir(double distance, const Atmosphere& atm, double sample_rate,
                                          std::size_t n_taps);

/// Filters `signal` with a per-block tap schedule.
///
/// Each block's taps are the filter at the block center; between two block
/// centers the outputs of the neighbouring filters are blended linearly. The
/// (n_taps - 1) / 2 group delay is removed, so an all-impulse schedule is the
/// identity.
std::vector<double> apply_time_varying_fir(std::span<const double> signal,
                                           const std::vector<std::vector<double>>& tap_schedule,
                                           std::size_t block_size);

struct RenderSettings {
  double sample_rate = 48000.0;
  std::size_t n_samples = 0;
  std::size_t block_size = 1024;
  std::size_t fir_taps = 129;
  bool air_absorption = true;
};

using ReceiverPath = std::function<Vec3(double)>;

/// Renders one source path into one receiver.
///
/// For each output sample the retarded time is solved against the source's
/// trajectory, the signal is sampled there and scaled by spreading and gain;
/// the result is then run through the block-wise absorption filter designed
/// from the block-center distance. Doppler is not applied anywhere: it comes
/// out of the time-varying delay. Throws SupersonicError before rendering.
std::vector<double> render_path(const Source& src, const ReceiverPath& receiver, const Atmosphere& atm,
                                const RenderSettings& settings);

/// As above, also reporting the per-sample solutions.
std::vector<double> render_path(const Source& src, const ReceiverPath& receiver, const Atmosphere& atm,
                                const RenderSettings& settings, std::vector<PropagationSolution>* solutions);

}  // namespace wavefield

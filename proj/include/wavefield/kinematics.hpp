#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace wavefield {

using Vec3 = Eigen::Vector3d;

/// Yaw (about Z), pitch (about Y), roll (about X), in degrees.
struct Orientation {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;

  friend bool operator==(const Orientation&, const Orientation&) = default;
};

struct Keyframe {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Orientation orientation{};

  friend bool operator==(const Keyframe& a, const Keyframe& b) {
    return a.t == b.t && a.position == b.position && a.orientation == b.orientation;
  }
};

/// One piece of constant-velocity motion: p(t) = p_start + velocity * (t - t_start).
///
/// The holds before the first and after the last keyframe are stationary
/// segments with an infinite start or end.
struct SegmentKinematics {
  double t_start = -std::numeric_limits<double>::infinity();
  double t_end = std::numeric_limits<double>::infinity();
  Vec3 p_start = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();

  bool stationary() const { return velocity.isZero(0.0); }
};

/// Piecewise-linear path through time-stamped keyframes.
///
/// Before the first keyframe and after the last one the path holds still.
/// Orientation is interpolated per Euler component without wrap-around, so a
/// yaw going from 350 to 10 degrees sweeps back through 180.
class Trajectory {
 public:
  /// Throws InvalidArgument unless there is at least one keyframe, every value
  /// is finite, and times are strictly increasing.
  explicit Trajectory(std::vector<Keyframe> keyframes);

  static Trajectory stationary(const Vec3& position, const Orientation& orientation = {});

  /// Constant-velocity path starting at `from` at time `t0`, reaching `to` at `speed` m/s.
  static Trajectory linear(const Vec3& from, const Vec3& to, double speed, double t0 = 0.0);

  const std::vector<Keyframe>& keyframes() const noexcept { return keyframes_; }
  double start_time() const { return keyframes_.front().t; }
  double end_time() const { return keyframes_.back().t; }

  Vec3 position_at(double t) const;
  /// Slope of the segment containing t; the following segment at an interior keyframe.
  Vec3 velocity_at(double t) const;
  Orientation orientation_at(double t) const;

  /// Stationary lead-in hold, the moving segments in order, and the trailing hold.
  std::vector<SegmentKinematics> segments() const;

  double max_speed() const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  // Index of the segment [t_i, t_{i+1}) containing t; requires start_time() <= t < end_time().
  std::size_t segment_index(double t) const;

  std::vector<Keyframe> keyframes_;
};

struct Plane {
  /// Throws InvalidArgument if `normal` has zero (or non-finite) length; the normal is normalized.
  Plane(const Vec3& point, const Vec3& normal);

  Vec3 point;
  Vec3 normal;

  /// Signed distance along the normal.
  double signed_distance(const Vec3& p) const { return (p - point).dot(normal); }
  Vec3 reflect(const Vec3& p) const { return p - 2.0 * signed_distance(p) * normal; }
};

/// Inserts keyframes at every multiple of dt inside the span; the path itself is unchanged.
Trajectory densify(const Trajectory& traj, double dt);

/// Specular copy of the path across `plane`; times and orientations are kept.
Trajectory mirror(const Trajectory& traj, const Plane& plane);

/// Parses `t,x,y,z[,yaw,pitch,roll]` CSV. Lines starting with '#' and blank
/// lines are skipped. Throws ParseError naming the 1-based line.
Trajectory load_csv(std::string_view text);
Trajectory load_csv_file(const std::string& path);

/// Writes the header `t,x,y,z,yaw,pitch,roll` followed by one row per keyframe,
/// with enough digits to read back bit-identical values.
std::string to_csv(const Trajectory& traj);

}  // namespace wavefield

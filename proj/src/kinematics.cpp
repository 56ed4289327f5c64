#include "wavefield/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "text_util.hpp"
#include "wavefield/error.hpp"

namespace wavefield {

namespace detail {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path + "'");
  return ss.str();
}

}  // namespace detail

namespace {

bool finite(const Keyframe& k) {
  return std::isfinite(k.t) && k.position.allFinite() && std::isfinite(k.orientation.yaw) &&
         std::isfinite(k.orientation.pitch) && std::isfinite(k.orientation.roll);
}

double lerp(double a, double b, double u) { return a + (b - a) * u; }

}  // namespace

Trajectory::Trajectory(std::vector<Keyframe> keyframes) : keyframes_(std::move(keyframes)) {
  if (keyframes_.empty()) throw InvalidArgument("trajectory needs at least one keyframe");
  for (std::size_t i = 0; i < keyframes_.size(); ++i) {
    if (!finite(keyframes_[i])) {
      throw InvalidArgument("keyframe " + std::to_string(i) + " has a non-finite value");
    }
    if (i > 0 && !(keyframes_[i].t > keyframes_[i - 1].t)) {
      throw InvalidArgument("keyframe times must be strictly increasing (keyframe " + std::to_string(i) +
                            " at t=" + detail::format_double(keyframes_[i].t) + ")");
    }
  }
}

Trajectory Trajectory::stationary(const Vec3& position, const Orientation& orientation) {
  return Trajectory({Keyframe{0.0, position, orientation}});
}

Trajectory Trajectory::linear(const Vec3& from, const Vec3& to, double speed, double t0) {
  if (!(speed > 0.0)) throw InvalidArgument("linear trajectory needs a positive speed");
  const double duration = (to - from).norm() / speed;
  if (!(duration > 0.0)) return Trajectory({Keyframe{t0, from, {}}});
  return Trajectory({Keyframe{t0, from, {}}, Keyframe{t0 + duration, to, {}}});
}

std::size_t Trajectory::segment_index(double t) const {
  const auto it = std::upper_bound(keyframes_.begin(), keyframes_.end(), t,
                                   [](double value, const Keyframe& k) { return value < k.t; });
  return static_cast<std::size_t>(it - keyframes_.begin()) - 1;
}

Vec3 Trajectory::position_at(double t) const {
  if (!(t > start_time())) return keyframes_.front().position;
  if (t >= end_time()) return keyframes_.back().position;
  const std::size_t i = segment_index(t);
  const Keyframe& a = keyframes_[i];
  return a.position + velocity_at(t) * (t - a.t);
}

Vec3 Trajectory::velocity_at(double t) const {
  if (t < start_time() || t >= end_time()) return Vec3::Zero();
  const std::size_t i = segment_index(t);
  const Keyframe& a = keyframes_[i];
  const Keyframe& b = keyframes_[i + 1];
  return (b.position - a.position) / (b.t - a.t);
}

Orientation Trajectory::orientation_at(double t) const {
  if (!(t > start_time())) return keyframes_.front().orientation;
  if (t >= end_time()) return keyframes_.back().orientation;
  const std::size_t i = segment_index(t);
  const Keyframe& a = keyframes_[i];
  const Keyframe& b = keyframes_[i + 1];
  const double u = (t - a.t) / (b.t - a.t);
  return {lerp(a.orientation.yaw, b.orientation.yaw, u), lerp(a.orientation.pitch, b.orientation.pitch, u),
          lerp(a.orientation.roll, b.orientation.roll, u)};
}

std::vector<SegmentKinematics> Trajectory::segments() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<SegmentKinematics> out;
  out.reserve(keyframes_.size() + 1);
  out.push_back({-inf, start_time(), keyframes_.front().position, Vec3::Zero()});
  for (std::size_t i = 0; i + 1 < keyframes_.size(); ++i) {
    const Keyframe& a = keyframes_[i];
    const Keyframe& b = keyframes_[i + 1];
    out.push_back({a.t, b.t, a.position, (b.position - a.position) / (b.t - a.t)});
  }
  out.push_back({end_time(), inf, keyframes_.back().position, Vec3::Zero()});
  return out;
}

double Trajectory::max_speed() const {
  double v = 0.0;
  for (std::size_t i = 0; i + 1 < keyframes_.size(); ++i) {
    const Keyframe& a = keyframes_[i];
    const Keyframe& b = keyframes_[i + 1];
    v = std::max(v, (b.position - a.position).norm() / (b.t - a.t));
  }
  return v;
}

Plane::Plane(const Vec3& p, const Vec3& n) : point(p), normal(n) {
  const double len = n.norm();
  if (!(std::isfinite(len) && len > 0.0) || !p.allFinite()) {
    throw InvalidArgument("plane needs a finite point and a non-zero normal");
  }
  normal = n / len;
}

Trajectory densify(const Trajectory& traj, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("densify step must be positive");
  const auto& original = traj.keyframes();
  std::vector<Keyframe> out;
  out.reserve(original.size());
  for (std::size_t i = 0; i < original.size(); ++i) {
    out.push_back(original[i]);
    if (i + 1 == original.size()) break;
    const double t0 = original[i].t;
    const double t1 = original[i + 1].t;
    // Skip grid points that would land within rounding distance of a keyframe.
    const double guard = 1e-9 * std::max(1.0, std::max(std::abs(t0), std::abs(t1)));
    for (double k = std::floor(t0 / dt) + 1.0;; k += 1.0) {
      const double t = k * dt;
      if (t >= t1 - guard) break;
      if (t <= t0 + guard) continue;
      out.push_back(Keyframe{t, traj.position_at(t), traj.orientation_at(t)});
    }
  }
  return Trajectory(std::move(out));
}

Trajectory mirror(const Trajectory& traj, const Plane& plane) {
  std::vector<Keyframe> out = traj.keyframes();
  for (Keyframe& k : out) k.position = plane.reflect(k.position);
  return Trajectory(std::move(out));
}

Trajectory load_csv(std::string_view text) {
  enum Column { kT, kX, kY, kZ, kYaw, kPitch, kRoll, kColumnCount };
  static constexpr std::string_view kNames[kColumnCount] = {"t", "x", "y", "z", "yaw", "pitch", "roll"};

  std::vector<int> column_of_field;  // field position -> Column
  bool have_header = false;
  std::vector<Keyframe> keyframes;
  double previous_t = 0.0;
  std::size_t line_no = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;

    const auto fields = detail::split(line, ',');
    if (!have_header) {
      bool seen[kColumnCount] = {};
      for (auto field : fields) {
        const auto name = detail::trim(field);
        const auto it = std::find(std::begin(kNames), std::end(kNames), name);
        if (it == std::end(kNames)) throw ParseError("unknown column '" + std::string(name) + "'", line_no);
        const int col = static_cast<int>(it - std::begin(kNames));
        if (seen[col]) throw ParseError("duplicate column '" + std::string(name) + "'", line_no);
        seen[col] = true;
        column_of_field.push_back(col);
      }
      for (int col : {kT, kX, kY, kZ}) {
        if (!seen[col]) throw ParseError("missing required column '" + std::string(kNames[col]) + "'", line_no);
      }
      have_header = true;
      continue;
    }

    if (fields.size() != column_of_field.size()) {
      throw ParseError("expected " + std::to_string(column_of_field.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    double values[kColumnCount] = {};
    for (std::size_t f = 0; f < fields.size(); ++f) {
      const auto v = detail::parse_double(fields[f]);
      if (!v || !std::isfinite(*v)) {
        throw ParseError("invalid number '" + std::string(detail::trim(fields[f])) + "' in column '" +
                             std::string(kNames[column_of_field[f]]) + "'",
                         line_no);
      }
      values[column_of_field[f]] = *v;
    }
    if (!keyframes.empty() && !(values[kT] > previous_t)) {
      throw ParseError("time " + detail::format_double(values[kT]) + " is not after previous time " +
                           detail::format_double(previous_t),
                       line_no);
    }
    previous_t = values[kT];
    keyframes.push_back(Keyframe{values[kT], Vec3(values[kX], values[kY], values[kZ]),
                                 Orientation{values[kYaw], values[kPitch], values[kRoll]}});
  }
  if (!have_header) throw ParseError("missing header row", 0);
  if (keyframes.empty()) throw ParseError("no data rows", 0);
  return Trajectory(std::move(keyframes));
}

Trajectory load_csv_file(const std::string& path) {
  const std::string text = detail::read_text_file(path);
  try {
    return load_csv(text);
  } catch (const ParseError& e) {
    throw ParseError(e.message(), e.line(), path);
  }
}

std::string to_csv(const Trajectory& traj) {
  std::string out = "t,x,y,z,yaw,pitch,roll\n";
  for (const Keyframe& k : traj.keyframes()) {
    for (double v : {k.t, k.position.x(), k.position.y(), k.position.z(), k.orientation.yaw,
                     k.orientation.pitch}) {
      out += detail::format_double(v);
      out += ',';
    }
    out += detail::format_double(k.orientation.roll);
    out += '\n';
  }
  return out;
}

}  // namespace wavefield

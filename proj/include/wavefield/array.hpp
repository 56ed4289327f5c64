#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <string>
#include <vector>

#include "wavefield/kinematics.hpp"

namespace wavefield {

struct Scene;

/// Rigid set of microphones moving and rotating with one trajectory.
struct MicrophoneArray {
  std::string name = "array";
  /// Microphone positions in the array frame, meters.
  std::vector<Vec3> offsets{Vec3::Zero()};
  Trajectory trajectory = Trajectory::stationary(Vec3::Zero());
};

/// Throws InvalidArgument unless there is at least one finite offset.
void check_array(const MicrophoneArray& arr);

/// One channel per microphone, all the same length.
struct RenderOutput {
  std::vector<std::vector<double>> channels;
  double sample_rate = 48000.0;

  std::size_t n_samples() const { return channels.empty() ? 0 : channels.front().size(); }
};

/// R = Rz(yaw) Ry(pitch) Rx(roll): intrinsic Z-Y-X rotation from the array frame to the world.
Eigen::Matrix3d rotation_matrix(const Orientation& o);

Vec3 mic_world_position(const MicrophoneArray& arr, std::size_t mic_index, double t);

struct RenderOptions {
  /// Worker threads; 0 picks the hardware concurrency. The output does not depend on it.
  std::size_t threads = 0;
};

/// Renders every source and image path of `scene` into each microphone of `arr`.
///
/// (microphone, path) pairs render in parallel into separate buffers that are
/// summed per channel in path order, so results are bit-identical for any
/// thread count. Throws SupersonicError for supersonic source motion.
RenderOutput render_array(const Scene& scene, const MicrophoneArray& arr, const RenderOptions& options = {});

/// Worker count from `WAVEFIELD_THREADS`, else hardware concurrency (at least 1).
std::size_t default_thread_count();

}  // namespace wavefield

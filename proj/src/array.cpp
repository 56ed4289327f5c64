#include "wavefield/array.hpp"

#include <Eigen/Geometry>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

#include "wavefield/error.hpp"
#include "wavefield/scene.hpp"

namespace wavefield {

void check_array(const MicrophoneArray& arr) {
  if (arr.offsets.empty()) throw InvalidArgument("array '" + arr.name + "' has no microphones");
  for (std::size_t i = 0; i < arr.offsets.size(); ++i) {
    if (!arr.offsets[i].allFinite()) {
      throw InvalidArgument("array '" + arr.name + "' offset " + std::to_string(i) + " is not finite");
    }
  }
}

Eigen::Matrix3d rotation_matrix(const Orientation& o) {
  constexpr double k = std::numbers::pi / 180.0;
  return (Eigen::AngleAxisd(o.yaw * k, Vec3::UnitZ()) * Eigen::AngleAxisd(o.pitch * k, Vec3::UnitY()) *
          Eigen::AngleAxisd(o.roll * k, Vec3::UnitX()))
      .toRotationMatrix();
}

Vec3 mic_world_position(const MicrophoneArray& arr, std::size_t mic_index, double t) {
  if (mic_index >= arr.offsets.size()) {
    throw InvalidArgument("microphone index " + std::to_string(mic_index) + " out of range for array '" + arr.name +
                          "'");
  }
  return arr.trajectory.position_at(t) + rotation_matrix(arr.trajectory.orientation_at(t)) * arr.offsets[mic_index];
}

std::size_t default_thread_count() {
  if (const char* env = std::getenv("WAVEFIELD_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

RenderOutput render_array(const Scene& scene, const MicrophoneArray& arr, const RenderOptions& options) {
  check_array(arr);
  const std::vector<PathSource> paths = build_image_sources(scene);
  const RenderSettings settings = scene.render_settings();
  const std::size_t n_mics = arr.offsets.size();
  const std::size_t n_tasks = n_mics * paths.size();

  // Fail before spawning work if any path is supersonic.
  const double c = speed_of_sound(scene.atmosphere);
  for (const PathSource& p : paths) check_subsonic(p.source.trajectory, c);

  std::vector<std::vector<double>> buffers(n_tasks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    while (true) {
      const std::size_t task = next.fetch_add(1);
      if (task >= n_tasks) return;
      const std::size_t mic = task / paths.size();
      const std::size_t path = task % paths.size();
      try {
        const ReceiverPath receiver = [&arr, mic](double t) { return mic_world_position(arr, mic, t); };
        buffers[task] = render_path(paths[path].source, receiver, scene.atmosphere, settings);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const std::size_t requested = options.threads == 0 ? default_thread_count() : options.threads;
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(requested, n_tasks));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  RenderOutput out;
  out.sample_rate = scene.sample_rate;
  out.channels.assign(n_mics, std::vector<double>(settings.n_samples, 0.0));
  for (std::size_t mic = 0; mic < n_mics; ++mic) {
    auto& channel = out.channels[mic];
    for (std::size_t path = 0; path < paths.size(); ++path) {
      const auto& buf = buffers[mic * paths.size() + path];
      for (std::size_t n = 0; n < channel.size(); ++n) channel[n] += buf[n];
    }
  }
  return out;
}

}  // namespace wavefield

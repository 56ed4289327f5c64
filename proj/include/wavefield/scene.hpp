#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wavefield/array.hpp"
#include "wavefield/atmosphere.hpp"
#include "wavefield/propagation.hpp"
#include "wavefield/sources.hpp"

namespace wavefield {

/// Reflecting plane as written in the scene; `validate` checks the normal.
struct Reflector {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  /// Frequency- and angle-independent pressure reflection coefficient.
  double reflection = 1.0;
};

struct Scene {
  Atmosphere atmosphere{};
  std::vector<Source> sources;
  std::vector<MicrophoneArray> arrays;
  std::vector<Reflector> planes;
  double sample_rate = 48000.0;
  double duration = 1.0;
  std::uint64_t seed = 0;

  std::size_t block_size = 1024;
  std::size_t fir_taps = 129;
  bool air_absorption = true;

  std::size_t n_samples() const;
  RenderSettings render_settings() const;
};

/// One entry of the image-source expansion.
struct PathSource {
  Source source;
  PathKind kind;
  std::size_t source_index = 0;
};

/// Parses the JSON scene format. Relative file references resolve against `base_dir`.
///
/// Unknown keys, wrong types, and values that break a member invariant raise
/// SceneError whose message starts with the field path (e.g. `sources[1].trajectory[3].t`).
/// Unreadable referenced files raise SceneError naming the file.
Scene parse_scene(std::string_view text, const std::filesystem::path& base_dir = {});
Scene load_scene(const std::filesystem::path& path);

/// Canonical JSON; trajectories are written inline, file signals by path.
std::string serialize_scene(const Scene& scene);

/// Re-derives per-source noise seeds and noise rates from the scene seed and
/// sample rate; call after changing either.
void refresh_noise_sources(Scene& scene);

/// Empty iff the scene can be rendered; each diagnostic starts with a field path.
std::vector<std::string> validate(const Scene& scene);

/// Direct path of every source, followed by one mirrored image per plane.
/// First order only. Image gains carry the plane's reflection coefficient.
std::vector<PathSource> build_image_sources(const Scene& scene);

}  // namespace wavefield

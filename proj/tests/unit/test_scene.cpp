#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "wavefield/error.hpp"
#include "wavefield/scene.hpp"

using namespace wavefield;

namespace {

const char* kMinimal = R"({
  "duration": 0.1,
  "sources": [{"kind": "sine", "freq": 1000, "trajectory": [{"t": 0, "position": [10, 0, 0]}]}],
  "arrays": [{"name": "mic", "offsets": [[0, 0, 0]], "trajectory": [{"t": 0, "position": [0, 0, 0]}]}]
})";

const char* kGroundPass = R"({
  "atmosphere": {"temperature_c": 20, "pressure_kpa": 101.325, "relative_humidity": 0.5},
  "sample_rate": 48000,
  "duration": 8,
  "seed": 7,
  "sources": [{"kind": "noise", "amplitude": 0.5,
               "trajectory": [{"t": 0, "position": [-20, 3, 1]}, {"t": 8, "position": [20, 3, 1]}]}],
  "arrays": [{"name": "ground", "offsets": [[0, 0, 0]], "trajectory": [{"t": 0, "position": [0, 0, 1]}]}],
  "planes": [{"point": [0, 0, 0], "normal": [0, 0, 1], "reflection": 1.0}]
})";

std::string field_of(const std::string& text) {
  try {
    parse_scene(text);
  } catch (const SceneError& e) {
    return e.field_path();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("minimal scene parses and renders") {
  const Scene scene = parse_scene(kMinimal);
  CHECK(validate(scene).empty());
  const auto out = render_array(scene, scene.arrays[0]);
  CHECK(out.channels.size() == 1);
  CHECK(out.n_samples() == 4800);
}

TEST_CASE("round trip through the canonical form") {
  const Scene a = parse_scene(kGroundPass);
  const std::string text = serialize_scene(a);
  const Scene b = parse_scene(text);
  CHECK(serialize_scene(b) == text);
  CHECK(b.sources[0].trajectory == a.sources[0].trajectory);
  CHECK(b.arrays[0].trajectory == a.arrays[0].trajectory);
  CHECK(b.atmosphere == a.atmosphere);
  CHECK(b.seed == 7);
  CHECK(std::get<WhiteNoise>(b.sources[0].kind).seed == std::get<WhiteNoise>(a.sources[0].kind).seed);
}

TEST_CASE("strict schema") {
  CHECK(field_of(R"({"duration": 1, "colour": "red"})") == "colour");
  CHECK(field_of(R"({"duration": 1, "sources": [{"kind": "sine", "freq": 1, "speed": 3,
      "trajectory": [{"t": 0, "position": [0,0,0]}]}]})") == "sources[0].speed");
  CHECK(field_of(R"({"sample_rate": 48000})") == "duration");
  CHECK(field_of(R"({"duration": "long"})") == "duration");
  CHECK(field_of(R"({"duration": 1, "sources": [{"kind": "sine", "freq": 1,
      "trajectory": [{"t": 0, "position": [0,0,0]}, {"t": 0, "position": [1,0,0]}]}]})") ==
        "sources[0].trajectory[1].t");
  CHECK(field_of(R"({"duration": 1, "sources": [{"kind": "noise", "freq": 3,
      "trajectory": [{"t": 0, "position": [0,0,0]}]}]})") == "sources[0].freq");
  CHECK(field_of("{not json") == "$");
}

TEST_CASE("validation diagnostics") {
  Scene scene = parse_scene(kMinimal);
  CHECK(validate(scene).empty());

  Scene fast = scene;
  fast.sources[0].trajectory = Trajectory::linear({0, 0, 0}, {400, 0, 0}, 400.0);
  const auto diag = validate(fast);
  REQUIRE(diag.size() == 1);
  CHECK(diag[0].find("supersonic") != std::string::npos);
  CHECK(diag[0].rfind("sources[0]", 0) == 0);

  Scene flat = scene;
  flat.planes.push_back(Reflector{{0, 0, 0}, {0, 0, 0}, 1.0});
  const auto plane_diag = validate(flat);
  REQUIRE(plane_diag.size() == 1);
  CHECK(plane_diag[0].rfind("planes[0].normal", 0) == 0);

  Scene short_scene = scene;
  short_scene.duration = 0.0;
  CHECK_FALSE(validate(short_scene).empty());
}

TEST_CASE("image sources") {
  Scene scene = parse_scene(kMinimal);
  CHECK(build_image_sources(scene).size() == 1);

  scene.sources[0].trajectory = Trajectory::stationary({3, 4, 2.5});
  scene.planes.push_back(Reflector{});
  const auto paths = build_image_sources(scene);
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].kind.is_direct());
  CHECK(paths[1].kind.plane_index == 0);
  CHECK(paths[1].source.trajectory.position_at(0.0).isApprox(Vec3(3, 4, -2.5)));

  scene.sources.push_back(scene.sources[0]);
  scene.planes.push_back(Reflector{{5, 0, 0}, {1, 0, 0}, 0.5});
  const auto many = build_image_sources(scene);
  CHECK(many.size() == 6);
  std::size_t images_of_wall = 0;
  for (const auto& p : many) {
    if (p.kind.plane_index == 1) {
      ++images_of_wall;
      CHECK(p.source.gain == 0.5);
      CHECK(p.source.trajectory.position_at(0.0).isApprox(Vec3(7, 4, 2.5)));
    }
  }
  CHECK(images_of_wall == 2);
}

TEST_CASE("files are resolved against the scene directory") {
  const auto dir = std::filesystem::temp_directory_path() / "wavefield_scene_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "path.csv") << "t,x,y,z\n0,0,5,0\n1,1,5,0\n";
  std::ofstream(dir / "scene.json") << R"({"duration": 0.05,
    "sources": [{"kind": "sine", "freq": 500, "trajectory_csv": "path.csv"}],
    "arrays": [{"name": "a", "offsets": [[0,0,0]], "trajectory": [{"t": 0, "position": [0,0,0]}]}]})";
  const Scene scene = load_scene(dir / "scene.json");
  CHECK(scene.sources[0].trajectory.keyframes().size() == 2);

  std::ofstream(dir / "bad.json") << R"({"duration": 0.05,
    "sources": [{"kind": "sine", "freq": 500, "trajectory_csv": "missing.csv"}]})";
  try {
    load_scene(dir / "bad.json");
    FAIL("expected a scene error");
  } catch (const SceneError& e) {
    CHECK(std::string(e.what()).find("missing.csv") != std::string::npos);
  }
  CHECK_THROWS_AS(load_scene(dir / "absent.json"), Error);
  std::filesystem::remove_all(dir);
}

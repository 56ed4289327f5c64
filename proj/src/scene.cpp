#include "wavefield/scene.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numbers>
#include <set>

#include "json.hpp"
#include "text_util.hpp"
#include "wavefield/error.hpp"
#include "wavefield/wav.hpp"

namespace wavefield {

using nlohmann::json;

namespace {

constexpr double kRadPerDeg = std::numbers::pi / 180.0;

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }
std::string key_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void require_object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw SceneError(path.empty() ? "$" : path, "expected an object");
  for (const auto& item : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; });
    if (!known) throw SceneError(key_path(path, item.key()), "unknown field");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SceneError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SceneError(path, "expected a finite number");
  return v;
}

double number_or(const json& obj, const char* key, double fallback, const std::string& path) {
  const auto it = obj.find(key);
  return it == obj.end() ? fallback : number(*it, key_path(path, key));
}

std::size_t count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw SceneError(path, "expected a non-negative integer");
  return static_cast<std::size_t>(j.get<long long>());
}

Vec3 vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw SceneError(path, "expected [x, y, z]");
  return {number(j[0], index_path(path, 0)), number(j[1], index_path(path, 1)), number(j[2], index_path(path, 2))};
}

const json& array_field(const json& obj, const char* key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw SceneError(key_path(path, key), "missing required field");
  if (!it->is_array()) throw SceneError(key_path(path, key), "expected an array");
  return *it;
}

std::string resolve(const std::filesystem::path& base_dir, const std::string& file) {
  const std::filesystem::path p(file);
  return (p.is_absolute() || base_dir.empty() ? p : base_dir / p).lexically_normal().string();
}

Trajectory parse_trajectory(const json& obj, const std::string& path, const std::filesystem::path& base_dir) {
  const bool inline_traj = obj.contains("trajectory");
  const bool csv_traj = obj.contains("trajectory_csv");
  if (inline_traj == csv_traj) {
    throw SceneError(key_path(path, "trajectory"), "exactly one of 'trajectory' or 'trajectory_csv' is required");
  }
  if (csv_traj) {
    const std::string field = key_path(path, "trajectory_csv");
    const json& ref = obj.at("trajectory_csv");
    if (!ref.is_string()) throw SceneError(field, "expected a file path");
    const std::string file = resolve(base_dir, ref.get<std::string>());
    try {
      return load_csv_file(file);
    } catch (const Error& e) {
      throw SceneError(field, e.what());
    }
  }

  const std::string field = key_path(path, "trajectory");
  const json& list = array_field(obj, "trajectory", path);
  if (list.empty()) throw SceneError(field, "needs at least one keyframe");
  std::vector<Keyframe> keyframes;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string kpath = index_path(field, i);
    const json& k = list[i];
    require_object(k, kpath, {"t", "position", "orientation"});
    if (!k.contains("t")) throw SceneError(key_path(kpath, "t"), "missing required field");
    if (!k.contains("position")) throw SceneError(key_path(kpath, "position"), "missing required field");
    Keyframe kf;
    kf.t = number(k.at("t"), key_path(kpath, "t"));
    kf.position = vec3(k.at("position"), key_path(kpath, "position"));
    if (k.contains("orientation")) {
      const Vec3 o = vec3(k.at("orientation"), key_path(kpath, "orientation"));
      kf.orientation = {o.x(), o.y(), o.z()};
    }
    if (!keyframes.empty() && !(kf.t > keyframes.back().t)) {
      throw SceneError(key_path(kpath, "t"), "keyframe times must be strictly increasing");
    }
    keyframes.push_back(kf);
  }
  return Trajectory(std::move(keyframes));
}

Source parse_source(const json& j, const std::string& path, const std::filesystem::path& base_dir) {
  require_object(j, path,
                 {"kind", "freq", "phase_deg", "file", "resample_to", "amplitude", "gain", "reference_distance",
                  "start_time", "trajectory", "trajectory_csv"});
  const auto kind_it = j.find("kind");
  if (kind_it == j.end() || !kind_it->is_string()) {
    throw SceneError(key_path(path, "kind"), "expected one of \"sine\", \"noise\", \"file\"");
  }
  const std::string kind = kind_it->get<std::string>();
  auto forbid = [&](std::initializer_list<const char*> keys) {
    for (const char* key : keys) {
      if (j.contains(key)) throw SceneError(key_path(path, key), "not valid for kind \"" + kind + "\"");
    }
  };

  Source src;
  const double amplitude = number_or(j, "amplitude", 1.0, path);
  if (kind == "sine") {
    forbid({"file", "resample_to"});
    if (!j.contains("freq")) throw SceneError(key_path(path, "freq"), "missing required field");
    src.kind = Sine{number(j.at("freq"), key_path(path, "freq")), amplitude,
                    number_or(j, "phase_deg", 0.0, path) * kRadPerDeg};
  } else if (kind == "noise") {
    forbid({"freq", "phase_deg", "file", "resample_to"});
    src.kind = WhiteNoise{0, amplitude, 48000.0};  // seed and rate set by refresh_noise_sources
  } else if (kind == "file") {
    forbid({"freq", "phase_deg"});
    const auto file_it = j.find("file");
    if (file_it == j.end() || !file_it->is_string()) throw SceneError(key_path(path, "file"), "expected a file path");
    FileSignal fs;
    fs.origin = resolve(base_dir, file_it->get<std::string>());
    fs.amplitude = amplitude;
    fs.resampled_to = number_or(j, "resample_to", 0.0, path);
    try {
      RenderOutput wav = read_mono_wav(fs.origin);
      fs.sample_rate_hz = wav.sample_rate;
      if (fs.resampled_to > 0.0) {
        wav.channels.front() = resample_file(wav.channels.front(), wav.sample_rate, fs.resampled_to);
        fs.sample_rate_hz = fs.resampled_to;
      }
      fs.samples = std::make_shared<const std::vector<double>>(std::move(wav.channels.front()));
    } catch (const Error& e) {
      throw SceneError(key_path(path, "file"), e.what());
    }
    src.kind = std::move(fs);
  } else {
    throw SceneError(key_path(path, "kind"), "unknown source kind \"" + kind + "\"");
  }
  src.gain = number_or(j, "gain", 1.0, path);
  src.reference_distance_m = number_or(j, "reference_distance", 1.0, path);
  src.start_time = number_or(j, "start_time", 0.0, path);
  src.trajectory = parse_trajectory(j, path, base_dir);
  try {
    check_source(src);
  } catch (const InvalidArgument& e) {
    throw SceneError(path, e.what());
  }
  return src;
}

MicrophoneArray parse_array(const json& j, const std::string& path, const std::filesystem::path& base_dir) {
  require_object(j, path, {"name", "offsets", "trajectory", "trajectory_csv"});
  MicrophoneArray arr;
  const auto name_it = j.find("name");
  if (name_it == j.end() || !name_it->is_string()) throw SceneError(key_path(path, "name"), "expected a string");
  arr.name = name_it->get<std::string>();
  const std::string opath = key_path(path, "offsets");
  const json& offsets = array_field(j, "offsets", path);
  arr.offsets.clear();
  for (std::size_t i = 0; i < offsets.size(); ++i) arr.offsets.push_back(vec3(offsets[i], index_path(opath, i)));
  arr.trajectory = parse_trajectory(j, path, base_dir);
  return arr;
}

json trajectory_json(const Trajectory& traj) {
  json list = json::array();
  for (const Keyframe& k : traj.keyframes()) {
    json kf = {{"t", k.t}, {"position", {k.position.x(), k.position.y(), k.position.z()}}};
    if (!(k.orientation == Orientation{})) {
      kf["orientation"] = {k.orientation.yaw, k.orientation.pitch, k.orientation.roll};
    }
    list.push_back(std::move(kf));
  }
  return list;
}

bool safe_file_stem(const std::string& name) {
  if (name.empty() || name == "." || name == "..") return false;
  return std::all_of(name.begin(), name.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.';
  });
}

}  // namespace

std::size_t Scene::n_samples() const {
  if (!(duration > 0.0 && sample_rate > 0.0)) return 0;
  return static_cast<std::size_t>(std::llround(duration * sample_rate));
}

RenderSettings Scene::render_settings() const {
  RenderSettings s;
  s.sample_rate = sample_rate;
  s.n_samples = n_samples();
  s.block_size = block_size;
  s.fir_taps = fir_taps;
  s.air_absorption = air_absorption;
  return s;
}

void refresh_noise_sources(Scene& scene) {
  for (std::size_t i = 0; i < scene.sources.size(); ++i) {
    if (auto* noise = std::get_if<WhiteNoise>(&scene.sources[i].kind)) {
      noise->seed = derive_seed(scene.seed, i);
      noise->rate_hz = scene.sample_rate;
    }
  }
}

Scene parse_scene(std::string_view text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SceneError("$", std::string("invalid JSON: ") + e.what());
  }
  require_object(root, "",
                 {"atmosphere", "sample_rate", "duration", "seed", "sources", "arrays", "planes", "render"});

  Scene scene;
  if (root.contains("atmosphere")) {
    const json& a = root.at("atmosphere");
    require_object(a, "atmosphere", {"temperature_c", "pressure_kpa", "relative_humidity"});
    try {
      scene.atmosphere = Atmosphere::from_celsius(number_or(a, "temperature_c", 20.0, "atmosphere"),
                                                  number_or(a, "pressure_kpa", iso::kReferencePressureKPa, "atmosphere"),
                                                  number_or(a, "relative_humidity", 0.5, "atmosphere"));
    } catch (const InvalidArgument& e) {
      throw SceneError("atmosphere", e.what());
    }
  }
  scene.sample_rate = number_or(root, "sample_rate", scene.sample_rate, "");
  if (!root.contains("duration")) throw SceneError("duration", "missing required field");
  scene.duration = number(root.at("duration"), "duration");
  if (root.contains("seed")) {
    const json& s = root.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw SceneError("seed", "expected a non-negative integer");
    }
    scene.seed = s.get<std::uint64_t>();
  }
  if (root.contains("render")) {
    const json& r = root.at("render");
    require_object(r, "render", {"block_size", "fir_taps", "air_absorption"});
    if (r.contains("block_size")) scene.block_size = count(r.at("block_size"), "render.block_size");
    if (r.contains("fir_taps")) scene.fir_taps = count(r.at("fir_taps"), "render.fir_taps");
    if (r.contains("air_absorption")) {
      if (!r.at("air_absorption").is_boolean()) throw SceneError("render.air_absorption", "expected true or false");
      scene.air_absorption = r.at("air_absorption").get<bool>();
    }
  }

  if (root.contains("sources")) {
    const json& list = array_field(root, "sources", "");
    for (std::size_t i = 0; i < list.size(); ++i) {
      scene.sources.push_back(parse_source(list[i], index_path("sources", i), base_dir));
    }
  }
  if (root.contains("arrays")) {
    const json& list = array_field(root, "arrays", "");
    for (std::size_t i = 0; i < list.size(); ++i) {
      scene.arrays.push_back(parse_array(list[i], index_path("arrays", i), base_dir));
    }
  }
  if (root.contains("planes")) {
    const json& list = array_field(root, "planes", "");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = index_path("planes", i);
      const json& p = list[i];
      require_object(p, path, {"point", "normal", "reflection"});
      if (!p.contains("point")) throw SceneError(key_path(path, "point"), "missing required field");
      if (!p.contains("normal")) throw SceneError(key_path(path, "normal"), "missing required field");
      Reflector r;
      r.point = vec3(p.at("point"), key_path(path, "point"));
      r.normal = vec3(p.at("normal"), key_path(path, "normal"));
      r.reflection = number_or(p, "reflection", 1.0, path);
      scene.planes.push_back(r);
    }
  }
  refresh_noise_sources(scene);
  return scene;
}

Scene load_scene(const std::filesystem::path& path) {
  std::string text;
  try {
    text = detail::read_text_file(path.string());
  } catch (const IoError& e) {
    throw SceneError(path.string(), e.what());
  }
  return parse_scene(text, path.parent_path());
}

std::string serialize_scene(const Scene& scene) {
  json root;
  root["atmosphere"] = {{"temperature_c", scene.atmosphere.temperature_c()},
                        {"pressure_kpa", scene.atmosphere.pressure_kpa()},
                        {"relative_humidity", scene.atmosphere.relative_humidity()}};
  root["sample_rate"] = scene.sample_rate;
  root["duration"] = scene.duration;
  root["seed"] = scene.seed;
  root["render"] = {{"block_size", scene.block_size},
                    {"fir_taps", scene.fir_taps},
                    {"air_absorption", scene.air_absorption}};

  json sources = json::array();
  for (const Source& src : scene.sources) {
    json s;
    std::visit(
        [&s](const auto& sig) {
          using T = std::decay_t<decltype(sig)>;
          if constexpr (std::is_same_v<T, Sine>) {
            s["kind"] = "sine";
            s["freq"] = sig.frequency_hz;
            s["phase_deg"] = sig.phase_rad / kRadPerDeg;
            s["amplitude"] = sig.amplitude;
          } else if constexpr (std::is_same_v<T, WhiteNoise>) {
            s["kind"] = "noise";
            s["amplitude"] = sig.amplitude;
          } else {
            s["kind"] = "file";
            s["file"] = sig.origin;
            s["amplitude"] = sig.amplitude;
            if (sig.resampled_to > 0.0) s["resample_to"] = sig.resampled_to;
          }
        },
        src.kind);
    s["gain"] = src.gain;
    s["reference_distance"] = src.reference_distance_m;
    s["start_time"] = src.start_time;
    s["trajectory"] = trajectory_json(src.trajectory);
    sources.push_back(std::move(s));
  }
  root["sources"] = std::move(sources);

  json arrays = json::array();
  for (const MicrophoneArray& arr : scene.arrays) {
    json offsets = json::array();
    for (const Vec3& o : arr.offsets) offsets.push_back({o.x(), o.y(), o.z()});
    arrays.push_back({{"name", arr.name}, {"offsets", std::move(offsets)}, {"trajectory", trajectory_json(arr.trajectory)}});
  }
  root["arrays"] = std::move(arrays);

  json planes = json::array();
  for (const Reflector& r : scene.planes) {
    planes.push_back({{"point", {r.point.x(), r.point.y(), r.point.z()}},
                      {"normal", {r.normal.x(), r.normal.y(), r.normal.z()}},
                      {"reflection", r.reflection}});
  }
  root["planes"] = std::move(planes);
  return root.dump(2) + "\n";
}

std::vector<std::string> validate(const Scene& scene) {
  std::vector<std::string> diags;
  auto add = [&diags](const std::string& path, const std::string& what) { diags.push_back(path + ": " + what); };

  if (!(scene.duration > 0.0 && std::isfinite(scene.duration))) {
    add("duration", "render duration must be positive, got " + detail::format_double(scene.duration));
  }
  if (!(scene.sample_rate > 0.0 && std::isfinite(scene.sample_rate))) {
    add("sample_rate", "must be positive, got " + detail::format_double(scene.sample_rate));
  } else if (scene.duration > 0.0 && scene.n_samples() == 0) {
    add("duration", "shorter than one sample");
  }
  if (scene.block_size == 0) add("render.block_size", "must be positive");
  if (scene.fir_taps < 3 || scene.fir_taps % 2 == 0) add("render.fir_taps", "must be odd and at least 3");

  const double c = speed_of_sound(scene.atmosphere);
  for (std::size_t i = 0; i < scene.sources.size(); ++i) {
    const std::string path = index_path("sources", i);
    const Source& src = scene.sources[i];
    try {
      check_source(src);
    } catch (const InvalidArgument& e) {
      add(path, e.what());
    }
    const auto& kf = src.trajectory.keyframes();
    for (std::size_t k = 0; k + 1 < kf.size(); ++k) {
      const double dt = kf[k + 1].t - kf[k].t;
      if (!(dt > 0.0)) {
        add(index_path(path + ".trajectory", k + 1), "keyframe times must be strictly increasing");
        continue;
      }
      const double speed = (kf[k + 1].position - kf[k].position).norm() / dt;
      if (!(speed < c)) {
        add(path + ".trajectory",
            "segment " + std::to_string(k) + " (t=" + detail::format_double(kf[k].t) + " to " +
                detail::format_double(kf[k + 1].t) + ") is supersonic: " + detail::format_double(speed) +
                " m/s, Mach " + detail::format_double(speed / c) + " at c=" + detail::format_double(c) + " m/s");
      }
    }
  }

  if (scene.arrays.empty()) add("arrays", "at least one microphone array is required");
  std::set<std::string> names;
  for (std::size_t i = 0; i < scene.arrays.size(); ++i) {
    const std::string path = index_path("arrays", i);
    const MicrophoneArray& arr = scene.arrays[i];
    if (!safe_file_stem(arr.name)) {
      add(path + ".name", "'" + arr.name + "' is not a usable file name (letters, digits, '_', '-', '.')");
    } else if (!names.insert(arr.name).second) {
      add(path + ".name", "duplicate array name '" + arr.name + "'");
    }
    try {
      check_array(arr);
    } catch (const InvalidArgument& e) {
      add(path + ".offsets", e.what());
    }
  }

  for (std::size_t i = 0; i < scene.planes.size(); ++i) {
    const std::string path = index_path("planes", i);
    const Reflector& r = scene.planes[i];
    const double len = r.normal.norm();
    if (!(len > 0.0 && std::isfinite(len))) add(path + ".normal", "normal has zero length");
    if (!r.point.allFinite()) add(path + ".point", "must be finite");
    if (!(r.reflection >= 0.0 && r.reflection <= 1.0)) {
      add(path + ".reflection", "must lie in [0, 1], got " + detail::format_double(r.reflection));
    }
  }
  return diags;
}

std::vector<PathSource> build_image_sources(const Scene& scene) {
  std::vector<PathSource> paths;
  paths.reserve(scene.sources.size() * (1 + scene.planes.size()));
  for (std::size_t i = 0; i < scene.sources.size(); ++i) {
    const Source& src = scene.sources[i];
    paths.push_back({src, PathKind::direct(), i});
    for (std::size_t p = 0; p < scene.planes.size(); ++p) {
      const Plane plane(scene.planes[p].point, scene.planes[p].normal);
      Source image = src;
      image.trajectory = mirror(src.trajectory, plane);
      image.gain *= scene.planes[p].reflection;
      paths.push_back({std::move(image), PathKind::image(static_cast<int>(p)), i});
    }
  }
  return paths;
}

}  // namespace wavefield

#include "wavefield/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "text_util.hpp"
#include "wavefield/analysis.hpp"
#include "wavefield/array.hpp"
#include "wavefield/atmosphere.hpp"
#include "wavefield/error.hpp"
#include "wavefield/kinematics.hpp"
#include "wavefield/propagation.hpp"
#include "wavefield/scene.hpp"
#include "wavefield/wav.hpp"

namespace wavefield::cli {

namespace {

using detail::format_double;

constexpr double kThirdOctaveCenters[] = {20,   25,   31.5, 40,   50,   63,    80,    100,   125,   160,  200,
                                          250,  315,  400,  500,  630,  800,   1000,  1250,  1600,  2000, 2500,
                                          3150, 4000, 5000, 6300, 8000, 10000, 12500, 16000, 20000};

CommandOutcome fail(int code, std::string message) { return {code, {std::move(message)}}; }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write '" + path + "'");
  file << text;
  file.close();
  if (!file) throw IoError("failed writing '" + path + "'");
}

// Routes CSV either to a file or to the given stream.
class CsvSink {
 public:
  CsvSink(const std::string& path, std::ostream& fallback) : path_(path), fallback_(fallback) {}
  std::ostream& stream() { return path_.empty() ? fallback_ : buffer_; }
  void finish() {
    if (!path_.empty()) write_text(path_, buffer_.str());
  }

 private:
  std::string path_;
  std::ostream& fallback_;
  std::ostringstream buffer_;
};

std::vector<Vec3> parse_offsets(const std::string& text) {
  std::vector<Vec3> offsets;
  for (auto item : detail::split(text, ';')) {
    item = detail::trim(item);
    if (item.empty()) continue;
    const auto parts = detail::split(item, ',');
    if (parts.size() != 3) throw InvalidArgument("offset '" + std::string(item) + "' is not x,y,z");
    Vec3 v;
    for (int i = 0; i < 3; ++i) {
      const auto value = detail::parse_double(parts[static_cast<std::size_t>(i)]);
      if (!value) throw InvalidArgument("offset '" + std::string(item) + "' is not numeric");
      v[i] = *value;
    }
    offsets.push_back(v);
  }
  return offsets;
}

const std::vector<double>& channel_or_throw(const RenderOutput& wav, std::size_t index) {
  if (index >= wav.channels.size()) {
    throw InvalidArgument("channel " + std::to_string(index) + " out of range (file has " +
                          std::to_string(wav.channels.size()) + ")");
  }
  return wav.channels[index];
}

void analyze_doa(const AnalyzeOptions& o, const RenderOutput& wav, std::ostream& csv) {
  std::vector<Vec3> offsets;
  double c = o.speed_of_sound > 0.0 ? o.speed_of_sound : iso::kReferenceSpeedOfSound;
  std::optional<Scene> scene;
  const MicrophoneArray* array = nullptr;
  if (!o.scene_path.empty()) {
    scene = load_scene(o.scene_path);
    if (scene->arrays.empty()) throw InvalidArgument("scene has no arrays");
    if (o.array_name.empty()) {
      array = &scene->arrays.front();
    } else {
      const auto it = std::find_if(scene->arrays.begin(), scene->arrays.end(),
                                   [&](const MicrophoneArray& a) { return a.name == o.array_name; });
      if (it == scene->arrays.end()) throw InvalidArgument("scene has no array named '" + o.array_name + "'");
      array = &*it;
    }
    offsets = array->offsets;
    if (o.speed_of_sound <= 0.0) c = speed_of_sound(scene->atmosphere);
    if (o.source_index >= scene->sources.size()) {
      throw InvalidArgument("source index " + std::to_string(o.source_index) + " out of range");
    }
  } else {
    offsets = parse_offsets(o.offsets);
  }
  if (offsets.size() != wav.channels.size()) {
    throw InvalidArgument("array has " + std::to_string(offsets.size()) + " microphones but the file has " +
                          std::to_string(wav.channels.size()) + " channels");
  }
  if (o.window == 0 || o.hop == 0) throw InvalidArgument("window and hop must be positive");

  csv << "time_s,theta_true_deg,theta_est_deg\n";
  for (std::size_t start = 0; start + o.window <= wav.n_samples(); start += o.hop) {
    const double t = (static_cast<double>(start) + 0.5 * static_cast<double>(o.window)) / wav.sample_rate;
    double truth = std::numeric_limits<double>::quiet_NaN();
    if (scene) {
      const Vec3 center = array->trajectory.position_at(t);
      const auto sol = solve_emission(scene->sources[o.source_index].trajectory, center, t, c);
      const Vec3 rel = sol.emission_position - center;
      if (rel.y() > 0.0) truth = ground_truth_angle(rel.x(), rel.y());
    }
    double estimate = std::numeric_limits<double>::quiet_NaN();
    try {
      estimate = doa_azimuth(wav, offsets, start, o.window, c);
    } catch (const InvalidArgument&) {
      // silent frame
    }
    csv << format_double(t) << ',' << format_double(truth) << ',' << format_double(estimate) << '\n';
  }
}

}  // namespace

CommandOutcome cmd_simulate(const SimulateOptions& options) {
  Scene scene;
  try {
    scene = load_scene(options.scene_path);
  } catch (const Error& e) {
    return fail(kExitInput, e.what());
  }
  if (options.sample_rate) scene.sample_rate = *options.sample_rate;
  if (options.duration) scene.duration = *options.duration;
  if (options.seed) scene.seed = *options.seed;
  refresh_noise_sources(scene);

  CommandOutcome outcome;
  const auto diagnostics = validate(scene);
  if (!diagnostics.empty()) {
    outcome.exit_code = kExitInput;
    outcome.messages = diagnostics;
    return outcome;
  }

  try {
    std::filesystem::create_directories(options.out_dir);
    write_text((std::filesystem::path(options.out_dir) / "effective_scene.json").string(), serialize_scene(scene));
    RenderOptions render_options;
    render_options.threads = options.threads;
    for (const MicrophoneArray& arr : scene.arrays) {
      const RenderOutput out = render_array(scene, arr, render_options);
      const std::string path = (std::filesystem::path(options.out_dir) / (arr.name + ".wav")).string();
      write_wav(out, path, options.pcm16 ? WavFormat::Pcm16 : WavFormat::Float32);
      double peak = 0.0;
      for (const auto& ch : out.channels) {
        for (double v : ch) peak = std::max(peak, std::abs(v));
      }
      const double peak_db = peak > 0.0 ? 20.0 * std::log10(peak) : kMagnitudeFloorDb;
      outcome.messages.push_back(path + ": " + std::to_string(out.channels.size()) + " channel(s), " +
                                 format_double(static_cast<double>(out.n_samples()) / out.sample_rate) +
                                 " s, peak " + format_double(std::round(peak_db * 100.0) / 100.0) + " dBFS");
    }
  } catch (const std::exception& e) {
    outcome.exit_code = kExitRender;
    outcome.messages.push_back(std::string("render failed: ") + e.what());
  }
  return outcome;
}

CommandOutcome cmd_absorption_table(const AbsorptionTableOptions& options, std::ostream& out) {
  Atmosphere atm;
  try {
    atm = Atmosphere::from_celsius(options.temperature_c, options.pressure_kpa, options.humidity);
  } catch (const InvalidArgument& e) {
    return fail(kExitInput, e.what());
  }
  std::vector<double> freqs = options.frequencies;
  if (freqs.empty()) freqs.assign(std::begin(kThirdOctaveCenters), std::end(kThirdOctaveCenters));
  for (double f : freqs) {
    if (!(f >= 0.0 && std::isfinite(f))) return fail(kExitInput, "frequency must be non-negative: " + format_double(f));
  }
  out << "frequency_hz,alpha_total_db_per_m,alpha_oxygen_db_per_m,alpha_nitrogen_db_per_m,alpha_classical_db_per_m\n";
  for (double f : freqs) {
    const AbsorptionTerms t = absorption_terms(f, atm);
    out << format_double(f) << ',' << format_double(t.total()) << ',' << format_double(t.oxygen) << ','
        << format_double(t.nitrogen) << ',' << format_double(t.classical) << '\n';
  }
  return {};
}

CommandOutcome cmd_path_interpolate(const std::string& csv_in, double dt, const std::string& csv_out,
                                    std::ostream& out) {
  Trajectory dense = Trajectory::stationary(Vec3::Zero());
  try {
    dense = densify(load_csv_file(csv_in), dt);
  } catch (const Error& e) {
    return fail(kExitInput, e.what());
  }
  try {
    CsvSink sink(csv_out, out);
    sink.stream() << to_csv(dense);
    sink.finish();
  } catch (const IoError& e) {
    return fail(kExitInput, e.what());
  }
  return {0, {std::to_string(dense.keyframes().size()) + " keyframes"}};
}

CommandOutcome cmd_analyze(const AnalyzeOptions& o, std::ostream& out) {
  RenderOutput wav;
  try {
    wav = read_wav(o.wav_path);
  } catch (const Error& e) {
    return fail(kExitInput, e.what());
  }
  try {
    CsvSink sink(o.out_path, out);
    std::ostream& csv = sink.stream();
    if (o.kind == "fft") {
      const auto frame = fft_magnitude(channel_or_throw(wav, o.channel), wav.sample_rate);
      csv << "frequency_hz,magnitude_db\n";
      for (std::size_t k = 0; k < frame.frequencies.size(); ++k) {
        csv << format_double(frame.frequencies[k]) << ',' << format_double(frame.magnitudes_db[k]) << '\n';
      }
    } else if (o.kind == "spectrogram") {
      const auto frames = spectrogram(channel_or_throw(wav, o.channel), wav.sample_rate, o.window, o.hop);
      csv << "time_s,frequency_hz,magnitude_db\n";
      for (const auto& frame : frames) {
        const std::string t = format_double(frame.time);
        for (std::size_t k = 0; k < frame.frequencies.size(); ++k) {
          csv << t << ',' << format_double(frame.frequencies[k]) << ',' << format_double(frame.magnitudes_db[k])
              << '\n';
        }
      }
    } else if (o.kind == "tdoa") {
      const double tdoa = gcc_phat_tdoa(channel_or_throw(wav, o.channel), channel_or_throw(wav, o.channel_b),
                                        wav.sample_rate, o.max_delay);
      csv << "channel_a,channel_b,tdoa_s,tdoa_samples\n"
          << o.channel << ',' << o.channel_b << ',' << format_double(tdoa) << ','
          << format_double(tdoa * wav.sample_rate) << '\n';
    } else if (o.kind == "doa") {
      analyze_doa(o, wav, csv);
    } else {
      return fail(kExitInput, "unknown analysis '" + o.kind + "' (expected fft, spectrogram, tdoa or doa)");
    }
    sink.finish();
  } catch (const Error& e) {
    return fail(kExitInput, e.what());
  }
  return {};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"wavefield: time-domain acoustic propagation for moving sources and microphone arrays"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "wavefield 0.1.0");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Render a scene to one WAV file per array");
  simulate->add_option("scene", sim.scene_path, "Scene JSON file")->required();
  simulate->add_option("-o,--out", sim.out_dir, "Output directory")->capture_default_str();
  double sr = 0.0, dur = 0.0;
  std::uint64_t seed = 0;
  auto* sr_opt = simulate->add_option("--sample-rate", sr, "Override the scene sample rate");
  auto* dur_opt = simulate->add_option("--duration", dur, "Override the scene duration (s)");
  auto* seed_opt = simulate->add_option("--seed", seed, "Override the scene seed");
  simulate->add_option("--threads", sim.threads, "Worker threads (default: WAVEFIELD_THREADS or all cores)");
  simulate->add_flag("--pcm16", sim.pcm16, "Write 16-bit PCM instead of 32-bit float");

  AbsorptionTableOptions abs;
  auto* table = app.add_subcommand("absorption-table", "Tabulate air absorption and its components (dB/m)");
  table->add_option("--temperature-c", abs.temperature_c)->capture_default_str();
  table->add_option("--pressure-kpa", abs.pressure_kpa)->capture_default_str();
  table->add_option("--humidity", abs.humidity, "Relative humidity as a fraction")->capture_default_str();
  table->add_option("--freqs", abs.frequencies, "Frequencies in Hz (default: third-octave centers)")->delimiter(',');

  std::string path_in, path_out;
  double dt = 0.1;
  auto* interp = app.add_subcommand("path-interpolate", "Densify a trajectory CSV");
  interp->add_option("input", path_in, "Trajectory CSV")->required();
  interp->add_option("--dt", dt, "Keyframe spacing in seconds")->capture_default_str();
  interp->add_option("-o,--out", path_out, "Output CSV (default: stdout)");

  AnalyzeOptions an;
  auto* analyze = app.add_subcommand("analyze", "Analyze a rendered WAV file");
  analyze->add_option("kind", an.kind, "fft | spectrogram | tdoa | doa")
      ->required()
      ->check(CLI::IsMember({"fft", "spectrogram", "tdoa", "doa"}));
  analyze->add_option("wav", an.wav_path, "WAV file")->required();
  analyze->add_option("-o,--out", an.out_path, "Output CSV (default: stdout)");
  analyze->add_option("--channel", an.channel, "Channel for fft/spectrogram")->capture_default_str();
  std::vector<std::size_t> pair;
  analyze->add_option("--channels", pair, "Channel pair for tdoa, e.g. 0,1")->delimiter(',')->expected(2);
  analyze->add_option("--window", an.window, "Window length (spectrogram, doa)")->capture_default_str();
  analyze->add_option("--hop", an.hop, "Hop length (spectrogram, doa)")->capture_default_str();
  analyze->add_option("--max-delay", an.max_delay, "Largest |tdoa| searched, seconds")->capture_default_str();
  analyze->add_option("--scene", an.scene_path, "Scene giving array offsets and ground truth (doa)");
  analyze->add_option("--array", an.array_name, "Array name in the scene (doa)");
  analyze->add_option("--source", an.source_index, "Source index for ground truth (doa)");
  analyze->add_option("--offsets", an.offsets, "Offsets 'x,y,z;x,y,z;...' when no scene is given (doa)");
  analyze->add_option("--c", an.speed_of_sound, "Speed of sound override, m/s (doa)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  CommandOutcome outcome;
  if (simulate->parsed()) {
    if (sr_opt->count() > 0) sim.sample_rate = sr;
    if (dur_opt->count() > 0) sim.duration = dur;
    if (seed_opt->count() > 0) sim.seed = seed;
    outcome = cmd_simulate(sim);
  } else if (table->parsed()) {
    outcome = cmd_absorption_table(abs, out);
  } else if (interp->parsed()) {
    outcome = cmd_path_interpolate(path_in, dt, path_out, out);
  } else if (analyze->parsed()) {
    if (!pair.empty()) {
      an.channel = pair[0];
      an.channel_b = pair[1];
    }
    outcome = cmd_analyze(an, out);
  }
  for (const auto& m : outcome.messages) err << m << '\n';
  return outcome.exit_code;
}

}  // namespace wavefield::cli

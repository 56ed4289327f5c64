#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wavefield::cli {

/// Stable exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitRender = 3;

struct CommandOutcome {
  int exit_code = kExitOk;
  std::vector<std::string> messages;
};

struct SimulateOptions {
  std::string scene_path;
  std::string out_dir = ".";
  std::optional<double> sample_rate;
  std::optional<double> duration;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;  // 0: WAVEFIELD_THREADS or hardware concurrency
  bool pcm16 = false;
};

/// parse -> validate -> image sources -> render each array -> `<out_dir>/<array>.wav`.
/// Also writes `<out_dir>/effective_scene.json` with overrides applied.
CommandOutcome cmd_simulate(const SimulateOptions& options);

struct AbsorptionTableOptions {
  double temperature_c = 20.0;
  double pressure_kpa = 101.325;
  double humidity = 0.5;
  /// Empty: nominal third-octave centers from 20 Hz to 20 kHz.
  std::vector<double> frequencies;
};

/// CSV `frequency_hz,alpha_total_db_per_m,alpha_oxygen_db_per_m,alpha_nitrogen_db_per_m,alpha_classical_db_per_m`.
CommandOutcome cmd_absorption_table(const AbsorptionTableOptions& options, std::ostream& out);

/// Densified trajectory CSV to `csv_out`, or to `out` when `csv_out` is empty.
CommandOutcome cmd_path_interpolate(const std::string& csv_in, double dt, const std::string& csv_out,
                                    std::ostream& out);

struct AnalyzeOptions {
  std::string kind;  // fft | spectrogram | tdoa | doa
  std::string wav_path;
  std::string out_path;  // empty: write to the stream
  std::size_t channel = 0;
  std::size_t channel_b = 1;
  std::size_t window = 1024;
  std::size_t hop = 256;
  double max_delay = 0.01;
  // doa
  std::string scene_path;
  std::string array_name;
  std::size_t source_index = 0;
  std::string offsets;  // "x,y,z;x,y,z;..." when no scene is given
  double speed_of_sound = 0.0;  // 0: from the scene atmosphere, else 343.2
};

CommandOutcome cmd_analyze(const AnalyzeOptions& options, std::ostream& out);

/// Full command-line front end; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wavefield::cli

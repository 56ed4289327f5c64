#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "golden.hpp"
#include "test_helpers.hpp"
#include "text_util.hpp"
#include "wavefield/kinematics.hpp"
#include "wavefield/wav.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("wavefield_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run wavefield_cli(const std::string& args, const std::string& env = {}) {
  const fs::path out = scratch() / "stdout.txt";
  const fs::path err = scratch() / "stderr.txt";
  const std::string cmd = env + " '" + std::string(WAVEFIELD_CLI_PATH) + "' " + args + " >'" + out.string() + "' 2>'" +
                          err.string() + "'";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::string scene(const std::string& name) { return std::string(WAVEFIELD_SOURCE_DIR) + "/scenes/" + name; }

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    for (auto c : wavefield::detail::split(line, ',')) cells.emplace_back(c);
    rows.push_back(cells);
  }
  return rows;
}

double num(const std::string& s) { return std::stod(s); }

}  // namespace

TEST_CASE("simulate writes one WAV per array with the expected onset") {
  const fs::path dir = scratch() / "static";
  const Run r = wavefield_cli("simulate '" + scene("static_delay.json") + "' -o '" + dir.string() + "'");
  REQUIRE(r.code == 0);
  CHECK(r.err.find("mic.wav") != std::string::npos);
  CHECK(fs::exists(dir / "effective_scene.json"));
  const auto wav = wavefield::read_wav((dir / "mic.wav").string());
  REQUIRE(wav.channels.size() == 1);
  CHECK(wav.n_samples() == 3 * 48000);
  const double coarse = testing::tone_onset(wav.channels[0], 2000.0, 48000.0, 72000, 120000);
  CHECK(std::abs(coarse - 48000.0) <= 2.0);
  CHECK(std::abs(testing::carrier_phase_onset(wav.channels[0], 2000.0, 48000.0, 72000, 120000, 0.0, coarse) - 48000.0) <=
        1.0);
}

TEST_CASE("simulate overrides, determinism and threads") {
  const std::string src = scene("ground_comb.json");
  const Run a = wavefield_cli("simulate '" + src + "' -o '" + (scratch() / "s1").string() + "' --seed 9 --duration 1");
  const Run b = wavefield_cli("simulate '" + src + "' -o '" + (scratch() / "s2").string() + "' --seed 9 --duration 1",
                              "WAVEFIELD_THREADS=3");
  const Run c = wavefield_cli("simulate '" + src + "' -o '" + (scratch() / "s3").string() + "' --seed 10 --duration 1 --threads 2");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  REQUIRE(c.code == 0);
  CHECK(slurp(scratch() / "s1/mic.wav") == slurp(scratch() / "s2/mic.wav"));
  CHECK(slurp(scratch() / "s1/mic.wav") != slurp(scratch() / "s3/mic.wav"));
  const std::string effective = slurp(scratch() / "s1/effective_scene.json");
  CHECK(effective.find("\"seed\": 9") != std::string::npos);
  CHECK(effective.find("\"duration\": 1.0") != std::string::npos);
}

TEST_CASE("simulate exit codes") {
  const Run missing = wavefield_cli("simulate /no/such/scene.json -o '" + scratch().string() + "'");
  CHECK(missing.code == 2);
  CHECK(missing.err.find("/no/such/scene.json") != std::string::npos);

  const fs::path fast = scratch() / "fast.json";
  std::ofstream(fast) << R"({"duration": 0.1,
    "sources": [{"kind": "sine", "freq": 100, "trajectory": [{"t": 0, "position": [0,0,0]}, {"t": 1, "position": [400,0,0]}]}],
    "arrays": [{"name": "m", "offsets": [[0,0,0]], "trajectory": [{"t": 0, "position": [0,5,0]}]}]})";
  const Run super = wavefield_cli("simulate '" + fast.string() + "' -o '" + scratch().string() + "'");
  CHECK(super.code == 2);
  CHECK(super.err.find("supersonic") != std::string::npos);

  const Run blocked = wavefield_cli("simulate '" + scene("static_delay.json") + "' -o /proc/forbidden");
  CHECK(blocked.code == 3);

  CHECK(wavefield_cli("").code == 2);
  CHECK(wavefield_cli("frobnicate").code == 2);
}

TEST_CASE("absorption table") {
  const Run r = wavefield_cli("absorption-table --freqs 0,1000,4000");
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0][0] == "frequency_hz");
  for (std::size_t i = 1; i < 5; ++i) CHECK(num(rows[1][i]) == 0.0);
  CHECK(std::abs(num(rows[2][1]) / golden::kAlpha1k - 1.0) <= 1e-12);
  for (std::size_t r2 = 1; r2 < rows.size(); ++r2) {
    const double sum = num(rows[r2][2]) + num(rows[r2][3]) + num(rows[r2][4]);
    CHECK(std::abs(sum - num(rows[r2][1])) <= 1e-12 * std::max(1.0, num(rows[r2][1])));
  }
  CHECK(csv_rows(wavefield_cli("absorption-table").out).size() == 32);
  CHECK(wavefield_cli("absorption-table --humidity 2").code == 2);
}

TEST_CASE("path interpolation") {
  const std::string coarse = std::string(WAVEFIELD_SOURCE_DIR) + "/scenes/paths/orbit_1hz.csv";
  const Run same = wavefield_cli("path-interpolate '" + coarse + "' --dt 100");
  REQUIRE(same.code == 0);
  CHECK(csv_rows(same.out).size() == 12);

  const fs::path dense_path = scratch() / "dense.csv";
  const Run dense = wavefield_cli("path-interpolate '" + coarse + "' --dt 0.1 -o '" + dense_path.string() + "'");
  REQUIRE(dense.code == 0);
  const auto original = wavefield::load_csv_file(coarse);
  const auto refined = wavefield::load_csv_file(dense_path.string());
  CHECK(refined.keyframes().size() == 101);
  for (double t = -0.5; t < 11.0; t += 0.0137) {
    CHECK(refined.position_at(t).isApprox(original.position_at(t), 1e-12));
  }
  CHECK(wavefield_cli("path-interpolate /missing.csv").code == 2);
}

TEST_CASE("analyze") {
  const fs::path dir = scratch() / "analyze";
  REQUIRE(wavefield_cli("simulate '" + scene("static_delay.json") + "' -o '" + dir.string() + "'").code == 0);
  const Run fft = wavefield_cli("analyze fft '" + (dir / "mic.wav").string() + "'");
  REQUIRE(fft.code == 0);
  const auto rows = csv_rows(fft.out);
  std::size_t best = 1;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (num(rows[i][1]) > num(rows[best][1])) best = i;
  }
  CHECK(std::abs(num(rows[best][0]) - 2000.0) <= 48000.0 / (3 * 48000));

  const Run spec = wavefield_cli("analyze spectrogram '" + (dir / "mic.wav").string() + "' --window 512 --hop 512");
  REQUIRE(spec.code == 0);
  CHECK(csv_rows(spec.out).front() == std::vector<std::string>{"time_s", "frequency_hz", "magnitude_db"});

  const fs::path pair = scratch() / "pair.json";
  std::ofstream(pair) << R"({"duration": 0.6, "seed": 2,
    "sources": [{"kind": "noise", "trajectory": [{"t": 0, "position": [0, 100, 0]}]}],
    "arrays": [{"name": "pair", "offsets": [[0.5,0,0],[-0.5,0,0]], "trajectory": [{"t": 0, "position": [0,0,0]}]}]})";
  REQUIRE(wavefield_cli("simulate '" + pair.string() + "' -o '" + dir.string() + "'").code == 0);
  const Run tdoa = wavefield_cli("analyze tdoa '" + (dir / "pair.wav").string() + "' --channels 0,1");
  REQUIRE(tdoa.code == 0);
  CHECK(std::abs(num(csv_rows(tdoa.out)[1][3])) <= 1.0);

  CHECK(wavefield_cli("analyze fft /missing.wav").code == 2);
  CHECK(wavefield_cli("analyze tdoa '" + (dir / "mic.wav").string() + "' --channels 0,1").code == 2);
}

TEST_CASE("analyze doa tracks the pass") {
  const fs::path dir = scratch() / "doa";
  REQUIRE(wavefield_cli("simulate '" + scene("vehicle_doa.json") + "' -o '" + dir.string() + "'").code == 0);
  const Run doa = wavefield_cli("analyze doa '" + (dir / "ring.wav").string() + "' --scene '" +
                                scene("vehicle_doa.json") + "' --window 4096 --hop 2400");
  REQUIRE(doa.code == 0);
  const auto rows = csv_rows(doa.out);
  REQUIRE(rows.size() > 50);
  CHECK(rows[0] == std::vector<std::string>{"time_s", "theta_true_deg", "theta_est_deg"});
  // Frames before the first arrival report nan.
  std::size_t k = 1;
  while (k < rows.size() && std::isnan(num(rows[k][2]))) ++k;
  REQUIRE(k < 10);
  const auto first = num(rows[k][2]);
  const auto last = num(rows.back()[2]);
  CHECK(first > 165.0);
  CHECK(last < 15.0);
  // Offsets given on the command line instead of a scene give the same estimates.
  const Run manual = wavefield_cli("analyze doa '" + (dir / "ring.wav").string() +
                                   "' --offsets '0.02,0,0;0,0.02,0;-0.02,0,0;0,-0.02,0' --window 4096 --hop 2400");
  REQUIRE(manual.code == 0);
  const auto mrows = csv_rows(manual.out);
  REQUIRE(mrows.size() == rows.size());
  CHECK(mrows[10][2] == rows[10][2]);
}

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <tuple>
#include <vector>

#include "wavefield/analysis.hpp"
#include "wavefield/array.hpp"
#include "wavefield/atmosphere.hpp"
#include "wavefield/error.hpp"
#include "wavefield/propagation.hpp"
#include "wavefield/scene.hpp"
#include "wavefield/wav.hpp"

namespace py = pybind11;
using namespace wavefield;

namespace {

using Array1 = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::array_t<double> to_numpy(const RenderOutput& out) {
  const auto n_ch = static_cast<py::ssize_t>(out.channels.size());
  const auto n = static_cast<py::ssize_t>(out.n_samples());
  py::array_t<double> arr({n_ch, n});
  auto view = arr.mutable_unchecked<2>();
  for (py::ssize_t c = 0; c < n_ch; ++c) {
    for (py::ssize_t i = 0; i < n; ++i) view(c, i) = out.channels[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
  }
  return arr;
}

RenderOutput from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& data, double rate) {
  if (data.ndim() != 1 && data.ndim() != 2) throw InvalidArgument("audio must be 1-D or (channels, samples)");
  RenderOutput out;
  out.sample_rate = rate;
  const py::ssize_t n_ch = data.ndim() == 1 ? 1 : data.shape(0);
  const py::ssize_t n = data.ndim() == 1 ? data.shape(0) : data.shape(1);
  const double* p = data.data();
  out.channels.assign(static_cast<std::size_t>(n_ch), std::vector<double>(static_cast<std::size_t>(n)));
  for (py::ssize_t c = 0; c < n_ch; ++c) {
    std::copy(p + c * n, p + (c + 1) * n, out.channels[static_cast<std::size_t>(c)].begin());
  }
  return out;
}

std::span<const double> as_span(const Array1& a) {
  if (a.ndim() != 1) throw InvalidArgument("expected a 1-D array");
  return {a.data(), static_cast<std::size_t>(a.shape(0))};
}

const MicrophoneArray& find_array(const Scene& scene, const std::string& name) {
  if (scene.arrays.empty()) throw InvalidArgument("scene has no arrays");
  if (name.empty()) return scene.arrays.front();
  for (const auto& a : scene.arrays) {
    if (a.name == name) return a;
  }
  throw InvalidArgument("no array named \"" + name + "\"");
}

}  // namespace

PYBIND11_MODULE(_wavefield, m) {
  m.doc() = "Moving-source acoustic scene simulator";
  m.attr("__version__") = "0.1.0";

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidArgument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  py::class_<Atmosphere>(m, "Atmosphere")
      .def(py::init([](double temperature_c, double pressure_kpa, double relative_humidity) {
             return Atmosphere::from_celsius(temperature_c, pressure_kpa, relative_humidity);
           }),
           py::arg("temperature_c") = 20.0, py::arg("pressure_kpa") = 101.325, py::arg("relative_humidity") = 0.5)
      .def_property_readonly("temperature_k", &Atmosphere::temperature_k)
      .def_property_readonly("pressure_kpa", &Atmosphere::pressure_kpa)
      .def_property_readonly("relative_humidity", &Atmosphere::relative_humidity)
      .def("__repr__", [](const Atmosphere& a) {
        return "Atmosphere(temperature_k=" + std::to_string(a.temperature_k()) +
               ", pressure_kpa=" + std::to_string(a.pressure_kpa()) +
               ", relative_humidity=" + std::to_string(a.relative_humidity()) + ")";
      });

  m.def("speed_of_sound", &speed_of_sound, py::arg("atmosphere"));
  m.def("absorption_coefficient", &absorption_coefficient, py::arg("frequency_hz"), py::arg("atmosphere"),
        "Total absorption in dB/m.");
  m.def(
      "absorption_terms",
      [](double f, const Atmosphere& atm) {
        const auto t = absorption_terms(f, atm);
        return py::dict(py::arg("classical") = t.classical, py::arg("oxygen") = t.oxygen,
                        py::arg("nitrogen") = t.nitrogen, py::arg("total") = t.total());
      },
      py::arg("frequency_hz"), py::arg("atmosphere"));
  m.def(
      "absorption_spectrum",
      [](double rate, std::size_t n_bins, const Atmosphere& atm) { return py::array(py::cast(absorption_spectrum(rate, n_bins, atm))); },
      py::arg("sample_rate"), py::arg("n_bins"), py::arg("atmosphere"));

  py::class_<Scene>(m, "Scene")
      .def_static("load", &load_scene, py::arg("path"))
      .def_static(
          "parse", [](const std::string& text, const std::filesystem::path& base) { return parse_scene(text, base); },
          py::arg("text"), py::arg("base_dir") = std::filesystem::path{})
      .def("to_json", &serialize_scene)
      .def("validate", &validate)
      .def_readwrite("sample_rate", &Scene::sample_rate)
      .def_readwrite("duration", &Scene::duration)
      .def_property(
          "seed", [](const Scene& s) { return s.seed; },
          [](Scene& s, std::uint64_t seed) {
            s.seed = seed;
            refresh_noise_sources(s);
          })
      .def_property_readonly("atmosphere", [](const Scene& s) { return s.atmosphere; })
      .def_property_readonly("n_samples", &Scene::n_samples)
      .def_property_readonly("array_names",
                             [](const Scene& s) {
                               std::vector<std::string> names;
                               for (const auto& a : s.arrays) names.push_back(a.name);
                               return names;
                             })
      .def("array_offsets", [](const Scene& s, const std::string& name) { return find_array(s, name).offsets; },
           py::arg("name") = "")
      .def_property_readonly("n_sources", [](const Scene& s) { return s.sources.size(); });

  m.def(
      "render",
      [](const Scene& scene, const std::string& array, std::size_t threads) {
        const auto& arr = find_array(scene, array);
        RenderOutput out;
        {
          py::gil_scoped_release release;
          out = render_array(scene, arr, RenderOptions{threads});
        }
        return to_numpy(out);
      },
      py::arg("scene"), py::arg("array") = "", py::arg("threads") = 0,
      "Renders one array; returns a (channels, samples) float64 array.");

  m.def(
      "write_wav",
      [](const std::string& path, const py::array_t<double, py::array::c_style | py::array::forcecast>& data,
         double rate, bool pcm16) { write_wav(from_numpy(data, rate), path, pcm16 ? WavFormat::Pcm16 : WavFormat::Float32); },
      py::arg("path"), py::arg("data"), py::arg("sample_rate"), py::arg("pcm16") = false);
  m.def(
      "read_wav",
      [](const std::string& path) {
        const auto out = read_wav(path);
        return py::make_tuple(to_numpy(out), out.sample_rate);
      },
      py::arg("path"), "Returns ((channels, samples) array, sample_rate).");

  m.def(
      "fft_magnitude",
      [](const Array1& x, double rate) {
        const auto f = fft_magnitude(as_span(x), rate);
        return py::make_tuple(py::array(py::cast(f.frequencies)), py::array(py::cast(f.magnitudes_db)));
      },
      py::arg("samples"), py::arg("sample_rate"), "Returns (frequencies_hz, magnitudes_db).");
  m.def(
      "gcc_phat_tdoa",
      [](const Array1& a, const Array1& b, double rate, double max_delay) {
        return gcc_phat_tdoa(as_span(a), as_span(b), rate, max_delay);
      },
      py::arg("a"), py::arg("b"), py::arg("sample_rate"), py::arg("max_delay"));
  m.def("ground_truth_angle", &ground_truth_angle, py::arg("p_x"), py::arg("p_y"));

  m.def(
      "solve_emission",
      [](const std::vector<std::tuple<double, double, double, double>>& keyframes, const Vec3& receiver, double t_r,
         double c) {
        std::vector<Keyframe> kf;
        for (const auto& [t, x, y, z] : keyframes) kf.push_back(Keyframe{t, Vec3(x, y, z), {}});
        const auto sol = solve_emission(Trajectory(std::move(kf)), receiver, t_r, c);
        return py::make_tuple(sol.t_e, sol.emission_position, sol.distance);
      },
      py::arg("keyframes"), py::arg("receiver"), py::arg("t_r"), py::arg("c"),
      "Emission time for a keyframed (t, x, y, z) path; returns (t_e, position, distance).");
}

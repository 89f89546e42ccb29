#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "slowshift/analysis.hpp"
#include "slowshift/error.hpp"
#include "slowshift/oracle.hpp"
#include "slowshift/scenario.hpp"
#include "slowshift/solver.hpp"

namespace py = pybind11;
using namespace slowshift;

namespace {

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
  py::array_t<T> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  return std::vector<double>(a.data(), a.data() + a.size());
}

ScenarioConfig config_from(const std::string& arg) {
  if (is_builtin_scenario(arg)) return builtin_scenario(arg);
  return load_config(arg);
}

}  // namespace

PYBIND11_MODULE(_slowshift, m) {
  m.doc() = "Slow-light Stark frequency shifter (C++ core)";

  static py::handle exc = py::exception<Error>(m, "SlowshiftError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(exc, ("[" + std::string(to_string(e.kind())) + "] " + e.what()).c_str());
    }
  });

  py::class_<MediumParameters>(m, "MediumParameters")
      .def(py::init<>())
      .def_readwrite("alpha0_per_mm", &MediumParameters::alpha0_per_mm)
      .def_readwrite("length_mm", &MediumParameters::length_mm)
      .def_readwrite("refractive_index", &MediumParameters::refractive_index)
      .def_readwrite("t1_us", &MediumParameters::t1_us)
      .def_readwrite("t2_us", &MediumParameters::t2_us)
      .def_readwrite("gamma_h_khz", &MediumParameters::gamma_h_khz)
      .def_readwrite("tilt_fwhm_mhz", &MediumParameters::tilt_fwhm_mhz)
      .def_readwrite("tail_cutoff_mhz", &MediumParameters::tail_cutoff_mhz);

  py::class_<PulseSpec>(m, "PulseSpec")
      .def(py::init<>())
      .def_readwrite("fwhm_us", &PulseSpec::fwhm_us)
      .def_readwrite("center_detuning_mhz", &PulseSpec::center_detuning_mhz)
      .def_readwrite("peak_rabi_mhz", &PulseSpec::peak_rabi_mhz)
      .def_readwrite("delay_us", &PulseSpec::delay_us)
      .def_readwrite("chirp_mhz_per_us", &PulseSpec::chirp_mhz_per_us);

  py::class_<IonEnsemble>(m, "IonEnsemble")
      .def_property_readonly("detuning_mhz", [](const IonEnsemble& e) { return to_array(e.grid.points()); })
      .def_property_readonly("slices", [](const IonEnsemble& e) { return e.slices.size(); })
      .def("profiles", [](const IonEnsemble& e, std::size_t slice) {
             if (slice >= e.slices.size()) throw py::index_error("slice out of range");
             return py::make_tuple(to_array(e.slices[slice].a.density), to_array(e.slices[slice].b.density));
           }, py::arg("slice") = 0)
      .def_property_readonly("optical_depth", &IonEnsemble::optical_depth)
      .def_property_readonly("guard_band_mhz", &IonEnsemble::guard_band);

  m.def("frequency_shifter",
        [](double half_span, double spacing, const MediumParameters& med, double wide, double narrow, double edge) {
          ShifterGeometry g;
          g.wide_hole_mhz = wide;
          g.narrow_hole_mhz = narrow;
          g.edge_width_mhz = edge;
          return prepare_frequency_shifter(DetuningGrid::symmetric(half_span, spacing), med, g);
        },
        py::arg("half_span_mhz") = 46.0, py::arg("spacing_mhz") = 0.02, py::arg("medium") = MediumParameters{},
        py::arg("wide_hole_mhz") = 18.0, py::arg("narrow_hole_mhz") = 1.0, py::arg("edge_width_mhz") = 0.1);
  m.def("hole",
        [](double half_span, double spacing, const MediumParameters& med, double center, double width, double edge) {
          return prepare_hole(DetuningGrid::symmetric(half_span, spacing), med, center, width, edge);
        },
        py::arg("half_span_mhz") = 20.0, py::arg("spacing_mhz") = 0.02, py::arg("medium") = MediumParameters{},
        py::arg("center_mhz") = 0.0, py::arg("width_mhz") = 1.0, py::arg("edge_width_mhz") = 0.1);
  m.def("flat",
        [](double half_span, double spacing, const MediumParameters& med) {
          return new_background(DetuningGrid::symmetric(half_span, spacing), med);
        },
        py::arg("half_span_mhz") = 20.0, py::arg("spacing_mhz") = 0.02, py::arg("medium") = MediumParameters{});

  m.def("linear_transfer",
        [](const IonEnsemble& e, py::array_t<double, py::array::c_style | py::array::forcecast> f, double ds) {
          const auto h = linear_transfer(e, to_vector(f), ds);
          return py::make_tuple(to_array(h.values()), to_array(h.phase()), to_array(h.group_delay()));
        },
        py::arg("ensemble"), py::arg("frequency_mhz"), py::arg("shift_mhz") = 0.0,
        "Returns (H, unwrapped phase, group delay in us).");
  m.def("group_delay_at", &group_delay_at, py::arg("ensemble"), py::arg("frequency_mhz"), py::arg("shift_mhz") = 0.0);
  m.def("intensity_loss_at", &intensity_loss_at, py::arg("ensemble"), py::arg("frequency_mhz"),
        py::arg("shift_mhz") = 0.0);
  m.def("passband_center", &passband_center, py::arg("ensemble"), py::arg("shift_mhz"), py::arg("guess_mhz"),
        py::arg("search_mhz") = 1.5);

  m.def("propagate",
        [](const IonEnsemble& e, const PulseSpec& p, double dt, double dz, double window) {
          SolverOptions o;
          o.dt_us = dt;
          o.dz_mm = dz;
          o.window_us = window;
          SimResult r;
          {
            py::gil_scoped_release release;
            r = propagate(e, p, StarkDrive::none(), o);
          }
          py::dict d;
          d["tau_us"] = to_array(r.tau_us);
          d["input_mhz"] = to_array(r.input_mhz);
          d["transmitted_mhz"] = to_array(r.transmitted_mhz);
          d["u_med"] = to_array(r.energy.u_med);
          d["u_em"] = to_array(r.energy.u_em);
          return d;
        },
        py::arg("ensemble"), py::arg("pulse") = PulseSpec{}, py::arg("dt_us") = 0.002, py::arg("dz_mm") = 0.05,
        py::arg("window_us") = 0.0, "Undriven weak-probe run.");

  m.def("spectrum",
        [](py::array_t<cplx, py::array::c_style | py::array::forcecast> env, double dt, int pad) {
          const Spectrum s = spectrum(std::span<const cplx>(env.data(), env.size()), dt, Window::Hann, pad);
          return py::make_tuple(to_array(s.frequency_mhz), to_array(s.power), s.peak_mhz);
        },
        py::arg("envelope"), py::arg("dt_us"), py::arg("pad") = 8);
  m.def("instantaneous_frequency",
        [](py::array_t<cplx, py::array::c_style | py::array::forcecast> env, double dt, double thr) {
          const auto t = instantaneous_frequency(std::span<const cplx>(env.data(), env.size()), dt, thr);
          std::vector<unsigned char> valid(t.valid.begin(), t.valid.end());
          return py::make_tuple(to_array(t.times_us), to_array(t.frequency_mhz), to_array(valid).attr("astype")("bool"));
        },
        py::arg("envelope"), py::arg("dt_us"), py::arg("threshold") = 0.05);

  m.def("eq1_velocity", &eq1_velocity, py::arg("refractive_index"), py::arg("ratio_med_em"));
  m.def("eq4_velocity", &eq4_velocity, py::arg("gamma_mhz"), py::arg("alpha_half_per_mm"));
  m.def("eq5_loss", &eq5_loss, py::arg("gamma_mhz"), py::arg("t_ns"));

  m.def("list_scenarios", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& s : list_scenarios()) out.emplace_back(s.name, s.description);
    return out;
  });
  m.def("builtin_config", [](const std::string& name) { return render_config(builtin_scenario(name)); },
        py::arg("name"));
  m.def("resolve_config", [](const std::string& text) { return render_config(parse_config(text)); },
        py::arg("text"), "Parses config text and returns its fully resolved form.");
  m.def("run_scenario",
        [](const std::string& config, const std::string& out_dir, bool overwrite) {
          const ScenarioConfig c = config_from(config);
          ScenarioResult r;
          {
            py::gil_scoped_release release;
            r = execute_scenario(c);
            write_bundle(r, out_dir, overwrite);
          }
          py::dict d;
          for (const auto& [k, v] : r.summary) d[py::str(k)] = v;
          return d;
        },
        py::arg("config"), py::arg("out_dir"), py::arg("overwrite") = false,
        "Runs a builtin scenario or config file; returns the summary as a dict of strings.");
}

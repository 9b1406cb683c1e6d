#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sitm/config.hpp"
#include "sitm/error.hpp"
#include "sitm/gazescreen.hpp"
#include "sitm/hypothesis.hpp"
#include "sitm/physio.hpp"
#include "sitm/pipeline.hpp"
#include "sitm/synth.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;

namespace {

sitm::RunConfig resolve(const std::optional<fs::path>& config, std::optional<std::uint64_t> seed,
                        const std::optional<std::vector<std::string>>& modalities, std::optional<unsigned> jobs) {
  auto c = sitm::load_run_config(config);
  if (seed) c.seed = *seed;
  if (jobs) c.jobs = *jobs;
  if (modalities) c.modalities = sitm::parse_modality_list(*modalities);
  return c;
}

py::dict test_dict(const sitm::TestResult& r) {
  py::dict d;
  d["statistic"] = r.statistic;
  d["p_value"] = r.p_value;
  d["effect_size"] = r.effect_size;
  d["exact"] = r.exact;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the sit-markers pipeline";

  py::exception<sitm::Error>(m, "SitmError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const sitm::Error& e) {
      const py::object error_type = py::module_::import("sit_markers._core").attr("SitmError");
      py::object inst = error_type(std::string(e.what()));
      inst.attr("kind") = std::string(sitm::to_string(e.kind()));
      inst.attr("exit_code") = sitm::exit_code_for(e.kind());
      PyErr_SetObject(error_type.ptr(), inst.ptr());
    }
  });

  py::class_<sitm::SynthSpec>(m, "SynthSpec")
      .def(py::init<>())
      .def_static(
          "from_file", [](const fs::path& p) { return sitm::make_synth_spec(sitm::ConfigFile::read(p)); },
          py::arg("path"))
      .def_readwrite("n_per_group", &sitm::SynthSpec::n_per_group)
      .def_readwrite("seed", &sitm::SynthSpec::seed)
      .def_readwrite("fps", &sitm::SynthSpec::fps)
      .def_readwrite("phase_duration_s", &sitm::SynthSpec::phase_duration_s)
      .def_readwrite("low_fps_participants", &sitm::SynthSpec::low_fps_participants)
      .def_readwrite("gaze_std_ratio", &sitm::SynthSpec::gaze_std_ratio)
      .def_readwrite("au_mean_shift", &sitm::SynthSpec::au_mean_shift)
      .def_readwrite("hr_shift_bpm", &sitm::SynthSpec::hr_shift_bpm)
      .def_readwrite("head_motion_ratio", &sitm::SynthSpec::head_motion_ratio)
      .def_readwrite("prosody_shift", &sitm::SynthSpec::prosody_shift)
      .def_readwrite("aq_shift", &sitm::SynthSpec::aq_shift)
      .def_readwrite("gaze_spread_mm", &sitm::SynthSpec::gaze_spread_mm)
      .def_readwrite("gaze_subject_sd", &sitm::SynthSpec::gaze_subject_sd)
      .def_readwrite("invalid_frame_rate", &sitm::SynthSpec::invalid_frame_rate)
      .def_readwrite("home_fraction", &sitm::SynthSpec::home_fraction)
      .def("validate", &sitm::SynthSpec::validate);

  m.def(
      "synth",
      [](const sitm::SynthSpec& spec, const fs::path& out) {
        spec.validate();
        const auto participants = sitm::generate_participants(spec);
        sitm::write_cohort(participants, out);
        return participants.size();
      },
      py::arg("spec"), py::arg("out"), "Write a synthetic cohort; returns the participant count.");

  m.def(
      "extract",
      [](const fs::path& manifest, const fs::path& out, std::optional<fs::path> config,
         std::optional<std::uint64_t> seed, std::optional<std::vector<std::string>> modalities,
         std::optional<unsigned> jobs) {
        const auto c = resolve(config, seed, modalities, jobs);
        const auto result = sitm::run_extract(manifest, c);
        sitm::extract_outputs(result, c).commit(out);
        return result.cohort.participants.size();
      },
      py::arg("manifest"), py::arg("out"), py::kw_only(), py::arg("config") = py::none(),
      py::arg("seed") = py::none(), py::arg("modalities") = py::none(), py::arg("jobs") = py::none(),
      "Extract features from a cohort manifest; returns the number of retained participants.");

  m.def(
      "evaluate",
      [](const fs::path& features, const fs::path& out, std::optional<fs::path> config,
         std::optional<std::uint64_t> seed, std::optional<std::vector<std::string>> modalities,
         std::optional<unsigned> jobs, bool ablate, bool shap) {
        const auto c = resolve(config, seed, modalities, jobs);
        const auto table = sitm::read_features_csv(features);
        const auto ev = [&] {
          py::gil_scoped_release release;
          return sitm::run_evaluate(table, c, {ablate, shap});
        }();
        sitm::evaluate_outputs(ev, c).commit(out);
        py::list rows;
        for (const auto* r : ev.reports()) {
          py::dict d;
          d["model"] = r->model;
          d["accuracy"] = r->metrics.accuracy;
          d["precision"] = r->metrics.precision;
          d["recall"] = r->metrics.recall;
          d["auc"] = r->metrics.auc;
          rows.append(d);
        }
        return rows;
      },
      py::arg("features"), py::arg("out"), py::kw_only(), py::arg("config") = py::none(),
      py::arg("seed") = py::none(), py::arg("modalities") = py::none(), py::arg("jobs") = py::none(),
      py::arg("ablate") = false, py::arg("shap") = false,
      "Leave-one-out evaluation; writes the report bundle and returns the summary rows.");

  m.def(
      "plotdata",
      [](const fs::path& report, const fs::path& extract, const fs::path& out) {
        sitm::plotdata_outputs(report, extract).commit(out);
      },
      py::arg("report"), py::arg("extract"), py::arg("out"));

  m.def(
      "project_gaze",
      [](double ax, double ay) {
        const auto p = sitm::project_gaze(ax, ay, sitm::ScreenGeometry{});
        return py::make_tuple(p.x, p.y);
      },
      py::arg("angle_x"), py::arg("angle_y"),
      "Screen point in mm (relative to the centre) under the default home geometry.");

  m.def(
      "hrv_metrics",
      [](const std::vector<double>& ibi_ms) {
        const auto h = sitm::hrv_metrics(ibi_ms);
        py::dict d;
        d["mean_hr"] = h.mean_hr;
        d["sdnn"] = h.sdnn;
        d["rmssd"] = h.rmssd;
        d["lf_hf"] = h.lf_hf;
        return d;
      },
      py::arg("ibi_ms"));

  m.def(
      "pulse_rate",
      [](const std::vector<double>& r, const std::vector<double>& g, const std::vector<double>& b, double fs)
          -> std::optional<double> {
        const sitm::PhysioParams pp;
        const auto bvp = sitm::pos_bvp(r, g, b, fs, pp.pos_window_s);
        if (!bvp) return std::nullopt;
        const auto beats = sitm::detect_beats(sitm::bandpass(*bvp, fs, pp.band_low_hz, pp.band_high_hz), fs);
        if (!beats) return std::nullopt;
        return sitm::hrv_metrics(beats->ibi_ms, beats->ibi_times_s).mean_hr;
      },
      py::arg("r"), py::arg("g"), py::arg("b"), py::arg("fs") = 30.0,
      "Mean heart rate (BPM) from skin-ROI RGB traces, or None.");

  m.def(
      "mann_whitney_u",
      [](const std::vector<double>& a, const std::vector<double>& b) { return test_dict(sitm::mann_whitney_u(a, b)); },
      py::arg("a"), py::arg("b"));

  m.def(
      "chi_square_2x2",
      [](const std::array<std::array<std::uint64_t, 2>, 2>& table) { return test_dict(sitm::chi_square_2x2(table)); },
      py::arg("table"));
}

// Copyright 2026 The SlsBench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Python bindings. Structured values cross the boundary as JSON text; the
// pure-Python package turns them into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slsbench/clock.hpp"
#include "slsbench/engine.hpp"
#include "slsbench/error.hpp"
#include "slsbench/localsim.hpp"
#include "slsbench/metrics.hpp"
#include "slsbench/packaging.hpp"
#include "slsbench/platform.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using nlohmann::json;
using namespace slsbench;

namespace {

PlatformProfile find_profile(const std::string& name, const std::string& overlay) {
    auto profiles = builtin_profiles();
    if (!overlay.empty()) profiles = apply_overlay(profiles, json::parse(overlay));
    for (auto& p : profiles) {
        if (p.name == name) return p;
    }
    fail(ErrorCode::kNotFound, "unknown platform '" + name + "'");
}

std::string profiles_json(const std::string& overlay) {
    auto profiles = builtin_profiles();
    if (!overlay.empty()) profiles = apply_overlay(profiles, json::parse(overlay));
    json out = json::array();
    for (const auto& p : profiles) out.push_back(to_json(p));
    return out.dump();
}

std::string validate_json(const std::string& platform, const std::string& spec, const std::string& overlay) {
    return to_json(validate(find_profile(platform, overlay), spec_from_json(json::parse(spec)))).dump();
}

std::string summarize_json(const std::vector<double>& values) {
    const auto s = summarize(values);
    return json{{"count", s.count}, {"min", s.min},   {"p25", s.p25},   {"median", s.median}, {"p75", s.p75},
                {"p95", s.p95},     {"max", s.max},   {"mean", s.mean}, {"stddev", s.stddev}}
        .dump();
}

double percentile(std::vector<double> values, int percent) {
    if (values.empty()) fail(ErrorCode::kEmptyGroup, "percentile of an empty list");
    std::sort(values.begin(), values.end());
    return percentile_nearest_rank(values, percent);
}

std::string package_json(const fs::path& workload_dir, const fs::path& out_dir) {
    return to_json(build_package(workload_dir, load_manifest(workload_dir), out_dir)).dump();
}

std::string builtin_sweeps_json() {
    json out = json::array();
    for (const auto& p : builtin_sweeps()) out.push_back(to_json(p));
    return out.dump();
}

// Runs a plan on the local simulator with a virtual clock. The output
// directory holds the journal, so rerunning the same plan there resumes.
std::string run_plan_json(const std::string& plan_text, const fs::path& output_dir, const std::string& model_text,
                          const fs::path& workloads_dir, std::optional<std::uint64_t> seed,
                          const std::string& overlay) {
    const auto plan = plan_from_json(json::parse(plan_text));
    if (plan.provider != kLocalSimProvider) {
        fail(ErrorCode::kUnsupported, "the Python API runs plans on the local simulator only");
    }
    SimModel model = model_text.empty() ? reference_sim_model() : sim_model_from_json(json::parse(model_text));
    if (seed) model.seed = *seed;
    fs::create_directories(output_dir);

    VirtualClock clock;
    LocalSimProvider sim(find_profile(plan.platform, overlay), model, clock, {output_dir / "sim"});
    WorkloadCatalog catalog(workloads_dir, output_dir / "packages");
    ExperimentEngine engine(sim, {output_dir, {}, {}});
    const auto results = engine.run_plan(plan, catalog);
    const auto files = report(plan, results, output_dir / "report");

    json out{{"trials", json::array()}, {"files", json::array()}};
    for (const auto& t : results) out["trials"].push_back(to_json(t));
    for (const auto& f : files) out["files"].push_back(f.string());
    return out.dump();
}

std::string summaries_json(const std::string& plan_text, const std::string& trials_text) {
    const auto plan = plan_from_json(json::parse(plan_text));
    std::vector<TrialResult> results;
    for (const auto& t : json::parse(trials_text)) results.push_back(trial_from_json(t));
    return summaries_to_csv(plan, summarize_results(plan, results));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Serverless benchmark harness core";

    static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetString(error.ptr(), (std::string(to_string(e.code())) + ": " + e.what()).c_str());
        } catch (const json::exception& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    m.def("profiles", &profiles_json, py::arg("overlay") = "");
    m.def("validate", &validate_json, py::arg("platform"), py::arg("spec"), py::arg("overlay") = "");
    m.def(
        "snap_memory",
        [](const std::string& platform, double mb, const std::string& overlay) {
            const auto s = snap_memory(find_profile(platform, overlay), mb);
            return py::make_tuple(s.mb, s.fixed_warning);
        },
        py::arg("platform"), py::arg("requested_mb"), py::arg("overlay") = "");
    m.def(
        "cpu_share",
        [](const std::string& platform, Mebibytes mb, const std::string& overlay) {
            return cpu_share(find_profile(platform, overlay), mb);
        },
        py::arg("platform"), py::arg("memory_mb"), py::arg("overlay") = "");
    m.def("percentile", &percentile, py::arg("values"), py::arg("percent"));
    m.def("summarize", &summarize_json, py::arg("values"));
    m.def("build_package", &package_json, py::arg("workload_dir"), py::arg("out_dir"));
    m.def("builtin_sweeps", &builtin_sweeps_json);
    m.def("reference_sim_model", [] { return to_json(reference_sim_model()).dump(); });
    m.def("run_plan", &run_plan_json, py::arg("plan"), py::arg("output_dir"), py::arg("sim_model") = "",
          py::arg("workloads_dir") = fs::path("workloads"), py::arg("seed") = std::nullopt, py::arg("overlay") = "",
          py::call_guard<py::gil_scoped_release>());
    m.def("summary_csv", &summaries_json, py::arg("plan"), py::arg("trials"));
}

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "imgep/config_io.hpp"
#include "imgep/errors.hpp"
#include "imgep/experiments.hpp"
#include "imgep/explorer.hpp"
#include "imgep/features.hpp"
#include "imgep/history_io.hpp"
#include "imgep/metrics.hpp"
#include "imgep/png_io.hpp"
#include "imgep/system.hpp"

namespace py = pybind11;
using namespace imgep;
using nlohmann::json;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Grid2D to_grid(const Array& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
    const auto h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
    return Grid2D(w, h, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const Grid2D& g) {
    Array out({g.height(), g.width()});
    std::copy(g.values().begin(), g.values().end(), out.mutable_data());
    return out;
}

json parse(const std::string& text) { return json::parse(text.empty() ? "{}" : text); }

std::unique_ptr<System> system_from(const std::string& spec_json, std::uint64_t seed) {
    return make_system(config_io::system_spec_from_json(parse(spec_json)), explorer::initial_state_seed(seed));
}

py::dict haralick_dict(const features::HaralickVector& h) {
    static const char* names[] = {"asm", "contrast", "correlation", "sum_of_squares", "idm",
                                  "sum_average", "sum_variance", "sum_entropy", "entropy", "difference_variance",
                                  "difference_entropy", "imc1", "imc2"};
    py::dict d;
    for (int i = 0; i < features::kHaralickCount; ++i) d[names[i]] = h[i];
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Constrained diversity search over Gray-Scott and Lenia parameter spaces";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<UnknownFeature>(m, "UnknownFeature", PyExc_KeyError);
    py::register_exception<InsufficientHistory>(m, "InsufficientHistory", PyExc_ValueError);

    m.def(
        "rollout",
        [](const std::string& spec_json, const std::vector<double>& params, std::uint64_t seed) {
            auto system = system_from(spec_json, seed);
            const ParamVector p(system->space(), params);
            RolloutResult r;
            {
                py::gil_scoped_release release;
                r = system->rollout(p.values());
            }
            return py::make_tuple(to_array(r.observation), r.invalid);
        },
        py::arg("spec_json"), py::arg("params"), py::arg("seed") = 0,
        "Simulate one parameter vector. Returns (observation, invalid).");

    m.def(
        "parameter_space",
        [](const std::string& system) {
            const auto space = parse_system_kind(system) == SystemKind::gray_scott ? gray_scott_space() : lenia_space();
            py::list out;
            for (std::size_t i = 0; i < space->dims(); ++i)
                out.append(py::make_tuple(space->names[i], space->bounds[i].lo, space->bounds[i].hi,
                                          space->mutation_sigmas[i]));
            return out;
        },
        py::arg("system"), "(name, lo, hi, mutation sigma) per parameter.");

    m.def("is_homogeneous", [](const Array& a, double tol) { return is_homogeneous(to_grid(a), tol); }, py::arg("obs"),
          py::arg("tol") = 1e-4);
    m.def("hu_moments", [](const Array& a) { return features::hu_moments(to_grid(a)); });
    m.def("volume", [](const Array& a, double eps) { return features::volume(to_grid(a), eps); }, py::arg("obs"),
          py::arg("eps") = features::kVolumeEpsilon);
    m.def("mean_pixel", [](const Array& a) { return features::mean_pixel(to_grid(a)); });
    m.def("behavior", [](const Array& a) { return features::behavior(to_grid(a)).to_array(); },
          "7 signed-log Hu invariants, mean pixel, volume.");
    m.def("haralick", [](const Array& a) { return haralick_dict(features::haralick13(to_grid(a))); });
    m.def("constraint_features", [](const Array& a) {
        const auto c = features::constraint_features(to_grid(a));
        py::dict d;
        for (auto name : features::ConstraintFeatures::names()) d[py::str(std::string(name))] = c.get(name);
        return d;
    });
    m.def("encode_png", [](const Array& a) {
        const auto bytes = encode_png(to_grid(a));
        return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    });

    m.def("bins_per_dim", &metrics::bins_per_dim_for, py::arg("n_bins_target"));
    m.def(
        "diversity",
        [](const std::vector<std::array<double, 4>>& points, long n_bins_target,
           std::optional<std::array<double, 4>> lo, std::optional<std::array<double, 4>> hi) {
            metrics::BinningSpec spec = metrics::make_binning(n_bins_target, points);
            if (lo) spec.lo = *lo;
            if (hi) spec.hi = *hi;
            return metrics::diversity(points, spec);
        },
        py::arg("points"), py::arg("n_bins_target"), py::arg("lo") = py::none(), py::arg("hi") = py::none(),
        "Occupied bins of a uniform 4-D grid; bounds default to the points' min/max.");
    m.def(
        "acceptance_rate",
        [](const std::vector<int>& classifications, int n_init) {
            return metrics::acceptance_rate(classifications, n_init);
        },
        py::arg("classifications"), py::arg("n_init"));

    m.def(
        "explore",
        [](const std::string& spec_json, const std::string& config_json, const std::string& roi_json) {
            const SystemSpec spec = config_io::system_spec_from_json(parse(spec_json));
            const auto config = config_io::explorer_config_from_json(parse(config_json));
            const auto roi = roi_json.empty() ? explorer::volume_roi() : config_io::roi_from_json(parse(roi_json));
            std::ostringstream out;
            {
                py::gil_scoped_release release;
                auto system = make_system(spec, explorer::initial_state_seed(config.seed));
                history_io::write_jsonl(out, explorer::run_exploration(*system, config, roi));
            }
            return out.str();
        },
        py::arg("spec_json"), py::arg("config_json"), py::arg("roi_json") = "",
        "Runs one exploration and returns its history as JSON lines.");

    m.def(
        "run_plan",
        [](const std::string& plan_json, const std::string& output_dir, bool sweep) {
            auto plan = experiments::plan_from_json(parse(plan_json));
            if (!output_dir.empty()) plan.output_dir = output_dir;
            experiments::ResultBundle bundle;
            {
                py::gil_scoped_release release;
                bundle = sweep ? experiments::sweep_balance(plan) : experiments::run_plan(plan);
            }
            std::ostringstream csv;
            experiments::write_summary_csv(csv, experiments::summarize(bundle));
            return csv.str();
        },
        py::arg("plan_json"), py::arg("output_dir") = "", py::arg("sweep") = false,
        "Runs every arm of a plan; returns the summary table as CSV.");

    m.def(
        "summarize",
        [](const std::string& dir) {
            std::ostringstream csv;
            experiments::write_summary_csv(csv, experiments::summarize(std::filesystem::path(dir)));
            return csv.str();
        },
        py::arg("dir"));
}

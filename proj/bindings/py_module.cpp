#include "cmaswitch/analysis.hpp"
#include "cmaswitch/benchmarks.hpp"
#include "cmaswitch/config.hpp"
#include "cmaswitch/engine.hpp"
#include "cmaswitch/harness.hpp"
#include "cmaswitch/metrics.hpp"
#include "cmaswitch/sampling.hpp"
#include "cmaswitch/selection.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace cmaswitch;

namespace {

// hits as a Python list with None for unhit targets
py::list hits_list(const RunRecord& r) {
  py::list out;
  for (const auto& h : r.hits)
    out.append(h ? py::cast(*h) : py::none());
  return out;
}

RunRecord run_static_on(const std::string& config, int fid, int dim,
                        int instance, long budget, std::uint64_t seed) {
  const auto fn = benchmarks::make_function(fid, dim, instance);
  auto rec = run_static(decode(config),
                        [fn](const Vector& x) { return fn.evaluate(x); },
                        fn.f_opt(), dim, budget, seed);
  rec.fid = fid;
  rec.instance = instance;
  return rec;
}

RunRecord run_adaptive_on(const AdaptiveTriple& triple, int fid, int dim,
                          int instance, long budget, std::uint64_t seed) {
  const auto fn = benchmarks::make_function(fid, dim, instance);
  auto rec = run_adaptive(triple,
                          [fn](const Vector& x) { return fn.evaluate(x); },
                          fn.f_opt(), dim, budget, seed);
  rec.fid = fid;
  rec.instance = instance;
  return rec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "modular CMA-ES with online configuration switching";

  py::class_<ModuleConfiguration>(m, "ModuleConfiguration")
      .def(py::init([](const std::string& repr) { return decode(repr); }),
           py::arg("repr") = "00000000000")
      .def_readwrite("active_update", &ModuleConfiguration::active_update)
      .def_readwrite("elitism", &ModuleConfiguration::elitism)
      .def_readwrite("mirrored", &ModuleConfiguration::mirrored)
      .def_readwrite("orthogonal", &ModuleConfiguration::orthogonal)
      .def_readwrite("sequential", &ModuleConfiguration::sequential)
      .def_readwrite("threshold_convergence",
                     &ModuleConfiguration::threshold_convergence)
      .def_readwrite("tpa", &ModuleConfiguration::tpa)
      .def_readwrite("pairwise", &ModuleConfiguration::pairwise)
      .def_readwrite("weights_scheme", &ModuleConfiguration::weights_scheme)
      .def_readwrite("sampler", &ModuleConfiguration::sampler)
      .def_readwrite("restart_scheme", &ModuleConfiguration::restart_scheme)
      .def("__repr__",
           [](const ModuleConfiguration& c) {
             return "ModuleConfiguration('" + encode(c) + "')";
           })
      .def("__eq__", [](const ModuleConfiguration& a,
                        const ModuleConfiguration& b) { return a == b; });

  m.def("encode", &encode, py::arg("config"));
  m.def("decode", &decode, py::arg("repr"));
  m.def("enumerate_space", [](bool include_restarts) {
          std::vector<std::string> out;
          for (const auto& c : enumerate_space(include_restarts))
            out.push_back(encode(c));
          return out;
        },
        py::arg("include_restarts") = true);
  m.def("common_variants", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& v : common_variants())
      out.push_back({v.name, encode(v.config)});
    return out;
  });

  m.def("target_grid", [] {
    return std::vector<double>(TargetGrid::standard().values.begin(),
                               TargetGrid::standard().values.end());
  });

  py::class_<benchmarks::BenchmarkFunction>(m, "BenchmarkFunction")
      .def_property_readonly("fid", &benchmarks::BenchmarkFunction::fid)
      .def_property_readonly("dim", &benchmarks::BenchmarkFunction::dim)
      .def_property_readonly("instance", &benchmarks::BenchmarkFunction::instance)
      .def_property_readonly("f_opt", &benchmarks::BenchmarkFunction::f_opt)
      .def_property_readonly("x_opt", &benchmarks::BenchmarkFunction::x_opt)
      .def_property_readonly("name", &benchmarks::BenchmarkFunction::name)
      .def("__call__", &benchmarks::BenchmarkFunction::evaluate, py::arg("x"))
      .def("evaluate", &benchmarks::BenchmarkFunction::evaluate, py::arg("x"));
  m.def("make_function", &benchmarks::make_function, py::arg("fid"),
        py::arg("dim") = 5, py::arg("instance") = 1);
  m.def("available_fids", [] { return benchmarks::available_fids(); });

  py::class_<AdaptiveTriple>(m, "AdaptiveTriple")
      .def(py::init([](const std::string& c1, const std::string& c2, int tau) {
             return AdaptiveTriple{c1, c2, tau};
           }),
           py::arg("c1"), py::arg("c2"), py::arg("tau_index"))
      .def_readwrite("c1", &AdaptiveTriple::c1)
      .def_readwrite("c2", &AdaptiveTriple::c2)
      .def_readwrite("tau_index", &AdaptiveTriple::tau_index)
      .def("__repr__", [](const AdaptiveTriple& t) { return t.repr(); });

  py::class_<RunRecord>(m, "RunRecord")
      .def_readonly("fid", &RunRecord::fid)
      .def_readonly("instance", &RunRecord::instance)
      .def_readonly("config_repr", &RunRecord::config_repr)
      .def_readonly("run_index", &RunRecord::run_index)
      .def_readonly("seed", &RunRecord::seed)
      .def_readonly("budget_used", &RunRecord::budget_used)
      .def_readonly("error", &RunRecord::error)
      .def_property_readonly("switch_eval",
                             [](const RunRecord& r) -> py::object {
                               if (r.switch_eval) return py::cast(*r.switch_eval);
                               return py::none();
                             })
      .def_property_readonly("hits", &hits_list)
      .def("same_trajectory", &RunRecord::same_trajectory);

  m.def("run_static", &run_static_on, py::arg("config"), py::arg("fid"),
        py::arg("dim") = 5, py::arg("instance") = 1, py::arg("budget") = 50000,
        py::arg("seed") = 1,
        "Run one static configuration on a benchmark instance");
  m.def("run_adaptive", &run_adaptive_on, py::arg("triple"), py::arg("fid"),
        py::arg("dim") = 5, py::arg("instance") = 1, py::arg("budget") = 50000,
        py::arg("seed") = 1,
        "Run one adaptive (C1, C2, tau) triple on a benchmark instance");

  m.def("derive_static_weights", [](const std::string& config, int dim) {
          return derive_static(decode(config), dim).weights;
        },
        py::arg("config"), py::arg("dim") = 5);

  m.def("load_dataset", &harness::load_dataset, py::arg("path"));
  m.def("append_records", &harness::append_records, py::arg("path"),
        py::arg("records"));
  m.def("derive_seed", &harness::derive_seed, py::arg("base_seed"),
        py::arg("config"), py::arg("fid"), py::arg("instance"),
        py::arg("run_index"));

  m.def("aht", &metrics::aht, py::arg("dataset"), py::arg("fid"),
        py::arg("config"), py::arg("target_index"));
  m.def("ert", &metrics::ert, py::arg("dataset"), py::arg("fid"),
        py::arg("config"), py::arg("target_index"), py::arg("budget"));
  m.def("worst_case_value", &metrics::worst_case_value, py::arg("dataset"),
        py::arg("fid"), py::arg("config"), py::arg("target_index"));

  py::class_<metrics::PerformanceTable>(m, "PerformanceTable")
      .def(py::init<const harness::Dataset&, long>(), py::arg("dataset"),
           py::arg("budget"))
      .def("phi_min_index", &metrics::PerformanceTable::phi_min_index)
      .def("eligible_configs", &metrics::PerformanceTable::eligible_configs)
      .def("configs", &metrics::PerformanceTable::configs)
      .def("aht",
           [](const metrics::PerformanceTable& t, int fid,
              const std::string& c, int target) {
             return t.value(fid, c, target, metrics::ValueKind::aht);
           })
      .def("ert",
           [](const metrics::PerformanceTable& t, int fid,
              const std::string& c, int target) {
             return t.value(fid, c, target, metrics::ValueKind::ert);
           })
      .def("to_csv", &metrics::PerformanceTable::to_csv);
  m.def("theoretical_ht",
        [](const metrics::PerformanceTable& perf, int fid,
           const std::string& c1, const std::string& c2, int split,
           int phi_min) {
          return metrics::theoretical_ht(perf, fid, c1, c2, split, phi_min);
        },
        py::arg("perf"), py::arg("fid"), py::arg("c1"), py::arg("c2"),
        py::arg("split_index"), py::arg("phi_min_index"));
  m.def("sliding_window_value",
        [](const metrics::PerformanceTable& perf, int fid,
           const std::string& c1, const std::string& c2, int split,
           int phi_min) {
          return metrics::sliding_window_value(perf, fid, c1, c2, split,
                                               phi_min);
        },
        py::arg("perf"), py::arg("fid"), py::arg("c1"), py::arg("c2"),
        py::arg("split_index"), py::arg("phi_min_index"));

  py::class_<selection::SelectionEntry>(m, "SelectionEntry")
      .def_readonly("triple", &selection::SelectionEntry::triple)
      .def_readonly("predicted_value",
                    &selection::SelectionEntry::predicted_value)
      .def_readonly("predicted_ert", &selection::SelectionEntry::predicted_ert);
  py::class_<selection::SelectionResult>(m, "SelectionResult")
      .def_readonly("fid", &selection::SelectionResult::fid)
      .def_readonly("method", &selection::SelectionResult::method)
      .def_readonly("phi_min_index",
                    &selection::SelectionResult::phi_min_index)
      .def_readonly("entries", &selection::SelectionResult::entries);

  m.def("select_original",
        [](const harness::Dataset& data, int fid, long budget) {
          return selection::select_original(
              metrics::PerformanceTable(data, budget), fid);
        },
        py::arg("dataset"), py::arg("fid"), py::arg("budget"));
  m.def("select_windowed",
        [](const harness::Dataset& data, int fid, long budget,
           const std::string& aggregation, int top_k, bool limited) {
          return selection::select_windowed(
              metrics::PerformanceTable(data, budget), fid,
              aggregation == "worst_case" ? selection::Aggregation::worst_case
                                          : selection::Aggregation::mean,
              top_k, limited);
        },
        py::arg("dataset"), py::arg("fid"), py::arg("budget"),
        py::arg("aggregation") = "mean", py::arg("top_k") = 50,
        py::arg("limited") = false);
  m.def("two_stage_final", &selection::two_stage_final, py::arg("rerun"),
        py::arg("fid"), py::arg("budget"), py::arg("top_k") = 50);

  m.def("module_difference", &analysis::module_difference, py::arg("selection"));
  m.def("relative_improvement", &analysis::relative_improvement,
        py::arg("ert_static_best"), py::arg("ert_adaptive"));
  m.def("improvement_fraction", &analysis::improvement_fraction,
        py::arg("achieved_erts"), py::arg("best_static_ert"));

  m.def("normal_quantile", &sampling::normal_quantile, py::arg("p"));

  m.attr("__version__") = "0.1.0";
}

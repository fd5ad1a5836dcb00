#include "cmaswitch/analysis.hpp"
#include "cmaswitch/benchmarks.hpp"
#include "cmaswitch/config.hpp"
#include "cmaswitch/engine.hpp"
#include "cmaswitch/harness.hpp"
#include "cmaswitch/metrics.hpp"
#include "cmaswitch/selection.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace cmaswitch;

// exit-status contract: 0 success, 1 usage error, 2 data error
constexpr int kUsageError = 1;
constexpr int kDataError = 2;

std::string resolve_out(const std::string& path) {
  if (path.empty()) return path;
  const char* base = std::getenv("CMASWITCH_OUT_DIR");
  if (base == nullptr || *base == '\0') return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  std::filesystem::create_directories(base);
  return (std::filesystem::path(base) / p).string();
}

std::string format_target(int index) {
  const double exponent = 2.0 - 0.2 * index;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", exponent);
  std::string s(buf);
  if (s.size() > 2 && s.substr(s.size() - 2) == ".0") s.resize(s.size() - 2);
  return "1e" + s;
}

std::string format4(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "no success";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

harness::CampaignManifest manifest_for_run(const std::string& manifest_path,
                                           const std::string& out_override) {
  auto manifest = harness::load_manifest(manifest_path);
  if (!out_override.empty()) manifest.out = out_override;
  manifest.out = resolve_out(manifest.out);
  if (manifest.out.empty())
    throw CLI::ValidationError(
        "no output dataset path: set 'out' in the manifest or pass --out");
  return manifest;
}

void run_campaign(const harness::CampaignManifest& manifest, int workers,
                  bool quiet) {
  const auto progress = harness::execute_campaign(
      manifest, workers,
      quiet ? std::function<void(std::size_t, std::size_t)>()
            : [](std::size_t done, std::size_t total) {
                if (done % 50 == 0 || done == total)
                  std::cerr << "\r" << done << "/" << total << " runs"
                            << std::flush;
              });
  if (!quiet && progress.executed > 0) std::cerr << "\n";
  std::cout << "executed " << progress.executed << ", skipped "
            << progress.skipped << " (already on disk), failed "
            << progress.failed << "\n";
  std::cout << "dataset: " << manifest.out << "\n";
  if (progress.failed > 0)
    std::cerr << "diagnostics: " << manifest.out << ".errors.log\n";
}

harness::CampaignManifest adaptive_manifest(
    const selection::SelectionResult& result, long budget, int dim,
    const std::vector<int>& instances, int runs_per_instance,
    std::uint64_t seed, const std::string& out) {
  harness::CampaignManifest m;
  for (const auto& e : result.entries) m.configs.push_back(e.triple.repr());
  m.fids = {result.fid};
  m.instances = instances;
  m.runs_per_instance = runs_per_instance;
  m.dim = dim;
  m.budget = budget;
  m.base_seed = seed;
  m.out = out;
  return m;
}

selection::SelectionResult select_by_method(const harness::Dataset& data,
                                            int fid, long budget,
                                            const std::string& method,
                                            int top_k, bool limited) {
  const metrics::PerformanceTable perf(data, budget);
  if (method == "original") return selection::select_original(perf, fid);
  if (method == "sliding-mean")
    return selection::select_windowed(perf, fid, selection::Aggregation::mean,
                                      top_k, limited);
  if (method == "sliding-worst")
    return selection::select_windowed(
        perf, fid, selection::Aggregation::worst_case, top_k, limited);
  if (method == "two-stage")
    return selection::two_stage_final(data, fid, budget, top_k);
  throw CLI::ValidationError("unknown method: " + method);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "modular CMA-ES with online configuration switching: campaigns, "
      "fixed-target metrics, adaptive-configuration selection and analysis"};
  app.require_subcommand(1);

  // ---- enumerate ----
  auto* cmd_enum = app.add_subcommand(
      "enumerate", "Count (or list) the module configuration space");
  bool no_restarts = false, list_all = false;
  cmd_enum->add_flag("--no-restarts", no_restarts,
                     "exclude IPOP/BIPOP restart schemes");
  cmd_enum->add_flag("--list", list_all, "print every configuration string");
  cmd_enum->callback([&] {
    const auto space = enumerate_space(!no_restarts);
    if (list_all)
      for (const auto& c : space) std::cout << encode(c) << "\n";
    else
      std::cout << space.size() << "\n";
  });

  // ---- run-static / run-adaptive ----
  std::string run_manifest, run_out;
  int workers = 1;
  bool quiet = false;
  auto add_run_options = [&](CLI::App* cmd) {
    cmd->add_option("--manifest", run_manifest, "campaign manifest file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", run_out,
                    "output dataset CSV (overrides the manifest)");
    cmd->add_option("--workers", workers, "parallel run executors")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--quiet", quiet, "suppress progress output");
  };
  auto* cmd_static = app.add_subcommand(
      "run-static", "Execute a campaign of static configurations");
  add_run_options(cmd_static);
  cmd_static->callback([&] {
    auto manifest = manifest_for_run(run_manifest, run_out);
    for (const auto& token : manifest.configs)
      if (AdaptiveTriple::parse(token))
        throw CLI::ValidationError(
            "run-static manifest contains the adaptive token " + token);
    run_campaign(manifest, workers, quiet);
  });
  auto* cmd_adaptive = app.add_subcommand(
      "run-adaptive", "Execute a campaign of adaptive (C1>C2@tau) triples");
  add_run_options(cmd_adaptive);
  cmd_adaptive->callback([&] {
    auto manifest = manifest_for_run(run_manifest, run_out);
    for (const auto& token : manifest.configs)
      if (!AdaptiveTriple::parse(token))
        throw CLI::ValidationError(
            "run-adaptive manifest needs c1>c2@tau tokens, got " + token);
    run_campaign(manifest, workers, quiet);
  });

  // ---- metrics ----
  std::string data_path, out_path;
  long budget = 50000;
  auto* cmd_metrics = app.add_subcommand(
      "metrics", "Aggregate a dataset into a performance table");
  cmd_metrics->add_option("--data", data_path, "dataset CSV")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_metrics->add_option("--budget", budget,
                          "per-run evaluation budget used for ERT");
  cmd_metrics->add_option("--out", out_path, "performance table CSV")
      ->required();
  cmd_metrics->callback([&] {
    const auto data = harness::load_dataset(data_path);
    const metrics::PerformanceTable perf(data, budget);
    write_file(resolve_out(out_path), perf.to_csv());
    for (int fid : perf.fids()) {
      const int phi_min = perf.phi_min_index(fid);
      std::cout << "fid " << fid << ": " << perf.configs(fid).size()
                << " configs, phi_min " << format_target(phi_min) << " (index "
                << phi_min << "), " << perf.eligible_configs(fid).size()
                << " eligible\n";
    }
  });

  // ---- select ----
  int fid = 1, top_k = 50;
  bool limited = false;
  std::string method = "original";
  auto* cmd_select = app.add_subcommand(
      "select", "Pick adaptive configurations from a dataset");
  cmd_select->add_option("--data", data_path, "dataset CSV (static runs)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_select->add_option("--fid", fid, "benchmark function id")->required();
  cmd_select
      ->add_option("--method", method,
                   "original | sliding-mean | sliding-worst | two-stage")
      ->check(CLI::IsMember(
          {"original", "sliding-mean", "sliding-worst", "two-stage"}));
  cmd_select->add_option("--top-k", top_k, "triples to keep");
  cmd_select->add_flag("--limited", limited,
                       "cap each configuration to 3 uses per slot");
  cmd_select->add_option("--budget", budget, "per-run budget used for ERT");
  cmd_select->add_option("--out", out_path, "selection CSV")->required();
  std::string sel_run_manifest, sel_run_dataset;
  int sel_runs = 50, sel_dim = 5;
  std::vector<int> sel_instances = {1, 2, 3, 4, 5};
  std::uint64_t sel_seed = 2;
  cmd_select->add_option("--emit-run-manifest", sel_run_manifest,
                         "also write a run-adaptive manifest for the triples");
  cmd_select->add_option("--run-out", sel_run_dataset,
                         "dataset path recorded in that manifest");
  cmd_select->add_option("--runs", sel_runs,
                         "runs per instance in that manifest");
  cmd_select->add_option("--instances", sel_instances,
                         "instance list in that manifest");
  cmd_select->add_option("--dim", sel_dim, "benchmark dimension");
  cmd_select->add_option("--seed", sel_seed, "base seed in that manifest");
  cmd_select->callback([&] {
    const auto data = harness::load_dataset(data_path);
    const auto result =
        select_by_method(data, fid, budget, method, top_k, limited);
    write_file(resolve_out(out_path), selection::selection_to_csv(result));
    if (!sel_run_manifest.empty()) {
      const std::string dataset_path =
          sel_run_dataset.empty() ? "adaptive_f" + std::to_string(fid) + ".csv"
                                  : sel_run_dataset;
      write_file(resolve_out(sel_run_manifest),
                 harness::format_manifest(adaptive_manifest(
                     result, budget, sel_dim, sel_instances, sel_runs,
                     sel_seed, resolve_out(dataset_path))));
    }
    std::cout << result.entries.size() << " triples (method " << result.method
              << ", phi_min " << format_target(result.phi_min_index) << ")\n";
    for (std::size_t i = 0; i < result.entries.size() && i < 5; ++i) {
      const auto& e = result.entries[i];
      std::cout << "  " << e.triple.c1 << " > " << e.triple.c2 << " @ "
                << format_target(e.triple.tau_index) << "  value "
                << format4(e.predicted_value) << "\n";
    }
  });

  // ---- two-stage ----
  std::string stage1_path, rerun_path, manifest_out, rerun_dataset_path;
  int runs_per_instance = 50, top_statics = 50, top_triples = 50, dim = 5;
  std::vector<int> instances = {1, 2, 3, 4, 5};
  std::uint64_t seed = 1;
  bool rank_by_ert = false;
  auto* cmd_two = app.add_subcommand(
      "two-stage",
      "Robust selection: emit a rerun manifest from stage-1 data, then pick "
      "triples from the rerun data");
  cmd_two->add_option("--stage1", stage1_path, "stage-1 dataset CSV")
      ->check(CLI::ExistingFile);
  cmd_two
      ->add_option("--rerun", rerun_path,
                   "rerun dataset CSV (enables the final stage)")
      ->check(CLI::ExistingFile);
  cmd_two->add_option("--fid", fid, "benchmark function id")->required();
  cmd_two->add_option("--budget", budget, "per-run evaluation budget");
  cmd_two->add_option("--dim", dim, "benchmark dimension");
  cmd_two->add_option("--instances", instances, "instance list for the rerun");
  cmd_two->add_option("--runs", runs_per_instance, "rerun runs per instance");
  cmd_two->add_option("--seed", seed, "base seed for the rerun campaign");
  cmd_two->add_option("--top-statics", top_statics, "static candidates");
  cmd_two->add_option("--top-triples", top_triples, "triple candidates");
  cmd_two->add_flag("--rank-by-ert", rank_by_ert,
                    "rank static candidates by ERT instead of AHT");
  cmd_two->add_option("--emit-manifest", manifest_out,
                      "write the rerun campaign manifest here (stage A)");
  cmd_two->add_option("--rerun-out", rerun_dataset_path,
                      "dataset path recorded in the rerun manifest");
  cmd_two->add_option("--top-k", top_k, "triples to keep (final stage)");
  cmd_two->add_option("--out", out_path, "selection CSV (final stage)");
  std::string two_run_manifest, two_run_dataset;
  cmd_two->add_option(
      "--emit-run-manifest", two_run_manifest,
      "also write a run-adaptive manifest for the selected triples");
  cmd_two->add_option("--adaptive-out", two_run_dataset,
                      "dataset path recorded in that manifest");
  cmd_two->callback([&] {
    if (!rerun_path.empty()) {
      if (out_path.empty())
        throw CLI::ValidationError("--out is required with --rerun");
      const auto rerun = harness::load_dataset(rerun_path);
      const auto result = selection::two_stage_final(rerun, fid, budget, top_k);
      write_file(resolve_out(out_path), selection::selection_to_csv(result));
      std::cout << result.entries.size() << " triples (two_stage, phi_min "
                << format_target(result.phi_min_index) << ")\n";
      if (!two_run_manifest.empty()) {
        const std::string dataset_path =
            two_run_dataset.empty()
                ? "adaptive_f" + std::to_string(fid) + ".csv"
                : two_run_dataset;
        write_file(resolve_out(two_run_manifest),
                   harness::format_manifest(adaptive_manifest(
                       result, budget, dim, instances, runs_per_instance,
                       seed + 1, resolve_out(dataset_path))));
      }
      return;
    }
    if (stage1_path.empty())
      throw CLI::ValidationError("pass --stage1 (stage A) or --rerun (final)");
    if (manifest_out.empty())
      throw CLI::ValidationError("--emit-manifest is required with --stage1");
    const auto stage1 = harness::load_dataset(stage1_path);
    const std::string rerun_csv = rerun_dataset_path.empty()
                                      ? "rerun_f" + std::to_string(fid) + ".csv"
                                      : rerun_dataset_path;
    const auto plan = selection::two_stage_candidates(
        stage1, fid, budget, dim, instances, runs_per_instance, seed,
        resolve_out(rerun_csv), top_statics, top_triples, rank_by_ert);
    write_file(resolve_out(manifest_out),
               harness::format_manifest(plan.rerun_manifest));
    std::cout << plan.candidates.size() << " candidate configurations ("
              << plan.top_statics.size() << " top statics)\n"
              << "rerun manifest: " << resolve_out(manifest_out) << "\n";
  });

  // ---- analyze / export ----
  std::string selection_path, achieved_path, out_dir = "reports";
  auto add_analysis_options = [&](CLI::App* cmd) {
    cmd->add_option("--selection", selection_path, "selection CSV")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--rerun", rerun_path, "rerun (static) dataset CSV")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--achieved", achieved_path, "adaptive-run dataset CSV")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--budget", budget, "per-run budget used for ERT");
    cmd->add_option("--out-dir", out_dir, "report output directory");
  };
  auto* cmd_analyze = app.add_subcommand(
      "analyze", "Join a selection with its rerun and achieved datasets");
  add_analysis_options(cmd_analyze);
  cmd_analyze->callback([&] {
    const auto sel = selection::selection_from_csv(read_file(selection_path));
    const auto report = analysis::build_report(
        sel, harness::load_dataset(rerun_path),
        harness::load_dataset(achieved_path), budget);
    analysis::export_reports(report, resolve_out(out_dir));
    std::cout << "fid " << report.fid << "\n"
              << "  best static  " << report.best_static_config << "  ERT "
              << format4(report.best_static_ert) << "\n"
              << "  best adaptive ERT " << format4(report.best_adaptive_ert)
              << "\n"
              << "  relative improvement "
              << format4(report.relative_improvement_pct)
              << (report.relative_improvement_pct == -kInf ? "" : "%") << "\n"
              << "  avg of 10 best ERTs " << format4(report.avg_best10_ert)
              << "\n"
              << "  improved triples "
              << format4(report.improvement_fraction_pct) << "%\n"
              << "  module difference M " << format4(report.module_diff)
              << "\n"
              << "reports in " << resolve_out(out_dir) << "\n";
  });
  auto* cmd_export = app.add_subcommand(
      "export", "Write the plot-ready CSV and SVG report files");
  add_analysis_options(cmd_export);
  cmd_export->callback([&] {
    const auto sel = selection::selection_from_csv(read_file(selection_path));
    const auto report = analysis::build_report(
        sel, harness::load_dataset(rerun_path),
        harness::load_dataset(achieved_path), budget);
    const auto files = analysis::export_reports(report, resolve_out(out_dir));
    for (const auto& f : files) std::cout << f << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return 0;
}

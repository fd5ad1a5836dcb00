#include "cmaswitch/analysis.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace cmaswitch;
using namespace cmaswitch::analysis;
using selection::SelectionEntry;
using selection::SelectionResult;

namespace {

SelectionResult triples(const std::vector<std::pair<std::string, std::string>>&
                            pairs) {
  SelectionResult r;
  r.fid = 1;
  r.method = "two_stage";
  int rank = 0;
  for (const auto& [c1, c2] : pairs)
    r.entries.push_back({{c1, c2, 10 + rank++ % 5}, 100.0 + rank, kInf});
  return r;
}

}  // namespace

TEST_SUITE_BEGIN("analysis");

TEST_CASE("relative improvement reproduces the reported reductions") {
  CHECK(relative_improvement(1461.0, 1110.0) ==
        doctest::Approx(24.0).epsilon(0.1 / 24.0));
  CHECK(relative_improvement(1448.0, 1236.0) ==
        doctest::Approx(14.6).epsilon(0.1 / 14.6));
  CHECK(relative_improvement(500.0, 500.0) == doctest::Approx(0.0));
  CHECK(relative_improvement(100.0, kInf) == -kInf);
  CHECK_THROWS_AS(relative_improvement(kInf, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(relative_improvement(0.0, 10.0), std::invalid_argument);
}

TEST_CASE("improvement percentage is exact on constructed inputs") {
  for (double p : {1.0, 7.5, 24.0, 50.0, 99.0}) {
    const double s = 1234.5;
    CHECK(relative_improvement(s, s * (1.0 - p / 100.0)) ==
          doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("improvement fraction and the average of the best") {
  const std::vector<double> erts = {90, 110, 95, 200, kInf};
  CHECK(improvement_fraction(erts, 100.0) == doctest::Approx(40.0));
  CHECK(improvement_fraction(erts, 10.0) == doctest::Approx(0.0));
  CHECK(average_of_best(erts, 2) == doctest::Approx(92.5));
  CHECK(average_of_best(erts, 10) == kInf);  // the failed run poisons it
  CHECK(average_of_best({}, 3) == kInf);
}

TEST_CASE("module difference: identities, unanimous flip, half flip") {
  std::vector<std::pair<std::string, std::string>> same;
  for (int i = 0; i < 10; ++i) same.push_back({"00100001000", "00100001000"});
  CHECK(module_difference(triples(same)) == doctest::Approx(0.0));

  std::vector<std::pair<std::string, std::string>> flip6;
  for (int i = 0; i < 10; ++i) flip6.push_back({"00000100000", "00000000000"});
  CHECK(module_difference(triples(flip6)) == doctest::Approx(1.0));

  std::vector<std::pair<std::string, std::string>> half;
  for (int i = 0; i < 5; ++i) half.push_back({"00100000000", "00000000000"});
  for (int i = 0; i < 5; ++i) half.push_back({"00000000000", "00000000000"});
  CHECK(module_difference(triples(half)) == doctest::Approx(0.5));

  // sampler differences are ignored
  std::vector<std::pair<std::string, std::string>> sampler_only;
  for (int i = 0; i < 4; ++i) sampler_only.push_back({"00000000010", "00000000020"});
  CHECK(module_difference(triples(sampler_only)) == doctest::Approx(0.0));

  CHECK_THROWS_AS(module_difference(SelectionResult{}), std::invalid_argument);
}

TEST_CASE("module difference is invariant under reordering") {
  std::vector<std::pair<std::string, std::string>> mixed = {
      {"00100000000", "00000000000"}, {"01000000000", "01000100000"},
      {"00000000000", "00000000000"}, {"00100100000", "00000000000"},
  };
  const double forward = module_difference(triples(mixed));
  std::reverse(mixed.begin(), mixed.end());
  CHECK(module_difference(triples(mixed)) == doctest::Approx(forward));
}

TEST_CASE("activation matrix counts per slot") {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (int i = 0; i < 50; ++i) pairs.push_back({"00000010000", "00000000000"});
  const auto m = activation_matrix(triples(pairs));
  CHECK(m.n_triples == 50);
  CHECK(m.binary_counts[6][0] == 50);  // TPA on in every C1
  CHECK(m.binary_counts[6][1] == 0);   // and off in every C2
  CHECK(m.sampler_counts[0][0] == 50);
  CHECK(m.sampler_counts[1][0] == 0);

  const auto single = activation_matrix(triples({{"00000000000", "00000000000"}}));
  CHECK(single.n_triples == 1);
  for (int module = 0; module < 9; ++module) {
    CHECK(single.binary_counts[module][0] == 0);
    CHECK(single.binary_counts[module][1] == 0);
  }
  CHECK(single.sampler_counts[0][0] == 1);

  // purity: recomputing gives identical counts
  const auto again = activation_matrix(triples(pairs));
  CHECK(again.binary_counts == m.binary_counts);
  CHECK(again.sampler_counts == m.sampler_counts);
}

TEST_CASE("report export writes the documented files") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() /
                   ("cmaswitch_reports_" + std::to_string(std::random_device{}()));

  // synthetic rerun + achieved datasets around two configs
  harness::Dataset rerun, achieved;
  auto add = [](harness::Dataset& d, int instance, const std::string& config,
                int run, long scale) {
    RunRecord r;
    r.fid = 1;
    r.instance = instance;
    r.config_repr = config;
    r.run_index = run;
    for (int t = 0; t < kNumTargets; ++t) r.hits[t] = scale * (t + 1);
    r.budget_used = scale * 60;
    d.push_back(r);
  };
  for (int inst = 1; inst <= 2; ++inst)
    for (int run = 0; run < 2; ++run) {
      add(rerun, inst, "00000000000", run, 10);
      add(rerun, inst, "01000000000", run, 12);
    }
  SelectionResult sel;
  sel.fid = 1;
  sel.method = "two_stage";
  sel.phi_min_index = 50;
  sel.entries.push_back({{"00000000000", "01000000000", 20}, 100.0, kInf});
  sel.entries.push_back({{"01000000000", "00000000000", 25}, 120.0, kInf});
  for (int inst = 1; inst <= 2; ++inst)
    for (int run = 0; run < 2; ++run) {
      for (const auto& e : sel.entries) {
        RunRecord r;
        r.fid = 1;
        r.instance = inst;
        r.config_repr = e.triple.repr();
        r.run_index = run;
        for (int t = 0; t < kNumTargets; ++t) r.hits[t] = 9 * (t + 1);
        r.budget_used = 600;
        achieved.push_back(r);
      }
    }

  const auto report = build_report(sel, rerun, achieved, 100000);
  CHECK(report.best_static_config == "00000000000");
  CHECK(report.best_static_ert == doctest::Approx(510.0));  // 10 * 51
  CHECK(report.best_adaptive_ert == doctest::Approx(9.0 * 51));
  CHECK(report.improvement_fraction_pct == doctest::Approx(100.0));
  CHECK(report.module_diff == doctest::Approx(1.0));  // elitism flips in both

  const auto files = export_reports(report, dir.string());
  CHECK(files.size() == 6);
  for (const auto& f : files) CHECK(fs::exists(f));

  // activation CSV: header + 10 modules x 2 slots
  std::ifstream act(dir / "f1_activation.csv");
  int lines = 0;
  std::string line;
  while (std::getline(act, line))
    if (!line.empty()) ++lines;
  CHECK(lines == 21);

  // predicted-vs-achieved CSV: one row per executed triple
  std::ifstream pva(dir / "f1_predicted_vs_achieved.csv");
  lines = 0;
  while (std::getline(pva, line))
    if (!line.empty()) ++lines;
  CHECK(lines == 1 + 2);

  fs::remove_all(dir);
}

TEST_SUITE_END();

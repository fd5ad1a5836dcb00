#pragma once

#include "cmaswitch/harness.hpp"
#include "cmaswitch/selection.hpp"

#include <array>
#include <string>
#include <vector>

namespace cmaswitch::analysis {

using harness::Dataset;
using selection::SelectionResult;

// Per-module activation counts among the selected triples, split by slot
// (0 = C1, 1 = C2). Binary modules count option 1; the sampler is
// reported per option.
struct ActivationMatrix {
  int n_triples = 0;
  std::array<std::array<int, 2>, 9> binary_counts{};   // [module][slot]
  std::array<std::array<int, 2>, 3> sampler_counts{};  // [option][slot]
};

ActivationMatrix activation_matrix(const SelectionResult& selection);

// Maximum over the binary modules of the mean C1/C2 activation
// disagreement across the triples; in [0, 1].
double module_difference(const SelectionResult& selection);

// (static - adaptive) / static * 100. Returns -infinity ("no success")
// when the adaptive ERT is infinite.
double relative_improvement(double ert_static_best, double ert_adaptive);

// Percentage of triples whose achieved ERT beats the best static ERT.
double improvement_fraction(const std::vector<double>& achieved_erts,
                            double best_static_ert);

// Mean of the k best achieved ERTs (infinite entries stay infinite).
double average_of_best(const std::vector<double>& achieved_erts, int k);

struct TripleOutcome {
  AdaptiveTriple triple;
  double predicted_ert = kInf;
  double achieved_ert = kInf;
};

struct FidReport {
  int fid = 0;
  SelectionResult selection;
  std::vector<TripleOutcome> outcomes;  // one per executed triple
  std::string best_static_config;
  double best_static_ert = kInf;
  double best_adaptive_ert = kInf;
  double relative_improvement_pct = 0.0;
  double avg_best10_ert = kInf;
  double improvement_fraction_pct = 0.0;
  double module_diff = 0.0;
};

// Joins a selection with the rerun dataset (static baselines, predicted
// spliced ERTs) and the achieved adaptive dataset.
FidReport build_report(const SelectionResult& selection, const Dataset& rerun,
                       const Dataset& achieved, long budget);

// Writes the per-fid CSVs (activation matrix, predicted-vs-achieved,
// improvement summary), the SVG heatmap and scatter, and a manifest of
// the emitted files. Returns the paths written.
std::vector<std::string> export_reports(const FidReport& report,
                                        const std::string& out_dir);

std::string activation_csv(const ActivationMatrix& m);
std::string activation_heatmap_svg(const ActivationMatrix& m);
std::string scatter_svg(const std::vector<TripleOutcome>& outcomes);

}  // namespace cmaswitch::analysis

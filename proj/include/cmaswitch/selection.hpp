#pragma once

#include "cmaswitch/harness.hpp"
#include "cmaswitch/metrics.hpp"
#include "cmaswitch/records.hpp"

#include <string>
#include <vector>

namespace cmaswitch::selection {

using harness::Dataset;
using metrics::PerformanceTable;

struct SelectionEntry {
  AdaptiveTriple triple;
  double predicted_value = kInf;  // the method's own criterion (TH or SWV)
  double predicted_ert = kInf;    // spliced ERT at the chosen split
};

struct SelectionResult {
  int fid = 0;
  std::string method;  // original | sliding_mean | sliding_worstcase | two_stage
  int phi_min_index = 0;
  std::vector<SelectionEntry> entries;  // ascending predicted_value
};

enum class Aggregation { mean, worst_case };

// The single best triple per the one-target splicing criterion: C1 is the
// fastest configuration to each split target, C2 the cheapest from there
// to phi_min; both restricted to configurations reaching phi_min in all
// runs.
SelectionResult select_original(const PerformanceTable& perf, int fid);

// All (C1, C2, split) triples ranked by the sliding-window value under
// the given aggregation; optionally filtered by the limited-selection
// rule.
SelectionResult select_windowed(const PerformanceTable& perf, int fid,
                                Aggregation aggregation, int top_k,
                                bool limited = false);

// Greedy scan in rank order keeping a triple only while its C1 and C2
// have each appeared fewer than the cap times in their slot.
std::vector<SelectionEntry> limited_selection(
    const std::vector<SelectionEntry>& ranked, int max_c1 = 3, int max_c2 = 3,
    int quota = 50);

struct TwoStagePlan {
  int fid = 0;
  std::vector<std::string> top_statics;
  std::vector<std::string> candidates;  // deduplicated union to rerun
  harness::CampaignManifest rerun_manifest;
};

// Stage A: the best statics (AHT at the final reached target, backfilled
// from easier targets) plus every configuration appearing in the
// limited-selection top triples; emits the rerun manifest.
TwoStagePlan two_stage_candidates(const Dataset& stage1, int fid, long budget,
                                  int dim, const std::vector<int>& instances,
                                  int rerun_runs, std::uint64_t rerun_seed,
                                  const std::string& rerun_out,
                                  int top_statics = 50, int top_triples = 50,
                                  bool rank_statics_by_ert = false);

// Stage B: top triples on the rerun dataset by the mean-aggregated
// sliding window under limited selection, with spliced rerun ERTs as the
// predicted performance.
SelectionResult two_stage_final(const Dataset& rerun, int fid, long budget,
                                int top_k = 50);

std::string selection_to_csv(const SelectionResult& result);
SelectionResult selection_from_csv(const std::string& text);

}  // namespace cmaswitch::selection

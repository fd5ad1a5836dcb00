#pragma once

#include "cmaswitch/common.hpp"
#include "cmaswitch/harness.hpp"
#include "cmaswitch/records.hpp"

#include <map>
#include <string>
#include <vector>

namespace cmaswitch::metrics {

using harness::Dataset;

// Which per-(config, target) value feeds the spliced-performance formula.
enum class ValueKind { aht, worst_case, ert };

struct PerfCell {
  double aht = kInf;
  double ert = kInf;
  double worst_case = kInf;
  int successes = 0;
  int runs = 0;
};

// Per (fid, config, target) aggregates of a dataset. Infinite values are
// represented as real infinities and propagate through sums and means.
class PerformanceTable {
 public:
  PerformanceTable() = default;
  PerformanceTable(const Dataset& dataset, long budget);

  const PerfCell& cell(int fid, const std::string& config, int target) const;
  bool has(int fid, const std::string& config) const;
  double value(int fid, const std::string& config, int target,
               ValueKind kind) const;

  std::vector<int> fids() const;
  const std::vector<std::string>& configs(int fid) const;

  // Hardest target for which at least one configuration succeeded in all
  // of its runs. Throws when no configuration reaches even the easiest.
  int phi_min_index(int fid) const;

  // Configurations whose runs all reached phi_min.
  std::vector<std::string> eligible_configs(int fid) const;

  long budget() const { return budget_; }

  std::string to_csv() const;  // fid,config,target_index,aht,ert,successes,runs

 private:
  struct ConfigStats {
    std::array<PerfCell, kNumTargets> cells;
  };
  std::map<int, std::map<std::string, ConfigStats>> table_;
  std::map<int, std::vector<std::string>> config_names_;
  long budget_ = 0;
};

// Average hitting time over all runs; infinite if any run missed.
double aht(const Dataset& dataset, int fid, const std::string& config,
           int target_index);

// Expected running time, failures charged the full budget b.
double ert(const Dataset& dataset, int fid, const std::string& config,
           int target_index, long budget);

// Mean over instances of the per-instance worst hitting time.
double worst_case_value(const Dataset& dataset, int fid,
                        const std::string& config, int target_index);

// Spliced performance of running c1 to the split target and c2 onward:
// V(c1, split) - V(c2, split) + V(c2, phi_min).
double theoretical_ht(const PerformanceTable& perf, int fid,
                      const std::string& c1, const std::string& c2,
                      int split_index, int phi_min_index,
                      ValueKind kind = ValueKind::aht);

// Sum of the spliced performance over a window of targets around the
// split; infinite at the grid boundaries.
double sliding_window_value(const PerformanceTable& perf, int fid,
                            const std::string& c1, const std::string& c2,
                            int split_index, int phi_min_index,
                            ValueKind kind = ValueKind::aht, int window = 2);

}  // namespace cmaswitch::metrics

#include "cmaswitch/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cmaswitch::metrics {

namespace {

std::vector<const RunRecord*> runs_for(const Dataset& dataset, int fid,
                                       const std::string& config) {
  std::vector<const RunRecord*> runs;
  for (const auto& r : dataset)
    if (r.fid == fid && r.config_repr == config) runs.push_back(&r);
  if (runs.empty())
    throw std::invalid_argument("no runs for fid " + std::to_string(fid) +
                                ", config " + config);
  return runs;
}

}  // namespace

double aht(const Dataset& dataset, int fid, const std::string& config,
           int target_index) {
  const auto runs = runs_for(dataset, fid, config);
  double sum = 0.0;
  for (const auto* r : runs) {
    if (!r->hits[target_index]) return kInf;
    sum += static_cast<double>(*r->hits[target_index]);
  }
  return sum / static_cast<double>(runs.size());
}

double ert(const Dataset& dataset, int fid, const std::string& config,
           int target_index, long budget) {
  const auto runs = runs_for(dataset, fid, config);
  double numerator = 0.0;
  int successes = 0;
  for (const auto* r : runs) {
    if (r->hits[target_index]) {
      numerator += static_cast<double>(*r->hits[target_index]);
      ++successes;
    } else {
      numerator += static_cast<double>(budget);
    }
  }
  if (successes == 0) return kInf;
  return numerator / successes;
}

double worst_case_value(const Dataset& dataset, int fid,
                        const std::string& config, int target_index) {
  const auto runs = runs_for(dataset, fid, config);
  std::map<int, double> instance_worst;
  for (const auto* r : runs) {
    double ht = kInf;
    if (r->hits[target_index]) ht = static_cast<double>(*r->hits[target_index]);
    auto [it, inserted] = instance_worst.try_emplace(r->instance, ht);
    if (!inserted) it->second = std::max(it->second, ht);
  }
  double sum = 0.0;
  for (const auto& [instance, worst] : instance_worst) {
    if (worst == kInf) return kInf;
    sum += worst;
  }
  return sum / static_cast<double>(instance_worst.size());
}

PerformanceTable::PerformanceTable(const Dataset& dataset, long budget)
    : budget_(budget) {
  struct Acc {
    std::array<double, kNumTargets> hit_sum{};
    std::array<int, kNumTargets> hit_count{};
    std::map<int, std::array<double, kNumTargets>> instance_worst;
    int runs = 0;
  };
  std::map<int, std::map<std::string, Acc>> acc;
  for (const auto& r : dataset) {
    auto& a = acc[r.fid][r.config_repr];
    ++a.runs;
    auto [it, inserted] = a.instance_worst.try_emplace(r.instance);
    if (inserted) it->second.fill(0.0);
    for (int t = 0; t < kNumTargets; ++t) {
      if (r.hits[t]) {
        const double ht = static_cast<double>(*r.hits[t]);
        a.hit_sum[t] += ht;
        ++a.hit_count[t];
        it->second[t] = std::max(it->second[t], ht);
      } else {
        it->second[t] = kInf;
      }
    }
  }
  for (auto& [fid, configs] : acc) {
    auto& names = config_names_[fid];
    for (auto& [config, a] : configs) {
      names.push_back(config);
      auto& stats = table_[fid][config];
      for (int t = 0; t < kNumTargets; ++t) {
        PerfCell& cell = stats.cells[t];
        cell.runs = a.runs;
        cell.successes = a.hit_count[t];
        cell.aht = a.hit_count[t] == a.runs ? a.hit_sum[t] / a.runs : kInf;
        cell.ert = a.hit_count[t] > 0
                       ? (a.hit_sum[t] +
                          static_cast<double>(a.runs - a.hit_count[t]) *
                              static_cast<double>(budget_)) /
                             a.hit_count[t]
                       : kInf;
        double worst_sum = 0.0;
        bool worst_inf = false;
        for (const auto& [instance, worst] : a.instance_worst) {
          if (worst[t] == kInf) {
            worst_inf = true;
            break;
          }
          worst_sum += worst[t];
        }
        cell.worst_case =
            worst_inf ? kInf : worst_sum / a.instance_worst.size();
      }
    }
    std::sort(names.begin(), names.end());
  }
}

const PerfCell& PerformanceTable::cell(int fid, const std::string& config,
                                       int target) const {
  const auto fit = table_.find(fid);
  if (fit == table_.end())
    throw std::invalid_argument("no data for fid " + std::to_string(fid));
  const auto cit = fit->second.find(config);
  if (cit == fit->second.end())
    throw std::invalid_argument("no data for config " + config + " on fid " +
                                std::to_string(fid));
  if (target < 0 || target >= kNumTargets)
    throw std::invalid_argument("target index out of range");
  return cit->second.cells[target];
}

bool PerformanceTable::has(int fid, const std::string& config) const {
  const auto fit = table_.find(fid);
  return fit != table_.end() && fit->second.count(config) > 0;
}

double PerformanceTable::value(int fid, const std::string& config, int target,
                               ValueKind kind) const {
  const auto& c = cell(fid, config, target);
  switch (kind) {
    case ValueKind::aht: return c.aht;
    case ValueKind::worst_case: return c.worst_case;
    case ValueKind::ert: return c.ert;
  }
  throw std::invalid_argument("unknown value kind");
}

std::vector<int> PerformanceTable::fids() const {
  std::vector<int> out;
  for (const auto& [fid, _] : table_) out.push_back(fid);
  return out;
}

const std::vector<std::string>& PerformanceTable::configs(int fid) const {
  const auto it = config_names_.find(fid);
  if (it == config_names_.end())
    throw std::invalid_argument("no data for fid " + std::to_string(fid));
  return it->second;
}

int PerformanceTable::phi_min_index(int fid) const {
  const auto fit = table_.find(fid);
  if (fit == table_.end())
    throw std::invalid_argument("no data for fid " + std::to_string(fid));
  for (int t = kNumTargets - 1; t >= 0; --t) {
    for (const auto& [config, stats] : fit->second) {
      const auto& cell = stats.cells[t];
      if (cell.runs > 0 && cell.successes == cell.runs) return t;
    }
  }
  throw std::runtime_error("no configuration reaches any target on fid " +
                           std::to_string(fid));
}

std::vector<std::string> PerformanceTable::eligible_configs(int fid) const {
  const int phi_min = phi_min_index(fid);
  std::vector<std::string> out;
  for (const auto& config : configs(fid)) {
    const auto& c = cell(fid, config, phi_min);
    if (c.successes == c.runs) out.push_back(config);
  }
  return out;
}

std::string PerformanceTable::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "fid,config,target_index,aht,ert,successes,runs\n";
  for (const auto& [fid, configs] : table_)
    for (const auto& [config, stats] : configs)
      for (int t = 0; t < kNumTargets; ++t) {
        const auto& c = stats.cells[t];
        out << fid << ',' << config << ',' << t << ',';
        if (c.aht == kInf)
          out << "inf";
        else
          out << c.aht;
        out << ',';
        if (c.ert == kInf)
          out << "inf";
        else
          out << c.ert;
        out << ',' << c.successes << ',' << c.runs << "\n";
      }
  return out.str();
}

double theoretical_ht(const PerformanceTable& perf, int fid,
                      const std::string& c1, const std::string& c2,
                      int split_index, int phi_min_index, ValueKind kind) {
  const double a = perf.value(fid, c1, split_index, kind);
  const double b = perf.value(fid, c2, split_index, kind);
  const double c = perf.value(fid, c2, phi_min_index, kind);
  if (a == kInf || b == kInf || c == kInf) return kInf;
  return a - b + c;
}

double sliding_window_value(const PerformanceTable& perf, int fid,
                            const std::string& c1, const std::string& c2,
                            int split_index, int phi_min_index, ValueKind kind,
                            int window) {
  if (split_index < window || (kNumTargets - 1 - split_index) < window)
    return kInf;
  double sum = 0.0;
  for (int j = split_index - window; j <= split_index + window; ++j) {
    const double th = theoretical_ht(perf, fid, c1, c2, j, phi_min_index, kind);
    if (th == kInf) return kInf;
    sum += th;
  }
  return sum;
}

}  // namespace cmaswitch::metrics

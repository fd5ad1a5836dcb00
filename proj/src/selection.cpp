#include "cmaswitch/selection.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cmaswitch::selection {

namespace {

using metrics::ValueKind;

bool entry_less(const SelectionEntry& a, const SelectionEntry& b) {
  if (a.predicted_value != b.predicted_value)
    return a.predicted_value < b.predicted_value;
  if (a.triple.c1 != b.triple.c1) return a.triple.c1 < b.triple.c1;
  if (a.triple.c2 != b.triple.c2) return a.triple.c2 < b.triple.c2;
  return a.triple.tau_index < b.triple.tau_index;
}

double spliced_ert(const PerformanceTable& perf, int fid,
                   const AdaptiveTriple& t, int phi_min) {
  return metrics::theoretical_ht(perf, fid, t.c1, t.c2, t.tau_index, phi_min,
                                 ValueKind::ert);
}

}  // namespace

SelectionResult select_original(const PerformanceTable& perf, int fid) {
  SelectionResult result;
  result.fid = fid;
  result.method = "original";
  result.phi_min_index = perf.phi_min_index(fid);
  const auto eligible = perf.eligible_configs(fid);
  if (eligible.empty())
    throw std::runtime_error("no eligible configuration on fid " +
                             std::to_string(fid));
  const int phi_min = result.phi_min_index;

  std::vector<SelectionEntry> per_split;
  for (int split = 0; split < phi_min; ++split) {
    // eligible configs reach phi_min in every run, so their AHT is finite
    // at every split at or before it
    std::string c1, c2;
    double best_aht = kInf, best_tail = kInf;
    for (const auto& config : eligible) {
      const double a = perf.value(fid, config, split, ValueKind::aht);
      if (a < best_aht) {
        best_aht = a;
        c1 = config;
      }
      const double tail = perf.value(fid, config, phi_min, ValueKind::aht) - a;
      if (tail < best_tail) {
        best_tail = tail;
        c2 = config;
      }
    }
    SelectionEntry e;
    e.triple = {c1, c2, split};
    e.predicted_value =
        metrics::theoretical_ht(perf, fid, c1, c2, split, phi_min);
    e.predicted_ert = spliced_ert(perf, fid, e.triple, phi_min);
    per_split.push_back(std::move(e));
  }
  if (per_split.empty()) {
    // phi_min is the easiest target: no split precedes it, the selection
    // degenerates to the best static configuration
    std::string best;
    double best_aht = kInf;
    for (const auto& config : eligible) {
      const double a = perf.value(fid, config, phi_min, ValueKind::aht);
      if (a < best_aht) {
        best_aht = a;
        best = config;
      }
    }
    SelectionEntry e;
    e.triple = {best, best, phi_min};
    e.predicted_value = best_aht;
    e.predicted_ert = spliced_ert(perf, fid, e.triple, phi_min);
    result.entries.push_back(std::move(e));
    return result;
  }
  std::stable_sort(per_split.begin(), per_split.end(), entry_less);
  result.entries.push_back(per_split.front());
  return result;
}

SelectionResult select_windowed(const PerformanceTable& perf, int fid,
                                Aggregation aggregation, int top_k,
                                bool limited) {
  SelectionResult result;
  result.fid = fid;
  result.method =
      aggregation == Aggregation::mean ? "sliding_mean" : "sliding_worstcase";
  result.phi_min_index = perf.phi_min_index(fid);
  const auto eligible = perf.eligible_configs(fid);
  if (eligible.empty())
    throw std::runtime_error("no eligible configuration on fid " +
                             std::to_string(fid));
  const ValueKind kind = aggregation == Aggregation::mean
                             ? ValueKind::aht
                             : ValueKind::worst_case;
  const int phi_min = result.phi_min_index;

  std::vector<SelectionEntry> ranked;
  for (const auto& c1 : eligible)
    for (const auto& c2 : eligible)
      for (int split = 0; split < kNumTargets; ++split) {
        const double swv = metrics::sliding_window_value(perf, fid, c1, c2,
                                                         split, phi_min, kind);
        if (swv == kInf) continue;
        SelectionEntry e;
        e.triple = {c1, c2, split};
        e.predicted_value = swv;
        ranked.push_back(std::move(e));
      }
  if (ranked.empty())
    throw std::runtime_error("no finite sliding-window value on fid " +
                             std::to_string(fid) +
                             "; the window never fits before phi_min");
  std::stable_sort(ranked.begin(), ranked.end(), entry_less);

  // identity pairs are allowed but only the best of them may stay
  std::vector<SelectionEntry> deduped;
  bool identity_taken = false;
  for (auto& e : ranked) {
    if (e.triple.c1 == e.triple.c2) {
      if (identity_taken) continue;
      identity_taken = true;
    }
    deduped.push_back(std::move(e));
  }

  auto chosen = limited ? limited_selection(deduped, 3, 3, top_k)
                        : std::vector<SelectionEntry>(
                              deduped.begin(),
                              deduped.begin() +
                                  std::min<std::size_t>(top_k, deduped.size()));
  for (auto& e : chosen)
    e.predicted_ert = spliced_ert(perf, fid, e.triple, phi_min);
  result.entries = std::move(chosen);
  return result;
}

std::vector<SelectionEntry> limited_selection(
    const std::vector<SelectionEntry>& ranked, int max_c1, int max_c2,
    int quota) {
  std::vector<SelectionEntry> kept;
  std::map<std::string, int> used_c1, used_c2;
  for (const auto& e : ranked) {
    if (static_cast<int>(kept.size()) >= quota) break;
    if (used_c1[e.triple.c1] >= max_c1) continue;
    if (used_c2[e.triple.c2] >= max_c2) continue;
    ++used_c1[e.triple.c1];
    ++used_c2[e.triple.c2];
    kept.push_back(e);
  }
  return kept;
}

TwoStagePlan two_stage_candidates(const Dataset& stage1, int fid, long budget,
                                  int dim, const std::vector<int>& instances,
                                  int rerun_runs, std::uint64_t rerun_seed,
                                  const std::string& rerun_out, int top_statics,
                                  int top_triples, bool rank_statics_by_ert) {
  const PerformanceTable perf(stage1, budget);
  TwoStagePlan plan;
  plan.fid = fid;

  // final reached target: hardest hit by at least one run of any config
  const auto& configs = perf.configs(fid);
  int t_final = -1;
  for (int t = kNumTargets - 1; t >= 0 && t_final < 0; --t)
    for (const auto& config : configs)
      if (perf.cell(fid, config, t).successes > 0) {
        t_final = t;
        break;
      }
  if (t_final < 0)
    throw std::runtime_error("no run hit any target on fid " +
                             std::to_string(fid));

  const ValueKind rank_kind =
      rank_statics_by_ert ? ValueKind::ert : ValueKind::aht;
  std::set<std::string> taken;
  for (int t = t_final; t >= 0 && static_cast<int>(plan.top_statics.size()) <
                                      top_statics;
       --t) {
    std::vector<std::pair<double, std::string>> here;
    for (const auto& config : configs) {
      if (taken.count(config)) continue;
      const double v = perf.value(fid, config, t, rank_kind);
      if (v != kInf) here.push_back({v, config});
    }
    std::sort(here.begin(), here.end());
    for (const auto& [v, config] : here) {
      if (static_cast<int>(plan.top_statics.size()) >= top_statics) break;
      plan.top_statics.push_back(config);
      taken.insert(config);
    }
  }
  if (plan.top_statics.empty())
    throw std::runtime_error("empty candidate set on fid " +
                             std::to_string(fid));

  // plus every configuration used by the top adaptive triples under the
  // limited-selection rule (worst-case window, the pre-rerun criterion)
  const auto triples =
      select_windowed(perf, fid, Aggregation::worst_case, top_triples, true);

  std::set<std::string> candidate_set(plan.top_statics.begin(),
                                      plan.top_statics.end());
  for (const auto& e : triples.entries) {
    candidate_set.insert(e.triple.c1);
    candidate_set.insert(e.triple.c2);
  }
  plan.candidates.assign(candidate_set.begin(), candidate_set.end());

  auto& m = plan.rerun_manifest;
  m.configs = plan.candidates;
  m.fids = {fid};
  m.instances = instances;
  m.runs_per_instance = rerun_runs;
  m.dim = dim;
  m.budget = budget;
  m.base_seed = rerun_seed;
  m.out = rerun_out;
  return plan;
}

SelectionResult two_stage_final(const Dataset& rerun, int fid, long budget,
                                int top_k) {
  const PerformanceTable perf(rerun, budget);
  auto result = select_windowed(perf, fid, Aggregation::mean, top_k, true);
  result.method = "two_stage";
  return result;
}

std::string selection_to_csv(const SelectionResult& result) {
  std::ostringstream out;
  out.precision(17);
  out << "# fid=" << result.fid << " method=" << result.method
      << " phi_min_index=" << result.phi_min_index << "\n";
  out << "rank,c1,c2,tau_index,predicted_value,method\n";
  int rank = 1;
  for (const auto& e : result.entries)
    out << rank++ << ',' << e.triple.c1 << ',' << e.triple.c2 << ','
        << e.triple.tau_index << ',' << e.predicted_value << ','
        << result.method << "\n";
  return out.str();
}

SelectionResult selection_from_csv(const std::string& text) {
  SelectionResult result;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string token;
      while (meta >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const auto key = token.substr(0, eq);
        const auto value = token.substr(eq + 1);
        if (key == "fid") result.fid = std::stoi(value);
        if (key == "method") result.method = value;
        if (key == "phi_min_index") result.phi_min_index = std::stoi(value);
      }
      continue;
    }
    if (line.rfind("rank,", 0) == 0) continue;
    std::vector<std::string> fields;
    std::istringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 6)
      throw std::runtime_error("selection line " + std::to_string(line_no) +
                               ": expected 6 columns");
    SelectionEntry e;
    e.triple = {fields[1], fields[2], std::stoi(fields[3])};
    e.predicted_value = std::stod(fields[4]);
    result.entries.push_back(std::move(e));
  }
  return result;
}

}  // namespace cmaswitch::selection

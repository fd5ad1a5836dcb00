#include "cmaswitch/analysis.hpp"

#include "cmaswitch/config.hpp"
#include "cmaswitch/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cmaswitch::analysis {

ActivationMatrix activation_matrix(const SelectionResult& selection) {
  if (selection.entries.empty())
    throw std::invalid_argument("activation matrix of an empty selection");
  ActivationMatrix m;
  m.n_triples = static_cast<int>(selection.entries.size());
  for (const auto& e : selection.entries) {
    const ModuleConfiguration sides[2] = {decode(e.triple.c1),
                                          decode(e.triple.c2)};
    for (int slot = 0; slot < 2; ++slot) {
      for (int module = 0; module < 9; ++module)
        m.binary_counts[module][slot] += sides[slot].option(module);
      m.sampler_counts[sides[slot].sampler][slot] += 1;
    }
  }
  return m;
}

double module_difference(const SelectionResult& selection) {
  if (selection.entries.empty())
    throw std::invalid_argument("module difference of an empty selection");
  const double n = static_cast<double>(selection.entries.size());
  double best = 0.0;
  for (int module = 0; module < 9; ++module) {
    int disagreements = 0;
    for (const auto& e : selection.entries) {
      const int a = decode(e.triple.c1).option(module);
      const int b = decode(e.triple.c2).option(module);
      disagreements += std::abs(a - b);
    }
    best = std::max(best, disagreements / n);
  }
  return best;
}

double relative_improvement(double ert_static_best, double ert_adaptive) {
  if (!(ert_static_best > 0.0) || ert_static_best == kInf)
    throw std::invalid_argument(
        "relative improvement needs a finite positive static ERT");
  if (ert_adaptive == kInf) return -kInf;  // printed as "no success"
  return (ert_static_best - ert_adaptive) / ert_static_best * 100.0;
}

double improvement_fraction(const std::vector<double>& achieved_erts,
                            double best_static_ert) {
  if (achieved_erts.empty()) return 0.0;
  int improved = 0;
  for (double e : achieved_erts)
    if (e < best_static_ert) ++improved;
  return 100.0 * improved / static_cast<double>(achieved_erts.size());
}

double average_of_best(const std::vector<double>& achieved_erts, int k) {
  if (achieved_erts.empty() || k < 1) return kInf;
  std::vector<double> sorted(achieved_erts);
  std::sort(sorted.begin(), sorted.end());
  const int n = std::min<int>(k, static_cast<int>(sorted.size()));
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (sorted[i] == kInf) return kInf;
    sum += sorted[i];
  }
  return sum / n;
}

FidReport build_report(const SelectionResult& selection, const Dataset& rerun,
                       const Dataset& achieved, long budget) {
  FidReport report;
  report.fid = selection.fid;
  report.selection = selection;

  const metrics::PerformanceTable rerun_table(rerun, budget);
  const int phi_min = rerun_table.phi_min_index(selection.fid);

  // best static over the rerun dataset, measured at phi_min
  for (const auto& config : rerun_table.configs(selection.fid)) {
    const double e =
        rerun_table.value(selection.fid, config, phi_min, metrics::ValueKind::ert);
    if (e < report.best_static_ert) {
      report.best_static_ert = e;
      report.best_static_config = config;
    }
  }

  const metrics::PerformanceTable achieved_table(achieved, budget);
  std::vector<double> achieved_erts;
  for (const auto& e : selection.entries) {
    TripleOutcome outcome;
    outcome.triple = e.triple;
    outcome.predicted_ert = metrics::theoretical_ht(
        rerun_table, selection.fid, e.triple.c1, e.triple.c2,
        e.triple.tau_index, phi_min, metrics::ValueKind::ert);
    const std::string token = e.triple.repr();
    if (achieved_table.has(selection.fid, token))
      outcome.achieved_ert = achieved_table.value(selection.fid, token, phi_min,
                                                  metrics::ValueKind::ert);
    report.outcomes.push_back(outcome);
    if (achieved_table.has(selection.fid, token))
      achieved_erts.push_back(outcome.achieved_ert);
  }

  report.best_adaptive_ert = kInf;
  for (double e : achieved_erts)
    report.best_adaptive_ert = std::min(report.best_adaptive_ert, e);
  report.relative_improvement_pct =
      relative_improvement(report.best_static_ert, report.best_adaptive_ert);
  report.avg_best10_ert = average_of_best(achieved_erts, 10);
  report.improvement_fraction_pct =
      improvement_fraction(achieved_erts, report.best_static_ert);
  report.module_diff = module_difference(selection);
  return report;
}

std::string activation_csv(const ActivationMatrix& m) {
  std::ostringstream out;
  out << "module_index,module_name,slot,n_triples,count_opt0,count_opt1,count_opt2\n";
  for (int module = 0; module < 10; ++module) {
    for (int slot = 0; slot < 2; ++slot) {
      out << module + 1 << ',' << module_name(module) << ','
          << (slot == 0 ? "C1" : "C2") << ',' << m.n_triples << ',';
      if (module < 9) {
        const int on = m.binary_counts[module][slot];
        out << (m.n_triples - on) << ',' << on << ",0\n";
      } else {
        out << m.sampler_counts[0][slot] << ',' << m.sampler_counts[1][slot]
            << ',' << m.sampler_counts[2][slot] << "\n";
      }
    }
  }
  return out.str();
}

namespace {

std::string shade(double fraction) {
  const int level = 255 - static_cast<int>(std::clamp(fraction, 0.0, 1.0) * 255);
  std::ostringstream s;
  s << "rgb(" << level << ',' << level << ",255)";
  return s.str();
}

}  // namespace

std::string activation_heatmap_svg(const ActivationMatrix& m) {
  // 10 module rows x 2 slot columns, shading proportional to count / n
  constexpr int cell = 28, label = 150, top = 24;
  const int width = label + 2 * cell + 10;
  const int height = top + 10 * cell + 10;
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "' font-family='sans-serif' font-size='11'>\n";
  svg << "<text x='" << label + cell / 2 << "' y='14' text-anchor='middle'>C1</text>\n";
  svg << "<text x='" << label + cell + cell / 2
      << "' y='14' text-anchor='middle'>C2</text>\n";
  for (int module = 0; module < 10; ++module) {
    const int y = top + module * cell;
    svg << "<text x='4' y='" << y + cell / 2 + 4 << "'>" << module_name(module)
        << "</text>\n";
    for (int slot = 0; slot < 2; ++slot) {
      const int count = module < 9 ? m.binary_counts[module][slot]
                                   : m.sampler_counts[1][slot] +
                                         m.sampler_counts[2][slot];
      const double fraction =
          m.n_triples > 0 ? static_cast<double>(count) / m.n_triples : 0.0;
      svg << "<rect x='" << label + slot * cell << "' y='" << y << "' width='"
          << cell - 2 << "' height='" << cell - 2 << "' fill='"
          << shade(fraction) << "' stroke='black'/>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string scatter_svg(const std::vector<TripleOutcome>& outcomes) {
  constexpr int size = 360, margin = 45;
  double lo = kInf, hi = 0.0;
  for (const auto& o : outcomes) {
    for (double v : {o.predicted_ert, o.achieved_ert}) {
      if (v == kInf || v <= 0.0) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (lo == kInf) {
    lo = 1.0;
    hi = 10.0;
  }
  const double llo = std::log10(lo) - 0.05, lhi = std::log10(hi) + 0.05;
  auto place = [&](double v) {
    return margin + (std::log10(v) - llo) / (lhi - llo) * (size - 2 * margin);
  };
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << size
      << "' height='" << size << "' font-family='sans-serif' font-size='11'>\n";
  svg << "<line x1='" << margin << "' y1='" << size - margin << "' x2='"
      << size - margin << "' y2='" << margin
      << "' stroke='gray' stroke-dasharray='4'/>\n";
  svg << "<text x='" << size / 2 << "' y='" << size - 8
      << "' text-anchor='middle'>predicted ERT (log)</text>\n";
  svg << "<text x='12' y='" << size / 2
      << "' text-anchor='middle' transform='rotate(-90 12 " << size / 2
      << ")'>achieved ERT (log)</text>\n";
  for (const auto& o : outcomes) {
    if (o.predicted_ert == kInf || o.achieved_ert == kInf) continue;
    if (o.predicted_ert <= 0.0 || o.achieved_ert <= 0.0) continue;
    svg << "<circle cx='" << place(o.predicted_ert) << "' cy='"
        << size - place(o.achieved_ert) + 0.0 << "' r='3' fill='steelblue'/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::string> export_reports(const FidReport& report,
                                        const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (!fs::is_directory(out_dir))
    throw std::runtime_error("cannot create report directory: " + out_dir);

  const std::string prefix =
      (fs::path(out_dir) / ("f" + std::to_string(report.fid))).string();
  std::vector<std::string> written;
  auto emit = [&](const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
    written.push_back(path);
  };

  emit(prefix + "_activation.csv", activation_csv(activation_matrix(report.selection)));
  emit(prefix + "_activation.svg",
       activation_heatmap_svg(activation_matrix(report.selection)));

  {
    std::ostringstream csv;
    csv.precision(17);
    csv << "rank,c1,c2,tau_index,predicted_ert,achieved_ert\n";
    int rank = 1;
    for (const auto& o : report.outcomes) {
      csv << rank++ << ',' << o.triple.c1 << ',' << o.triple.c2 << ','
          << o.triple.tau_index << ',';
      if (o.predicted_ert == kInf)
        csv << "inf";
      else
        csv << o.predicted_ert;
      csv << ',';
      if (o.achieved_ert == kInf)
        csv << "inf";
      else
        csv << o.achieved_ert;
      csv << "\n";
    }
    emit(prefix + "_predicted_vs_achieved.csv", csv.str());
  }
  emit(prefix + "_predicted_vs_achieved.svg", scatter_svg(report.outcomes));

  {
    std::ostringstream csv;
    csv.precision(10);
    csv << "fid,best_static_config,best_static_ert,best_adaptive_ert,"
           "relative_improvement_pct,avg_best10_ert,improvement_fraction_pct,"
           "module_difference\n";
    csv << report.fid << ',' << report.best_static_config << ','
        << report.best_static_ert << ',';
    if (report.best_adaptive_ert == kInf)
      csv << "inf";
    else
      csv << report.best_adaptive_ert;
    csv << ',';
    if (report.relative_improvement_pct == -kInf)
      csv << "no success";
    else
      csv << report.relative_improvement_pct;
    csv << ',';
    if (report.avg_best10_ert == kInf)
      csv << "inf";
    else
      csv << report.avg_best10_ert;
    csv << ',' << report.improvement_fraction_pct << ',' << report.module_diff
        << "\n";
    emit(prefix + "_improvement.csv", csv.str());
  }

  {
    std::ostringstream manifest;
    for (const auto& path : written)
      manifest << fs::path(path).filename().string() << "\n";
    emit(prefix + "_files.txt", manifest.str());
  }
  return written;
}

}  // namespace cmaswitch::analysis

#include "cmaswitch/harness.hpp"

#include "cmaswitch/benchmarks.hpp"
#include "cmaswitch/config.hpp"
#include "cmaswitch/engine.hpp"

#include <atomic>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace cmaswitch::harness {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) parts.push_back(item);
  if (!s.empty() && s.back() == sep) parts.push_back("");
  return parts;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> parse_list(const std::string& value) {
  std::vector<std::string> items;
  for (const auto& part : split(value, ',')) {
    const auto t = trim(part);
    if (!t.empty()) items.push_back(t);
  }
  return items;
}

std::vector<int> parse_int_list(const std::string& value, const char* what) {
  std::vector<int> items;
  for (const auto& t : parse_list(value)) {
    try {
      items.push_back(std::stoi(t));
    } catch (const std::exception&) {
      throw std::runtime_error(std::string("manifest: bad ") + what + " entry '" +
                               t + "'");
    }
  }
  return items;
}

}  // namespace

CampaignManifest parse_manifest(const std::string& text) {
  CampaignManifest m;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("manifest line " + std::to_string(line_no) +
                               ": expected 'key = value'");
    const auto key = trim(stripped.substr(0, eq));
    const auto value = trim(stripped.substr(eq + 1));
    if (key == "configs")
      m.configs = parse_list(value);
    else if (key == "fids")
      m.fids = parse_int_list(value, "fid");
    else if (key == "instances")
      m.instances = parse_int_list(value, "instance");
    else if (key == "runs_per_instance")
      m.runs_per_instance = std::stoi(value);
    else if (key == "dim")
      m.dim = std::stoi(value);
    else if (key == "budget")
      m.budget = std::stol(value);
    else if (key == "base_seed")
      m.base_seed = std::stoull(value);
    else if (key == "out")
      m.out = value;
    else
      throw std::runtime_error("manifest line " + std::to_string(line_no) +
                               ": unknown key '" + key + "'");
  }
  if (m.configs.empty()) throw std::runtime_error("manifest: no configs");
  if (m.fids.empty()) throw std::runtime_error("manifest: no fids");
  if (m.instances.empty()) throw std::runtime_error("manifest: no instances");
  if (m.runs_per_instance < 1)
    throw std::runtime_error("manifest: runs_per_instance must be >= 1");
  for (const auto& token : m.configs) {
    if (!AdaptiveTriple::parse(token)) decode(token);  // throws when invalid
  }
  return m;
}

CampaignManifest load_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open manifest: " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_manifest(buf.str());
}

std::string format_manifest(const CampaignManifest& m) {
  std::ostringstream out;
  auto join = [](const auto& items) {
    std::ostringstream s;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) s << ",";
      s << items[i];
    }
    return s.str();
  };
  out << "configs = " << join(m.configs) << "\n";
  out << "fids = " << join(m.fids) << "\n";
  out << "instances = " << join(m.instances) << "\n";
  out << "runs_per_instance = " << m.runs_per_instance << "\n";
  out << "dim = " << m.dim << "\n";
  out << "budget = " << m.effective_budget() << "\n";
  out << "base_seed = " << m.base_seed << "\n";
  if (!m.out.empty()) out << "out = " << m.out << "\n";
  return out.str();
}

std::string dataset_to_csv(const Dataset& records, bool header) {
  std::ostringstream out;
  if (header) {
    out << "fid,instance,config,run_index,seed,switch_eval,budget_used";
    for (int i = 0; i < kNumTargets; ++i) out << ",hit_" << i;
    out << "\n";
  }
  for (const auto& r : records) {
    out << r.fid << ',' << r.instance << ',' << r.config_repr << ','
        << r.run_index << ',' << r.seed << ',';
    if (r.switch_eval) out << *r.switch_eval;
    out << ',' << r.budget_used;
    for (int i = 0; i < kNumTargets; ++i) {
      out << ',';
      if (r.hits[i]) out << *r.hits[i];
    }
    out << "\n";
  }
  return out.str();
}

Dataset dataset_from_csv(const std::string& text) {
  Dataset records;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  constexpr std::size_t kColumns = 7 + kNumTargets;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("fid,", 0) == 0) continue;  // header
    const auto fields = split(line, ',');
    if (fields.size() != kColumns)
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": expected " + std::to_string(kColumns) +
                               " columns, got " + std::to_string(fields.size()));
    try {
      RunRecord r;
      r.fid = std::stoi(fields[0]);
      r.instance = std::stoi(fields[1]);
      r.config_repr = fields[2];
      r.run_index = std::stoi(fields[3]);
      r.seed = std::stoull(fields[4]);
      if (!fields[5].empty()) r.switch_eval = std::stol(fields[5]);
      r.budget_used = std::stol(fields[6]);
      for (int i = 0; i < kNumTargets; ++i)
        if (!fields[7 + i].empty()) r.hits[i] = std::stol(fields[7 + i]);
      records.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::runtime_error("dataset line " + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
  return records;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open dataset: " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return dataset_from_csv(buf.str());
}

void append_records(const std::string& path, const Dataset& records) {
  const bool fresh = !std::filesystem::exists(path) ||
                     std::filesystem::file_size(path) == 0;
  std::ofstream f(path, std::ios::app);
  if (!f) throw std::runtime_error("cannot open dataset for append: " + path);
  f << dataset_to_csv(records, fresh);
  if (!f) throw std::runtime_error("write failure on dataset: " + path);
}

std::uint64_t derive_seed(std::uint64_t base_seed, const std::string& config,
                          int fid, int instance, int run_index) {
  std::uint64_t h = hash_string(base_seed, config);
  h = hash_combine(h, static_cast<std::uint64_t>(fid));
  h = hash_combine(h, static_cast<std::uint64_t>(instance));
  h = hash_combine(h, static_cast<std::uint64_t>(run_index));
  return h;
}

namespace {

struct Cell {
  std::string config;
  int fid, instance, run_index;
};

RunRecord execute_cell(const Cell& cell, const CampaignManifest& m) {
  const auto fn = benchmarks::make_function(cell.fid, m.dim, cell.instance);
  const Objective objective = [fn](const Vector& x) { return fn.evaluate(x); };
  const std::uint64_t seed =
      derive_seed(m.base_seed, cell.config, cell.fid, cell.instance,
                  cell.run_index);
  RunRecord rec;
  if (const auto triple = AdaptiveTriple::parse(cell.config)) {
    rec = run_adaptive(*triple, objective, fn.f_opt(), m.dim,
                       m.effective_budget(), seed);
  } else {
    rec = run_static(decode(cell.config), objective, fn.f_opt(), m.dim,
                     m.effective_budget(), seed);
  }
  rec.fid = cell.fid;
  rec.instance = cell.instance;
  rec.run_index = cell.run_index;
  return rec;
}

}  // namespace

CampaignProgress execute_campaign(
    const CampaignManifest& manifest, int workers,
    const std::function<void(std::size_t, std::size_t)>& on_progress) {
  if (manifest.out.empty())
    throw std::runtime_error("campaign manifest has no output path");
  CampaignProgress progress;

  std::set<std::string> done;
  if (std::filesystem::exists(manifest.out)) {
    for (const auto& r : load_dataset(manifest.out))
      done.insert(r.config_repr + "|" + std::to_string(r.fid) + "|" +
                  std::to_string(r.instance) + "|" + std::to_string(r.run_index));
  }

  std::vector<Cell> cells;
  for (const auto& config : manifest.configs)
    for (int fid : manifest.fids)
      for (int instance : manifest.instances)
        for (int run = 0; run < manifest.runs_per_instance; ++run) {
          const std::string key = config + "|" + std::to_string(fid) + "|" +
                                  std::to_string(instance) + "|" +
                                  std::to_string(run);
          if (done.count(key))
            ++progress.skipped;
          else
            cells.push_back({config, fid, instance, run});
        }

  std::vector<RunRecord> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> completed{0};
  std::mutex progress_mutex;
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) break;
      results[i] = execute_cell(cells[i], manifest);
      const std::size_t c = ++completed;
      if (on_progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        on_progress(c, cells.size());
      }
    }
  };
  const int n_workers = std::max(1, workers);
  if (n_workers == 1 || cells.size() <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::ofstream errlog;
  for (const auto& r : results) {
    if (!r.error.empty()) {
      ++progress.failed;
      if (!errlog.is_open()) errlog.open(manifest.out + ".errors.log", std::ios::app);
      errlog << r.fid << ',' << r.instance << ',' << r.config_repr << ','
             << r.run_index << ": " << r.error << "\n";
    }
  }
  append_records(manifest.out, results);
  progress.executed = results.size();

  // reproducibility sidecar: the exact instances this campaign used
  std::ofstream suite(manifest.out + ".suite.txt");
  suite << benchmarks::suite_manifest(manifest.fids, manifest.dim,
                                      manifest.instances);
  return progress;
}

}  // namespace cmaswitch::harness

#pragma once

#include "cmaswitch/records.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace cmaswitch::harness {

// A campaign grid: every config token (11-digit string or adaptive
// triple token) crossed with every (fid, instance, run index).
struct CampaignManifest {
  std::vector<std::string> configs;
  std::vector<int> fids;
  std::vector<int> instances;
  int runs_per_instance = 5;
  int dim = 5;
  long budget = 0;  // 0 means the default 10^4 * dim
  std::uint64_t base_seed = 1;
  std::string out;

  long effective_budget() const { return budget > 0 ? budget : 10000L * dim; }
  std::size_t total_runs() const {
    return configs.size() * fids.size() * instances.size() *
           static_cast<std::size_t>(runs_per_instance);
  }
};

CampaignManifest parse_manifest(const std::string& text);
CampaignManifest load_manifest(const std::string& path);
std::string format_manifest(const CampaignManifest& manifest);

using Dataset = std::vector<RunRecord>;

// CSV round trip. Malformed rows are reported with their line number.
Dataset load_dataset(const std::string& path);
void append_records(const std::string& path, const Dataset& records);
std::string dataset_to_csv(const Dataset& records, bool header);
Dataset dataset_from_csv(const std::string& text);

// Deterministic per-cell seed.
std::uint64_t derive_seed(std::uint64_t base_seed, const std::string& config,
                          int fid, int instance, int run_index);

struct CampaignProgress {
  std::size_t executed = 0;
  std::size_t skipped = 0;  // already present on disk
  std::size_t failed = 0;   // recorded as diagnostic rows
};

// Executes every grid cell not already present in the output dataset,
// appending results in grid order. Runs cells concurrently up to
// `workers`; appends are serialized. Failed runs become diagnostic rows.
CampaignProgress execute_campaign(const CampaignManifest& manifest,
                                  int workers = 1,
                                  const std::function<void(std::size_t, std::size_t)>&
                                      on_progress = nullptr);

}  // namespace cmaswitch::harness

#pragma once

#include <array>
#include <string>
#include <vector>

namespace cmaswitch {

inline constexpr int kNumModules = 11;

// Modules in canonical digit-string order. The first nine are binary,
// the last two ternary.
enum class Module : int {
  active_update = 0,
  elitism = 1,
  mirrored = 2,
  orthogonal = 3,
  sequential = 4,
  threshold_convergence = 5,
  tpa = 6,
  pairwise = 7,
  weights_scheme = 8,
  sampler = 9,
  restart_scheme = 10,
};

inline constexpr std::array<int, kNumModules> kModuleOptionCounts = {
    2, 2, 2, 2, 2, 2, 2, 2, 2, 3, 3};

const char* module_name(int module_index);

// A complete assignment of one option per module. Canonical textual form
// is the 11-digit string with digit k holding the option of module k.
struct ModuleConfiguration {
  int active_update = 0;
  int elitism = 0;  // 0 = (mu,lambda), 1 = (mu+lambda)
  int mirrored = 0;
  int orthogonal = 0;
  int sequential = 0;
  int threshold_convergence = 0;
  int tpa = 0;
  int pairwise = 0;
  int weights_scheme = 0;  // 0 = log-decreasing, 1 = uniform 1/mu
  int sampler = 0;         // 0 = Gaussian, 1 = Sobol, 2 = Halton
  int restart_scheme = 0;  // 0 = off, 1 = IPOP, 2 = BIPOP

  int option(int module_index) const;
  void set_option(int module_index, int value);
  bool valid() const;

  bool operator==(const ModuleConfiguration&) const = default;
};

std::string encode(const ModuleConfiguration& config);

// Inverse of encode. Throws std::invalid_argument naming the offending
// position when the string is not a valid representation.
ModuleConfiguration decode(const std::string& repr);

// Every configuration in lexicographic digit-string order: 4,608 in
// total, 1,536 when restart schemes are excluded.
std::vector<ModuleConfiguration> enumerate_space(bool include_restarts);

struct NamedVariant {
  std::string name;
  ModuleConfiguration config;
};

// The ten commonly used CMA-ES variants and their representations.
const std::vector<NamedVariant>& common_variants();

}  // namespace cmaswitch

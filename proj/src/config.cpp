#include "cmaswitch/config.hpp"

#include <stdexcept>

namespace cmaswitch {

const char* module_name(int module_index) {
  static const char* names[kNumModules] = {
      "active_update",   "elitism", "mirrored", "orthogonal",
      "sequential",      "threshold_convergence", "tpa", "pairwise",
      "weights_scheme",  "sampler", "restart_scheme"};
  if (module_index < 0 || module_index >= kNumModules)
    throw std::invalid_argument("module index out of range");
  return names[module_index];
}

int ModuleConfiguration::option(int module_index) const {
  switch (module_index) {
    case 0: return active_update;
    case 1: return elitism;
    case 2: return mirrored;
    case 3: return orthogonal;
    case 4: return sequential;
    case 5: return threshold_convergence;
    case 6: return tpa;
    case 7: return pairwise;
    case 8: return weights_scheme;
    case 9: return sampler;
    case 10: return restart_scheme;
    default: throw std::invalid_argument("module index out of range");
  }
}

void ModuleConfiguration::set_option(int module_index, int value) {
  switch (module_index) {
    case 0: active_update = value; break;
    case 1: elitism = value; break;
    case 2: mirrored = value; break;
    case 3: orthogonal = value; break;
    case 4: sequential = value; break;
    case 5: threshold_convergence = value; break;
    case 6: tpa = value; break;
    case 7: pairwise = value; break;
    case 8: weights_scheme = value; break;
    case 9: sampler = value; break;
    case 10: restart_scheme = value; break;
    default: throw std::invalid_argument("module index out of range");
  }
}

bool ModuleConfiguration::valid() const {
  for (int i = 0; i < kNumModules; ++i) {
    const int v = option(i);
    if (v < 0 || v >= kModuleOptionCounts[i]) return false;
  }
  return true;
}

std::string encode(const ModuleConfiguration& config) {
  if (!config.valid())
    throw std::invalid_argument("cannot encode invalid configuration");
  std::string repr(kNumModules, '0');
  for (int i = 0; i < kNumModules; ++i)
    repr[i] = static_cast<char>('0' + config.option(i));
  return repr;
}

ModuleConfiguration decode(const std::string& repr) {
  if (repr.size() != kNumModules)
    throw std::invalid_argument("configuration string must have length 11, got " +
                                std::to_string(repr.size()));
  ModuleConfiguration config;
  for (int i = 0; i < kNumModules; ++i) {
    const char c = repr[i];
    const int v = c - '0';
    if (c < '0' || c > '9' || v >= kModuleOptionCounts[i])
      throw std::invalid_argument(
          std::string("option '") + c + "' out of range for module " +
          module_name(i) + " at position " + std::to_string(i));
    config.set_option(i, v);
  }
  return config;
}

std::vector<ModuleConfiguration> enumerate_space(bool include_restarts) {
  std::vector<ModuleConfiguration> out;
  out.reserve(include_restarts ? 4608 : 1536);
  const int restart_options = include_restarts ? 3 : 1;
  // Odometer over the digit string; last digit varies fastest, which is
  // exactly lexicographic order of the representations.
  std::array<int, kNumModules> digits{};
  while (true) {
    ModuleConfiguration c;
    for (int i = 0; i < kNumModules; ++i) c.set_option(i, digits[i]);
    out.push_back(c);
    int pos = kNumModules - 1;
    while (pos >= 0) {
      const int limit = (pos == kNumModules - 1) ? restart_options
                                                 : kModuleOptionCounts[pos];
      if (++digits[pos] < limit) break;
      digits[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return out;
}

const std::vector<NamedVariant>& common_variants() {
  static const std::vector<NamedVariant> variants = [] {
    const std::pair<const char*, const char*> rows[] = {
        {"CMA-ES", "00000000000"},
        {"Active CMA-ES", "10000000000"},
        {"Elitist CMA-ES", "01000000000"},
        {"Mirrored-pairwise CMA-ES", "00100001000"},
        {"IPOP-CMA-ES", "00000000001"},
        {"Active IPOP-CMA-ES", "10000000001"},
        {"Elitist Active IPOP-CMA-ES", "11000000001"},
        {"BIPOP-CMA-ES", "00000000002"},
        {"Active BIPOP-CMA-ES", "10000000002"},
        {"Elitist Active BIPOP-CMA-ES", "11000000002"},
    };
    std::vector<NamedVariant> v;
    for (const auto& [name, repr] : rows) v.push_back({name, decode(repr)});
    return v;
  }();
  return variants;
}

}  // namespace cmaswitch

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

namespace cmaswitch {

inline constexpr int kNumTargets = 51;

// The fixed-target grid: phi_i = 10^(2 - 0.2 i) for i = 0..50, from 1e2
// down to 1e-8.
struct TargetGrid {
  std::array<double, kNumTargets> values;

  static const TargetGrid& standard();
  double operator[](int i) const { return values[i]; }
};

// First-hit evaluation indices for each target, updated after every
// objective evaluation.
class HitLedger {
 public:
  void observe(double precision, long eval_index) {
    while (next_ < kNumTargets && precision <= TargetGrid::standard()[next_]) {
      hits_[next_] = eval_index;
      ++next_;
    }
  }

  bool hit(int target_index) const { return hits_[target_index].has_value(); }
  std::optional<long> hitting_eval(int i) const { return hits_[i]; }
  bool all_hit() const { return next_ == kNumTargets; }
  const std::array<std::optional<long>, kNumTargets>& hits() const { return hits_; }

 private:
  std::array<std::optional<long>, kNumTargets> hits_{};
  int next_ = 0;
};

// Run C1 until precision tau is first sampled, then C2.
struct AdaptiveTriple {
  std::string c1;
  std::string c2;
  int tau_index = 0;

  std::string repr() const;  // "c1>c2@tau"
  static std::optional<AdaptiveTriple> parse(const std::string& token);
  bool operator==(const AdaptiveTriple&) const = default;
};

// One run of one configuration (static or adaptive) on one function
// instance; the atom every metric is computed from.
struct RunRecord {
  int fid = 0;
  int instance = 0;
  std::string config_repr;  // 11 digits, or an AdaptiveTriple token
  int run_index = 0;
  std::uint64_t seed = 0;
  std::optional<long> switch_eval;
  long budget_used = 0;
  std::array<std::optional<long>, kNumTargets> hits{};
  std::string error;  // diagnostic for failed runs, empty otherwise

  bool same_trajectory(const RunRecord& other) const {
    return hits == other.hits && budget_used == other.budget_used &&
           seed == other.seed;
  }
};

}  // namespace cmaswitch

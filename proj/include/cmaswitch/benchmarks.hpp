#pragma once

#include "cmaswitch/common.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace cmaswitch::benchmarks {

using cmaswitch::kDomainHigh;
using cmaswitch::kDomainLow;

// One instance of a benchmark function: a fixed core landscape composed
// with a seeded shift (and rotation where the class calls for one), plus
// an additive optimum offset. Immutable after construction; concurrent
// evaluation is safe.
class BenchmarkFunction {
 public:
  int fid() const { return fid_; }
  int dim() const { return dim_; }
  int instance() const { return instance_; }
  double f_opt() const { return f_opt_; }
  const Vector& x_opt() const { return x_opt_; }
  std::uint64_t transform_seed() const { return transform_seed_; }
  const Matrix& rotation() const { return rotation_; }
  const std::string& name() const { return name_; }

  // Throws std::invalid_argument on non-finite input.
  double evaluate(const Vector& x) const;

 private:
  friend BenchmarkFunction make_function(int fid, int dim, int instance);
  int fid_ = 0, dim_ = 0, instance_ = 0;
  double f_opt_ = 0.0;
  Vector x_opt_;
  Matrix rotation_;  // identity for unrotated classes
  std::uint64_t transform_seed_ = 0;
  std::string name_;
  std::function<double(const Vector&)> core_;  // precision part, >= 0, 0 at x_opt
};

// fids implemented at desk scale.
const std::vector<int>& available_fids();

// Deterministic in (fid, dim, instance). Throws std::invalid_argument for
// unimplemented fids, listing the available ones.
BenchmarkFunction make_function(int fid, int dim, int instance);

// One line per (fid, dim, instance, transform_seed, f_opt), for campaign
// reproducibility.
std::string suite_manifest(const std::vector<int>& fids, int dim,
                           const std::vector<int>& instances);

}  // namespace cmaswitch::benchmarks

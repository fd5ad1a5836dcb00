#pragma once

#include "cmaswitch/common.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace cmaswitch::sampling {

// Inverse of the standard normal CDF. Rational approximation refined by
// one Halley step; |relative error| well below 1e-9 on (0,1).
double normal_quantile(double p);

enum class SamplerKind : int { gaussian = 0, sobol = 1, halton = 2 };

// Sobol direction numbers, one row per dimension >= 2 (dimension 1 is
// the van der Corput sequence). File rows: d s a m_1..m_s.
struct SobolTable {
  struct Row {
    int degree;
    std::uint32_t poly;  // interior coefficients, Joe-Kuo 'a' encoding
    std::vector<std::uint32_t> m;
  };
  std::vector<Row> rows;  // rows[k] drives dimension k + 2

  int max_dimension() const { return static_cast<int>(rows.size()) + 1; }

  static SobolTable parse(const std::string& text);
  static SobolTable load(const std::string& path);
  static const SobolTable& builtin();
};

// A source of D-dimensional points. One instance is owned by a single
// run; the sequence position advances monotonically and is part of the
// generator state.
class Sampler {
 public:
  virtual ~Sampler() = default;

  int dim() const { return dim_; }
  std::uint64_t position() const { return position_; }

  // Uniform point in (0,1)^D at the current position, then advance.
  std::vector<double> next_uniform();

  // Point of the underlying sequence at an arbitrary index, without
  // touching the position. Pseudo-random sources count indices in draw
  // order.
  virtual std::vector<double> point(std::uint64_t index) const = 0;

  // next_uniform mapped through the inverse standard normal CDF.
  Vector next_normal();

 protected:
  explicit Sampler(int dim) : dim_(dim) {}
  int dim_;
  std::uint64_t position_ = 0;
};

// scramble_seed = 0 leaves quasi-random sequences plain; any other value
// applies a seeded digital shift so independent runs differ. Gaussian
// sampling always consumes the seed.
std::unique_ptr<Sampler> make_sampler(SamplerKind kind, int dim,
                                      std::uint64_t seed,
                                      std::uint64_t scramble_seed = 0);

inline constexpr int kHaltonMaxDim = 100;  // first 100 primes

// Base search directions for one generation plus the mirror pairing.
struct SampleBatch {
  std::vector<Vector> directions;
  bool mirrored = false;  // directions[2k+1] == -directions[2k] for complete pairs

  bool pair_complete(std::size_t pair_index) const {
    return 2 * pair_index + 1 < directions.size();
  }
};

SampleBatch draw_batch(Sampler& sampler, int count);

// Doubles the batch: each direction v is followed by -v.
void apply_mirroring(SampleBatch& batch);

// Gram-Schmidt in consecutive groups of at most dim directions, each
// vector rescaled to its pre-orthogonalization norm. Linearly dependent
// directions are redrawn from the sampler (up to 10 retries).
void apply_orthogonalization(SampleBatch& batch, Sampler& sampler);

}  // namespace cmaswitch::sampling

#include "cmaswitch/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace cmaswitch::sampling {

namespace {

// Acklam's rational approximation of the inverse normal CDF.
double acklam_quantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  static constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

constexpr int kSobolBits = 52;
constexpr double kSobolScale = 0x1.0p-52;

// First 100 primes, the Halton bases.
constexpr int kPrimes[kHaltonMaxDim] = {
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,
    53,  59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107, 109, 113,
    127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197,
    199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281,
    283, 293, 307, 311, 313, 317, 331, 337, 347, 349, 353, 359, 367, 373, 379,
    383, 389, 397, 401, 409, 419, 421, 431, 433, 439, 443, 449, 457, 461, 463,
    467, 479, 487, 491, 499, 503, 509, 521, 523, 541};

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::domain_error("normal_quantile requires p in (0,1)");
  double x = acklam_quantile(p);
  // One Halley step against erfc brings the result to full precision.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

SobolTable SobolTable::parse(const std::string& text) {
  SobolTable table;
  std::istringstream in(text);
  std::string line;
  int expected_dim = 2;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'd') continue;
    std::istringstream row(line);
    int d = 0, s = 0;
    std::uint32_t a = 0;
    if (!(row >> d >> s >> a))
      throw std::runtime_error("malformed Sobol direction-number row: " + line);
    if (d != expected_dim)
      throw std::runtime_error("Sobol table rows must be consecutive dimensions");
    Row r;
    r.degree = s;
    r.poly = a;
    r.m.resize(s);
    for (int i = 0; i < s; ++i) {
      if (!(row >> r.m[i]))
        throw std::runtime_error("missing m values in Sobol row: " + line);
    }
    table.rows.push_back(std::move(r));
    ++expected_dim;
  }
  return table;
}

SobolTable SobolTable::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open Sobol table file: " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return parse(buf.str());
}

std::vector<double> Sampler::next_uniform() {
  auto p = point(position_);
  ++position_;
  return p;
}

Vector Sampler::next_normal() {
  const auto u = next_uniform();
  Vector z(dim_);
  for (int i = 0; i < dim_; ++i) {
    const double v = std::clamp(u[i], 1e-18, 1.0 - 1e-16);
    z[i] = normal_quantile(v);
  }
  return z;
}

namespace {

class GaussianSampler final : public Sampler {
 public:
  GaussianSampler(int dim, std::uint64_t seed)
      : Sampler(dim), seed_(seed), engine_(seed) {}

  std::vector<double> point(std::uint64_t index) const override {
    // Test-only random access: replay the stream from the seed.
    std::mt19937_64 eng(seed_);
    eng.discard(index * static_cast<std::uint64_t>(dim_));
    std::vector<double> out(dim_);
    for (int i = 0; i < dim_; ++i) out[i] = to_unit_double(eng());
    return out;
  }

  std::vector<double> next_uniform_fast() {
    std::vector<double> out(dim_);
    for (int i = 0; i < dim_; ++i) out[i] = to_unit_double(engine_());
    ++position_;
    return out;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

class SobolSampler final : public Sampler {
 public:
  SobolSampler(int dim, const SobolTable& table, std::uint64_t scramble_seed)
      : Sampler(dim), directions_(dim), shift_(dim, 0) {
    if (dim > table.max_dimension())
      throw std::invalid_argument(
          "Sobol table supports up to " + std::to_string(table.max_dimension()) +
          " dimensions, requested " + std::to_string(dim));
    for (int j = 0; j < dim; ++j) directions_[j] = direction_numbers(table, j);
    if (scramble_seed != 0) {
      std::uint64_t s = scramble_seed;
      for (int j = 0; j < dim; ++j) {
        s = mix64(s);
        shift_[j] = s & ((1ULL << kSobolBits) - 1);
      }
    }
  }

  std::vector<double> point(std::uint64_t index) const override {
    std::vector<double> out(dim_);
    for (int j = 0; j < dim_; ++j) {
      std::uint64_t word = shift_[j];
      std::uint64_t n = index;
      int k = 0;
      while (n != 0) {
        if (n & 1ULL) word ^= directions_[j][k];
        n >>= 1;
        ++k;
      }
      out[j] = static_cast<double>(word) * kSobolScale;
    }
    return out;
  }

 private:
  static std::vector<std::uint64_t> direction_numbers(const SobolTable& table,
                                                      int dim_index) {
    std::vector<std::uint64_t> m(kSobolBits + 1, 0);
    if (dim_index == 0) {
      for (int k = 1; k <= kSobolBits; ++k) m[k] = 1;  // van der Corput
    } else {
      const auto& row = table.rows[dim_index - 1];
      const int s = row.degree;
      for (int k = 1; k <= std::min(s, kSobolBits); ++k) m[k] = row.m[k - 1];
      for (int k = s + 1; k <= kSobolBits; ++k) {
        m[k] = m[k - s] ^ (m[k - s] << s);
        for (int i = 1; i <= s - 1; ++i)
          m[k] ^= ((row.poly >> (s - 1 - i)) & 1ULL) * (m[k - i] << i);
      }
    }
    std::vector<std::uint64_t> v(kSobolBits);
    for (int k = 1; k <= kSobolBits; ++k) v[k - 1] = m[k] << (kSobolBits - k);
    return v;
  }

  std::vector<std::vector<std::uint64_t>> directions_;
  std::vector<std::uint64_t> shift_;
};

class HaltonSampler final : public Sampler {
 public:
  HaltonSampler(int dim, std::uint64_t scramble_seed)
      : Sampler(dim), shift_digits_(dim) {
    if (dim > kHaltonMaxDim)
      throw std::invalid_argument("Halton sampling supports at most " +
                                  std::to_string(kHaltonMaxDim) +
                                  " dimensions, requested " + std::to_string(dim));
    position_ = 1;  // the radical inverse of 0 is 0 in every base
    if (scramble_seed != 0) {
      std::uint64_t s = scramble_seed;
      for (int j = 0; j < dim; ++j) {
        const int base = kPrimes[j];
        const int digits = digits_for(base);
        shift_digits_[j].resize(digits);
        for (int i = 0; i < digits; ++i) {
          s = mix64(s);
          shift_digits_[j][i] =
              static_cast<int>(to_unit_double(s) * base) % base;
        }
      }
    }
  }

  std::vector<double> point(std::uint64_t index) const override {
    std::vector<double> out(dim_);
    for (int j = 0; j < dim_; ++j) {
      const int base = kPrimes[j];
      const auto& shift = shift_digits_[j];
      double value = 0.0;
      double scale = 1.0 / base;
      std::uint64_t n = index;
      std::size_t i = 0;
      while (n != 0 || i < shift.size()) {
        const int digit = static_cast<int>(n % base);
        const int d = shift.empty() ? digit
                                    : (digit + (i < shift.size() ? shift[i] : 0)) % base;
        value += d * scale;
        scale /= base;
        n /= base;
        ++i;
      }
      out[j] = value;
    }
    return out;
  }

 private:
  static int digits_for(int base) {
    // enough shifted digits that the truncation is below double precision
    int digits = 0;
    double scale = 1.0;
    while (scale > 0x1.0p-60) {
      scale /= base;
      ++digits;
    }
    return digits;
  }

  std::vector<std::vector<int>> shift_digits_;
};

}  // namespace

std::unique_ptr<Sampler> make_sampler(SamplerKind kind, int dim,
                                      std::uint64_t seed,
                                      std::uint64_t scramble_seed) {
  if (dim < 1) throw std::invalid_argument("sampler dimension must be >= 1");
  switch (kind) {
    case SamplerKind::gaussian:
      return std::make_unique<GaussianSampler>(dim, seed);
    case SamplerKind::sobol:
      return std::make_unique<SobolSampler>(dim, SobolTable::builtin(),
                                            scramble_seed);
    case SamplerKind::halton:
      return std::make_unique<HaltonSampler>(dim, scramble_seed);
  }
  throw std::invalid_argument("unknown sampler kind");
}

SampleBatch draw_batch(Sampler& sampler, int count) {
  if (count < 1) throw std::invalid_argument("batch size must be >= 1");
  SampleBatch batch;
  batch.directions.reserve(count);
  if (auto* g = dynamic_cast<GaussianSampler*>(&sampler)) {
    for (int i = 0; i < count; ++i) {
      const auto u = g->next_uniform_fast();
      Vector z(sampler.dim());
      for (int k = 0; k < sampler.dim(); ++k)
        z[k] = normal_quantile(std::clamp(u[k], 1e-18, 1.0 - 1e-16));
      batch.directions.push_back(std::move(z));
    }
  } else {
    for (int i = 0; i < count; ++i)
      batch.directions.push_back(sampler.next_normal());
  }
  return batch;
}

void apply_mirroring(SampleBatch& batch) {
  std::vector<Vector> mirrored;
  mirrored.reserve(batch.directions.size() * 2);
  for (const auto& v : batch.directions) {
    mirrored.push_back(v);
    mirrored.push_back(-v);
  }
  batch.directions = std::move(mirrored);
  batch.mirrored = true;
}

void apply_orthogonalization(SampleBatch& batch, Sampler& sampler) {
  const int dim = sampler.dim();
  auto& dirs = batch.directions;
  for (std::size_t group = 0; group < dirs.size(); group += dim) {
    const std::size_t end = std::min(group + dim, dirs.size());
    std::vector<Vector> basis;  // orthonormal directions accepted so far
    for (std::size_t i = group; i < end; ++i) {
      int retries = 0;
      while (true) {
        const double norm = dirs[i].norm();
        Vector residual = dirs[i];
        for (const auto& b : basis) residual -= b.dot(residual) * b;
        const double rnorm = residual.norm();
        if (norm > 0.0 && rnorm > 1e-12 * norm) {
          basis.push_back(residual / rnorm);
          dirs[i] = basis.back() * norm;  // keep the original length
          break;
        }
        if (++retries > 10)
          throw std::runtime_error(
              "orthogonalization failed: linearly dependent directions after "
              "10 redraws");
        dirs[i] = sampler.next_normal();
      }
    }
  }
}

}  // namespace cmaswitch::sampling

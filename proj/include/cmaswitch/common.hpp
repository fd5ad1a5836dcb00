#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <string_view>

namespace cmaswitch {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// the search domain shared by the benchmarks and the run initialization
inline constexpr double kDomainLow = -5.0;
inline constexpr double kDomainHigh = 5.0;

// splitmix64 finalizer; all derived seeds in the project go through this.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return mix64(seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

// FNV-1a over the bytes, folded into the running seed.
constexpr std::uint64_t hash_string(std::uint64_t seed, std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return hash_combine(seed, h);
}

// Canonical double in [0,1) built from the top 53 bits of a word.
constexpr double to_unit_double(std::uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

}  // namespace cmaswitch

#include "cmaswitch/config.hpp"

#include <doctest.h>

#include <set>
#include <stdexcept>

using namespace cmaswitch;

TEST_SUITE_BEGIN("config");

TEST_CASE("named variants encode to their published representations") {
  const auto& variants = common_variants();
  REQUIRE(variants.size() == 10);
  CHECK(variants[0].name == "CMA-ES");
  CHECK(encode(variants[0].config) == "00000000000");
  CHECK(encode(variants[1].config) == "10000000000");  // Active CMA-ES
  CHECK(encode(variants[2].config) == "01000000000");  // Elitist CMA-ES
  CHECK(encode(variants[3].config) == "00100001000");  // Mirrored-pairwise
  CHECK(encode(variants[5].config) == "10000000001");  // Active IPOP
  CHECK(encode(variants[9].config) == "11000000002");  // Elitist Active BIPOP
  for (const auto& v : variants) CHECK(decode(encode(v.config)) == v.config);
}

TEST_CASE("decode maps BIPOP preset and validates digits") {
  const auto bipop = decode("00000000002");
  CHECK(bipop.restart_scheme == 2);
  CHECK(bipop.active_update == 0);

  CHECK_THROWS_WITH_AS(decode("90000000000"),
                       doctest::Contains("position 0"), std::invalid_argument);
  CHECK_THROWS_AS(decode("2000000000"), std::invalid_argument);   // too short
  CHECK_THROWS_AS(decode("000000000000"), std::invalid_argument); // too long
  CHECK_THROWS_WITH_AS(decode("00200000000"),
                       doctest::Contains("position 2"), std::invalid_argument);
  CHECK_THROWS_AS(decode("0000000000x"), std::invalid_argument);
}

TEST_CASE("enumeration counts, order and round trip") {
  const auto full = enumerate_space(true);
  const auto restricted = enumerate_space(false);
  CHECK(full.size() == 4608);
  CHECK(restricted.size() == 1536);
  CHECK(encode(full.front()) == "00000000000");

  std::set<std::string> seen;
  std::string previous;
  for (const auto& c : full) {
    const auto repr = encode(c);
    CHECK(decode(repr) == c);
    CHECK(repr > previous);  // strict lexicographic order, no duplicates
    previous = repr;
    seen.insert(repr);
  }
  CHECK(seen.size() == full.size());

  // the restricted space is exactly the restart-free slice
  std::size_t i = 0;
  for (const auto& c : full)
    if (c.restart_scheme == 0) {
      CHECK(restricted[i] == c);
      ++i;
    }
  CHECK(i == restricted.size());

  for (const auto& v : common_variants()) CHECK(seen.count(encode(v.config)) == 1);
}

TEST_SUITE_END();

#include "cmaswitch/benchmarks.hpp"

#include <doctest.h>

#include <random>
#include <stdexcept>

using namespace cmaswitch;
using namespace cmaswitch::benchmarks;

TEST_SUITE_BEGIN("benchmarks");

TEST_CASE("every fid evaluates to f_opt at x_opt and stays above it") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> coord(-6.0, 6.0);
  for (int fid : available_fids()) {
    for (int instance : {1, 2, 3}) {
      const auto fn = make_function(fid, 5, instance);
      CHECK(std::abs(fn.evaluate(fn.x_opt()) - fn.f_opt()) <= 1e-12);
      for (int k = 0; k < 200; ++k) {
        Vector x(5);
        for (int j = 0; j < 5; ++j) x[j] = coord(rng);
        CHECK(fn.evaluate(x) >= fn.f_opt());
      }
    }
  }
}

TEST_CASE("sphere is the shifted squared norm") {
  const auto fn = make_function(1, 5, 1);
  Vector x = fn.x_opt();
  x[0] += 1.0;
  CHECK(fn.evaluate(x) == doctest::Approx(fn.f_opt() + 1.0));
  Vector y = fn.x_opt() + Vector::Constant(5, 0.5);
  CHECK(fn.evaluate(y) == doctest::Approx(fn.f_opt() + 5 * 0.25));
}

TEST_CASE("same (fid, dim, instance) is the identical function") {
  const auto a = make_function(10, 5, 3);
  const auto b = make_function(10, 5, 3);
  CHECK(a.f_opt() == b.f_opt());
  CHECK(a.x_opt() == b.x_opt());
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    Vector x(5);
    for (int j = 0; j < 5; ++j) x[j] = -5.0 + 10.0 * to_unit_double(rng());
    CHECK(a.evaluate(x) == b.evaluate(x));
  }
  // distinct instances differ
  const auto c = make_function(10, 5, 4);
  CHECK(c.f_opt() != a.f_opt());
}

TEST_CASE("linear slope: optimum on the boundary, gradient pushes outward") {
  const auto fn = make_function(5, 5, 2);
  for (int j = 0; j < 5; ++j)
    CHECK(std::abs(fn.x_opt()[j]) == doctest::Approx(5.0));
  // moving from the center toward x_opt in any single coordinate improves
  const Vector center = Vector::Zero(5);
  const double f_center = fn.evaluate(center);
  for (int j = 0; j < 5; ++j) {
    Vector x = center;
    x[j] = 0.5 * fn.x_opt()[j];
    CHECK(fn.evaluate(x) < f_center);
    x[j] = -0.5 * fn.x_opt()[j];
    CHECK(fn.evaluate(x) > f_center);
  }
}

TEST_CASE("rotated ellipsoid equals the axis-aligned one conjugated") {
  const auto rotated = make_function(10, 5, 1);
  const Matrix& rot = rotated.rotation();
  CHECK((rot * rot.transpose() - Matrix::Identity(5, 5)).norm() < 1e-12);
  std::mt19937_64 rng(99);
  for (int k = 0; k < 20; ++k) {
    Vector v(5);
    for (int j = 0; j < 5; ++j) v[j] = -2.0 + 4.0 * to_unit_double(rng());
    // evaluating at x_opt + R^T v puts z = v; compare with the explicit sum
    const double lhs = rotated.evaluate(rotated.x_opt() + rot.transpose() * v);
    double rhs = 0.0;
    for (int j = 0; j < 5; ++j)
      rhs += std::pow(10.0, 6.0 * j / 4.0) * v[j] * v[j];
    CHECK(lhs - rotated.f_opt() == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("Rastrigin: integer offsets are strictly worse local structure") {
  const auto fn = make_function(15, 5, 1);
  CHECK(fn.evaluate(fn.x_opt()) == doctest::Approx(fn.f_opt()));
  for (int j = 0; j < 5; ++j) {
    Vector x = fn.x_opt();
    x[j] += 1.0;
    const double diff = fn.evaluate(x) - fn.f_opt();
    CHECK(diff > 0.0);
    CHECK(diff == doctest::Approx(1.0));  // cosine term cancels at integers
    x[j] = fn.x_opt()[j] + 0.5;           // between minima the ripple adds
    CHECK(fn.evaluate(x) - fn.f_opt() > diff);
  }
}

TEST_CASE("unimplemented fid reports the available set") {
  CHECK_THROWS_WITH_AS(make_function(3, 5, 1),
                       doctest::Contains("not in desk-scale suite"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(make_function(3, 5, 1), doctest::Contains("21"),
                       std::invalid_argument);
  CHECK_THROWS_AS(make_function(1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_function(1, 5, 0), std::invalid_argument);
}

TEST_CASE("non-finite input is rejected") {
  const auto fn = make_function(1, 5, 1);
  Vector x = Vector::Zero(5);
  x[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(fn.evaluate(x), std::invalid_argument);
  x[2] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(fn.evaluate(x), std::invalid_argument);
}

TEST_CASE("suite manifest lists one line per instance") {
  const auto text = suite_manifest({1, 5}, 5, {1, 2, 3});
  int lines = 0;
  for (char c : text)
    if (c == '\n') ++lines;
  CHECK(lines == 6);
}

TEST_SUITE_END();

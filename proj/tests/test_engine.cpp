#include "cmaswitch/engine.hpp"

#include "cmaswitch/benchmarks.hpp"

#include <doctest.h>

#include <cmath>

using namespace cmaswitch;

namespace {

Objective sphere_at(Vector center) {
  return [center](const Vector& x) { return (x - center).squaredNorm(); };
}

struct CountingObjective {
  Objective fn;
  std::shared_ptr<long> calls = std::make_shared<long>(0);
  double operator()(const Vector& x) const {
    ++*calls;
    return fn(x);
  }
};

}  // namespace

TEST_SUITE_BEGIN("engine");

TEST_CASE("derive_static: population defaults and weight schemes") {
  const auto p = derive_static(decode("00000000000"), 5);
  CHECK(p.lambda == 8);  // 4 + floor(3 ln 5)
  CHECK(p.mu == 4);
  CHECK(p.weights.sum() == doctest::Approx(1.0));
  for (int i = 1; i < p.mu; ++i) CHECK(p.weights[i] <= p.weights[i - 1]);

  const auto uniform = derive_static(decode("00000000100"), 5);
  for (int i = 0; i < uniform.mu; ++i)
    CHECK(uniform.weights[i] == doctest::Approx(0.25));

  // hand evaluation of the log-decreasing scheme for mu = 2
  const auto two = derive_static(decode("00000000000"), 5, 4);
  REQUIRE(two.mu == 2);
  CHECK(two.weights[0] == doctest::Approx(0.8042).epsilon(1e-3));
  CHECK(two.weights[1] == doctest::Approx(0.1958).epsilon(1e-3));

  CHECK(p.c_sigma > 0.0);
  CHECK(p.c_1 > 0.0);
  CHECK(p.c_mu > 0.0);
  CHECK(p.c_1 + p.c_mu < 1.0);
}

TEST_CASE("default configuration solves the 5-D sphere") {
  const auto fn = benchmarks::make_function(1, 5, 1);
  const auto rec = run_static(
      decode("00000000000"), [&fn](const Vector& x) { return fn.evaluate(x); },
      fn.f_opt(), 5, 50000, 4242);
  REQUIRE(rec.hits[50].has_value());
  CHECK(*rec.hits[50] < 5000);
  CHECK(rec.error.empty());
  // ledgered hitting evaluations are non-decreasing in target hardness
  long prev = 0;
  for (int t = 0; t < kNumTargets; ++t) {
    REQUIRE(rec.hits[t].has_value());
    CHECK(*rec.hits[t] >= prev);
    prev = *rec.hits[t];
  }
}

TEST_CASE("budget accounting matches the objective call count exactly") {
  // mixed modules: TPA probes, sequential stops and mirrored pairs all
  // count against the same budget
  for (const char* repr :
       {"00000000000", "00000010000", "00001000000", "00101001000",
        "01010110100", "11111111100"}) {
    CountingObjective counting{sphere_at(Vector::Constant(5, 1.0))};
    EsRun run(decode(repr), counting, 0.0, 5, 3000, 77);
    long from_summaries = 0;
    while (!run.finished()) {
      const auto summary = run.step();
      from_summaries += summary.evals;
    }
    CHECK(run.evals_used() == *counting.calls);
    CHECK(run.evals_used() == from_summaries);
    CHECK(run.evals_used() <= 3000);
  }
}

TEST_CASE("run records are deterministic in the seed") {
  const auto fn = benchmarks::make_function(2, 5, 2);
  const Objective obj = [&fn](const Vector& x) { return fn.evaluate(x); };
  const auto a = run_static(decode("00100001000"), obj, fn.f_opt(), 5, 20000, 9);
  const auto b = run_static(decode("00100001000"), obj, fn.f_opt(), 5, 20000, 9);
  CHECK(a.same_trajectory(b));
  const auto c = run_static(decode("00100001000"), obj, fn.f_opt(), 5, 20000, 10);
  CHECK_FALSE(a.same_trajectory(c));
}

TEST_CASE("elitist population best never regresses") {
  CountingObjective counting{sphere_at(Vector::Zero(5))};
  EsRun run(decode("01000000000"), counting, 0.0, 5, 4000, 31);
  double last = kInf;
  while (!run.finished()) {
    const auto summary = run.step();
    if (summary.evals == 0) break;
    CHECK(summary.population_best <= last + 1e-15);
    last = summary.population_best;
  }
}

TEST_CASE("mirrored pairwise admits at most one candidate per pair") {
  CountingObjective counting{sphere_at(Vector::Zero(5))};
  EsRun run(decode("00100001000"), counting, 0.0, 5, 2000, 5);
  REQUIRE(run.statics().lambda == 8);
  for (int g = 0; g < 20 && !run.finished(); ++g) {
    const auto summary = run.step();
    if (summary.evals == 8) CHECK(summary.selection_pool <= 4);
  }
}

TEST_CASE("sequential selection stops generations early") {
  CountingObjective counting{sphere_at(Vector::Zero(5))};
  EsRun run(decode("00001000000"), counting, 0.0, 5, 2000, 5);
  bool any_early = false;
  while (!run.finished()) {
    const auto summary = run.step();
    if (summary.sequential_stop) {
      any_early = true;
      CHECK(summary.evals < run.statics().lambda);
    }
  }
  CHECK(any_early);
}

TEST_CASE("threshold convergence keeps early mutation lengths up") {
  // with the full budget remaining, accepted steps must be at least the
  // initial threshold length away from the previous mean
  CountingObjective counting{sphere_at(Vector::Zero(5))};
  EsRun run(decode("00000100000"), counting, 0.0, 5, 100000, 19);
  const Vector mean0 = run.state().mean;
  run.step();
  const double t0 = 0.1 * 10.0 * std::sqrt(5.0);
  // the new mean is a convex combination of offspring all >= t0 away
  CHECK((run.state().mean - mean0).norm() > 0.0);
  const auto& parents = run.state().parents;
  for (const auto& p : parents) CHECK((p.x - mean0).norm() >= t0 * 0.999);
}

TEST_CASE("covariance stays symmetric positive definite") {
  for (const char* repr : {"10000000000", "11000000000", "10110100100"}) {
    CountingObjective counting{sphere_at(Vector::Constant(5, 2.0))};
    EsRun run(decode(repr), counting, 0.0, 5, 4000, 23);
    while (!run.finished()) {
      run.step();
      const Matrix& C = run.state().C;
      CHECK((C - C.transpose()).norm() < 1e-12);
      Eigen::SelfAdjointEigenSolver<Matrix> solver(C);
      CHECK(solver.eigenvalues().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("switching rebuilds statics and preserves dynamics") {
  CountingObjective counting{sphere_at(Vector::Zero(5))};
  EsRun run(decode("00000000000"), counting, 0.0, 5, 10000, 3);
  for (int g = 0; g < 5; ++g) run.step();
  const long evals_before = run.evals_used();
  const Vector mean_before = run.state().mean;
  const double sigma_before = run.state().sigma;
  const Matrix cov_before = run.state().C;

  run.switch_configuration(decode("00000000100"));  // uniform weights
  CHECK(run.evals_used() == evals_before);
  CHECK(run.state().mean == mean_before);
  CHECK(run.state().sigma == sigma_before);
  CHECK(run.state().C == cov_before);
  for (int i = 0; i < run.statics().mu; ++i)
    CHECK(run.statics().weights[i] == doctest::Approx(0.25));

  CHECK_THROWS_AS(run.switch_configuration(decode("00000000001")),
                  std::invalid_argument);
}

TEST_CASE("adaptive run with c1 == c2 matches the static run exactly") {
  for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
    const auto fn = benchmarks::make_function(1, 5, 1);
    const Objective obj = [&fn](const Vector& x) { return fn.evaluate(x); };
    const auto stat =
        run_static(decode("00100000000"), obj, fn.f_opt(), 5, 30000, seed);
    const AdaptiveTriple triple{"00100000000", "00100000000", 25};
    const auto adap = run_adaptive(triple, obj, fn.f_opt(), 5, 30000, seed);
    CHECK(stat.same_trajectory(adap));
    CHECK(adap.switch_eval.has_value());
    CHECK(*adap.switch_eval >= *adap.hits[25]);
  }
}

TEST_CASE("adaptive run switches after tau is sampled and changes behavior") {
  const auto fn = benchmarks::make_function(2, 5, 1);
  const Objective obj = [&fn](const Vector& x) { return fn.evaluate(x); };
  const AdaptiveTriple triple{"00000100000", "00000000000", 20};
  const auto rec = run_adaptive(triple, obj, fn.f_opt(), 5, 50000, 17);
  REQUIRE(rec.switch_eval.has_value());
  REQUIRE(rec.hits[20].has_value());
  CHECK(*rec.switch_eval >= *rec.hits[20]);
  // unreachable splitpoint: no switch recorded
  const AdaptiveTriple never{"00000000000", "01000000000", 50};
  const auto fast = run_adaptive(never, obj, fn.f_opt(), 5, 300, 17);
  if (!fast.hits[50]) CHECK_FALSE(fast.switch_eval.has_value());
}

TEST_CASE("IPOP doubles the population on restart") {
  // a deceptive objective that stalls: flat away from a tiny basin
  const Objective flat = [](const Vector& x) {
    return x.squaredNorm() < 1e-6 ? x.squaredNorm() : 1000.0;
  };
  EsRun run(decode("00000000001"), flat, 0.0, 5, 20000, 91);
  const int lambda0 = run.statics().lambda;
  bool restarted = false;
  while (!run.finished()) {
    if (run.step().restarted) {
      restarted = true;
      break;
    }
  }
  REQUIRE(restarted);
  CHECK(run.statics().lambda == 2 * lambda0);
  CHECK(run.state().restart.count == 1);
  CHECK(run.evals_used() > 0);  // counter survives the restart
}

TEST_CASE("BIPOP alternates regimes under budget accounting") {
  const Objective flat = [](const Vector& x) {
    return x.squaredNorm() < 1e-9 ? x.squaredNorm() : 500.0;
  };
  EsRun run(decode("00000000002"), flat, 0.0, 5, 30000, 7);
  int restarts = 0;
  while (!run.finished()) {
    if (run.step().restarted) ++restarts;
  }
  CHECK(restarts >= 2);
  const auto& rs = run.state().restart;
  CHECK(rs.large_count >= 1);
  CHECK(rs.budget_large + rs.budget_small <= run.evals_used());
}

TEST_CASE("non-finite fitness aborts the run with a diagnostic") {
  const Objective bad = [](const Vector& x) {
    static thread_local int n = 0;
    return ++n > 17 ? std::numeric_limits<double>::quiet_NaN()
                    : x.squaredNorm();
  };
  const auto rec = run_static(decode("00000000000"), bad, 0.0, 5, 1000, 3);
  CHECK_FALSE(rec.error.empty());
  CHECK(rec.budget_used <= 18);
}

TEST_CASE("constant objective never hits sub-100 targets") {
  const Objective constant = [](const Vector&) { return 250.0; };
  const auto rec =
      run_static(decode("00000000000"), constant, 0.0, 5, 500, 21);
  for (int t = 0; t < kNumTargets; ++t) CHECK_FALSE(rec.hits[t].has_value());
  CHECK(rec.budget_used == 500);
}

TEST_SUITE_END();

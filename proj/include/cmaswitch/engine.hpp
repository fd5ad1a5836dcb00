#pragma once

#include "cmaswitch/common.hpp"
#include "cmaswitch/config.hpp"
#include "cmaswitch/records.hpp"
#include "cmaswitch/sampling.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>

namespace cmaswitch {

using Objective = std::function<double(const Vector&)>;

// Raised when a run cannot continue (non-finite fitness, failed redraws).
struct EngineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Everything derived from a ModuleConfiguration; rebuilt on a switch.
struct EsStaticParameters {
  int dim = 0;
  int lambda = 0;
  int mu = 0;
  Vector weights;  // mu entries, non-increasing, summing to 1
  double mu_eff = 0.0;
  double c_sigma = 0.0, d_sigma = 0.0;
  double c_c = 0.0, c_1 = 0.0, c_mu = 0.0;
  double c_active = 0.0;  // negative-update rate, Jastrebski-style
  double chi_n = 0.0;
  ModuleConfiguration modules;

  // threshold convergence: initial length as a fraction of the domain
  // diagonal, and the decay exponent over the remaining-budget fraction
  double threshold_init_fraction = 0.1;
  double threshold_decay = 2.0;

  // two-point adaptation
  double tpa_alpha_plus = 1.5;
  double tpa_alpha_minus = 1.0 / 1.5;
  double tpa_probe_scale = 0.5;
  double tpa_smoothing = 0.3;
  double tpa_damping = 1.0;
};

EsStaticParameters derive_static(const ModuleConfiguration& config, int dim);
EsStaticParameters derive_static(const ModuleConfiguration& config, int dim,
                                 int lambda);

struct Individual {
  Vector x;
  Vector y;  // (x - old_mean) / sigma, the vector entering the C update
  double f = kInf;
};

struct ThresholdState {
  long budget_at_activation = 0;  // remaining evaluations when (re)activated
  long evals_at_activation = 0;
};

struct TpaState {
  double smoothed = 0.0;  // smoothed log step-size change
};

struct RestartState {
  int count = 0;
  int large_count = 0;          // BIPOP large-regime restarts so far
  long budget_large = 0;        // evaluations spent in each regime
  long budget_small = 0;
  long evals_at_start = 0;      // evals_used when the current sub-run began
  bool small_regime = false;
};

struct EsDynamicState {
  Vector mean;
  double sigma = 0.0;
  Matrix C;
  Matrix B;       // eigenvectors of C
  Vector D;       // sqrt of (repaired) eigenvalues
  Vector path_sigma;
  Vector path_c;
  Vector mean_shift;  // mean(t) - mean(t-1)
  std::vector<Individual> parents;
  long evals_used = 0;
  long generation = 0;
  long path_age = 0;  // generations since the paths were last reset
  long last_improvement_gen = 0;
  double best_f = kInf;
  Vector best_x;
  ThresholdState threshold;
  TpaState tpa;
  RestartState restart;
};

struct GenerationSummary {
  long evals = 0;
  double best_evaluated = kInf;   // best fitness seen this generation
  double population_best = kInf;  // best fitness among the selected parents
  int selection_pool = 0;         // candidates entering selection
  bool sequential_stop = false;
  bool restarted = false;
};

// One run of the modular CMA-ES. Owns its generator state; single-owner,
// distinct runs are independent.
class EsRun {
 public:
  EsRun(const ModuleConfiguration& config, Objective objective, double f_opt,
        int dim, long budget, std::uint64_t seed);

  // One full generation honoring every active module. Throws EngineError
  // when the objective returns a non-finite value.
  GenerationSummary step();

  // Rebuilds the static parameters from new_config, keeping all dynamic
  // state. Bookkeeping of modules that flip on is initialized fresh;
  // restart schemes are rejected.
  void switch_configuration(const ModuleConfiguration& new_config);

  bool finished() const;  // budget exhausted or hardest target hit

  const EsStaticParameters& statics() const { return statics_; }
  const EsDynamicState& state() const { return state_; }
  const HitLedger& ledger() const { return ledger_; }
  long budget() const { return budget_; }
  long evals_used() const { return state_.evals_used; }
  double best_precision() const { return state_.best_f - f_opt_; }

 private:
  Vector sample_initial_mean();
  void reset_dynamic_state(double sigma0);
  void rebuild_sampler();
  void refresh_eigen_decomposition();
  double threshold_length() const;
  bool restart_triggered() const;
  void perform_restart();
  double evaluate(const Vector& x);

  EsStaticParameters statics_;
  EsDynamicState state_;
  Objective objective_;
  double f_opt_ = 0.0;
  long budget_ = 0;
  std::uint64_t seed_ = 0;
  std::mt19937_64 rng_;  // engine-level draws: init mean, restarts
  std::unique_ptr<sampling::Sampler> sampler_;
  HitLedger ledger_;
  bool aborted_ = false;
};

// Runs config until the budget is exhausted or the hardest target is hit.
RunRecord run_static(const ModuleConfiguration& config,
                     const Objective& objective, double f_opt, int dim,
                     long budget, std::uint64_t seed);

// Runs triple.c1 until the first generation that samples a solution with
// precision <= phi[tau], then switches to triple.c2.
RunRecord run_adaptive(const AdaptiveTriple& triple, const Objective& objective,
                       double f_opt, int dim, long budget, std::uint64_t seed);

}  // namespace cmaswitch

#include "cmaswitch/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace cmaswitch {

namespace {

constexpr double kSigma0 = 2.0;  // 20% of the domain width
constexpr double kSigmaMin = 1e-30;
constexpr double kSigmaMax = 1e30;
constexpr double kEigenFloorRatio = 1e-14;

Vector normalized_head(const Vector& weights, int k) {
  Vector w = weights.head(k);
  return w / w.sum();
}

}  // namespace

EsStaticParameters derive_static(const ModuleConfiguration& config, int dim) {
  const int lambda =
      4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(dim))));
  return derive_static(config, dim, lambda);
}

EsStaticParameters derive_static(const ModuleConfiguration& config, int dim,
                                 int lambda) {
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!config.valid()) throw std::invalid_argument("invalid configuration");
  EsStaticParameters p;
  p.dim = dim;
  p.lambda = std::max(2, lambda);
  p.mu = std::max(1, p.lambda / 2);
  p.modules = config;

  p.weights.resize(p.mu);
  if (config.weights_scheme == 1) {
    p.weights.setConstant(1.0 / p.mu);
  } else {
    for (int i = 0; i < p.mu; ++i)
      p.weights[i] = std::log(p.mu + 0.5) - std::log(static_cast<double>(i + 1));
    p.weights /= p.weights.sum();
  }
  p.mu_eff = 1.0 / p.weights.squaredNorm();

  const double d = dim;
  p.c_sigma = (p.mu_eff + 2.0) / (d + p.mu_eff + 5.0);
  p.d_sigma = 1.0 +
              2.0 * std::max(0.0, std::sqrt((p.mu_eff - 1.0) / (d + 1.0)) - 1.0) +
              p.c_sigma;
  p.c_c = (4.0 + p.mu_eff / d) / (d + 4.0 + 2.0 * p.mu_eff / d);
  p.c_1 = 2.0 / ((d + 1.3) * (d + 1.3) + p.mu_eff);
  p.c_mu = std::min(1.0 - p.c_1, 2.0 * (p.mu_eff - 2.0 + 1.0 / p.mu_eff) /
                                     ((d + 2.0) * (d + 2.0) + p.mu_eff));
  p.c_active = std::min((4.0 * p.mu - 2.0) / ((d + 12.0) * (d + 12.0) + 4.0 * p.mu),
                        0.5 * (1.0 - p.c_1 - p.c_mu));
  p.chi_n = std::sqrt(d) * (1.0 - 1.0 / (4.0 * d) + 1.0 / (21.0 * d * d));
  return p;
}

EsRun::EsRun(const ModuleConfiguration& config, Objective objective,
             double f_opt, int dim, long budget, std::uint64_t seed)
    : statics_(derive_static(config, dim)),
      objective_(std::move(objective)),
      f_opt_(f_opt),
      budget_(budget),
      seed_(seed),
      rng_(mix64(seed)) {
  rebuild_sampler();
  state_.mean = sample_initial_mean();
  reset_dynamic_state(kSigma0);
  state_.threshold = {budget_, 0};
}

Vector EsRun::sample_initial_mean() {
  Vector m(statics_.dim);
  for (int i = 0; i < statics_.dim; ++i)
    m[i] = kDomainLow + (kDomainHigh - kDomainLow) * to_unit_double(rng_());
  return m;
}

void EsRun::reset_dynamic_state(double sigma0) {
  const int d = statics_.dim;
  state_.sigma = sigma0;
  state_.C = Matrix::Identity(d, d);
  state_.B = Matrix::Identity(d, d);
  state_.D = Vector::Ones(d);
  state_.path_sigma = Vector::Zero(d);
  state_.path_c = Vector::Zero(d);
  state_.mean_shift = Vector::Zero(d);
  state_.parents.clear();
  state_.tpa = {};
  state_.last_improvement_gen = state_.generation;
}

void EsRun::rebuild_sampler() {
  const auto kind = static_cast<sampling::SamplerKind>(statics_.modules.sampler);
  sampler_ = sampling::make_sampler(kind, statics_.dim,
                                    hash_combine(seed_, 0x5a3d),
                                    hash_combine(seed_, 0x7e11));
}

bool EsRun::finished() const {
  return aborted_ || state_.evals_used >= budget_ ||
         ledger_.hit(kNumTargets - 1);
}

double EsRun::evaluate(const Vector& x) {
  const double f = objective_(x);
  if (!std::isfinite(f)) {
    aborted_ = true;
    throw EngineError("objective returned non-finite fitness at evaluation " +
                      std::to_string(state_.evals_used + 1));
  }
  ++state_.evals_used;
  if (f < state_.best_f) {
    state_.best_f = f;
    state_.best_x = x;
  }
  ledger_.observe(state_.best_f - f_opt_, state_.evals_used);
  return f;
}

double EsRun::threshold_length() const {
  const auto& th = state_.threshold;
  if (th.budget_at_activation <= 0) return 0.0;
  const long consumed = state_.evals_used - th.evals_at_activation;
  const double frac = std::max(
      0.0, static_cast<double>(th.budget_at_activation - consumed) /
               static_cast<double>(th.budget_at_activation));
  const double diagonal = (kDomainHigh - kDomainLow) * std::sqrt(statics_.dim);
  return statics_.threshold_init_fraction * diagonal *
         std::pow(frac, statics_.threshold_decay);
}

GenerationSummary EsRun::step() {
  GenerationSummary summary;
  if (finished()) return summary;

  const auto& mod = statics_.modules;
  const int dim = statics_.dim;
  const int lambda = statics_.lambda;
  const double sigma = state_.sigma;
  const double best_at_start = state_.best_f;

  const bool tpa_ready = mod.tpa == 1 && state_.generation > 0 &&
                         state_.mean_shift.norm() > 0.0;
  const int n_probes = tpa_ready ? 2 : 0;
  const int n_regular = lambda - n_probes;

  struct Candidate {
    Individual ind;
    int pair = -1;  // index of the mirror pair, -1 if unpaired
    bool probe = false;
    bool evaluated = false;
    bool improved = false;
  };
  std::vector<Candidate> cands;
  cands.reserve(lambda);

  if (tpa_ready) {
    const Vector probe_y = statics_.tpa_probe_scale * state_.mean_shift;
    for (int sign : {+1, -1}) {
      Candidate c;
      c.probe = true;
      c.ind.y = sign * probe_y;
      c.ind.x = state_.mean + sigma * c.ind.y;
      cands.push_back(std::move(c));
    }
  }

  if (n_regular > 0) {
    const bool mirror = mod.mirrored == 1;
    const int fresh = mirror ? (n_regular + 1) / 2 : n_regular;
    auto batch = sampling::draw_batch(*sampler_, fresh);
    if (mod.orthogonal == 1 && fresh > 1)
      sampling::apply_orthogonalization(batch, *sampler_);
    if (mirror) {
      sampling::apply_mirroring(batch);
      batch.directions.resize(n_regular);
    }
    const double min_len = mod.threshold_convergence == 1 ? threshold_length() : 0.0;
    for (int i = 0; i < n_regular; ++i) {
      Candidate c;
      Vector v = sigma * (state_.B * state_.D.cwiseProduct(batch.directions[i]));
      if (min_len > 0.0) {
        const double len = v.norm();
        if (len > 0.0 && len < min_len) v *= min_len / len;
      }
      c.ind.x = state_.mean + v;
      c.ind.y = v / sigma;
      if (mirror && (i / 2) * 2 + 1 < n_regular) c.pair = i / 2;
      cands.push_back(std::move(c));
    }
  }

  // --- evaluation ---
  auto try_evaluate = [&](Candidate& c) {
    if (state_.evals_used >= budget_) return false;
    const double before = state_.best_f;
    c.ind.f = evaluate(c.ind.x);
    c.evaluated = true;
    c.improved = c.ind.f < before;
    ++summary.evals;
    summary.best_evaluated = std::min(summary.best_evaluated, c.ind.f);
    return true;
  };

  const std::size_t first_regular = static_cast<std::size_t>(n_probes);
  for (std::size_t i = 0; i < first_regular; ++i)
    if (!try_evaluate(cands[i])) break;

  if (mod.sequential == 1) {
    // one by one, pair-by-pair when mirrored; the generation ends at the
    // first improvement over the incumbent best, after complete pairs
    std::size_t i = first_regular;
    while (i < cands.size()) {
      std::size_t group_end = i + 1;
      if (cands[i].pair >= 0 && group_end < cands.size() &&
          cands[group_end].pair == cands[i].pair)
        ++group_end;
      bool improved = false;
      bool budget_out = false;
      for (std::size_t j = i; j < group_end; ++j) {
        if (!try_evaluate(cands[j])) {
          budget_out = true;
          break;
        }
        improved = improved || cands[j].improved;
      }
      i = group_end;
      if (budget_out) break;
      if (improved) {
        summary.sequential_stop = i < cands.size();
        break;
      }
    }
  } else {
    for (std::size_t i = first_regular; i < cands.size(); ++i)
      if (!try_evaluate(cands[i])) break;
  }

  std::vector<const Candidate*> evaluated;
  for (const auto& c : cands)
    if (c.evaluated) evaluated.push_back(&c);
  if (evaluated.empty()) return summary;  // budget died before any draw

  // --- pairwise selection: better of each complete mirrored pair ---
  std::vector<const Candidate*> pool;
  if (mod.pairwise == 1) {
    std::vector<const Candidate*> singles;
    std::map<int, std::vector<const Candidate*>> pairs;
    for (const auto* c : evaluated) {
      if (c->pair >= 0)
        pairs[c->pair].push_back(c);
      else
        singles.push_back(c);
    }
    pool = singles;
    for (auto& [id, members] : pairs) {
      const Candidate* best = members.front();
      for (const auto* m : members)
        if (m->ind.f < best->ind.f) best = m;
      pool.push_back(best);
    }
  } else {
    pool = evaluated;
  }
  summary.selection_pool = static_cast<int>(pool.size());

  // --- selection ---
  struct Selected {
    Vector x;
    Vector y;
    double f;
  };
  std::vector<Selected> ranked;
  ranked.reserve(pool.size() + state_.parents.size());
  for (const auto* c : pool) ranked.push_back({c->ind.x, c->ind.y, c->ind.f});
  if (mod.elitism == 1) {
    for (const auto& parent : state_.parents)
      ranked.push_back({parent.x, (parent.x - state_.mean) / sigma, parent.f});
    summary.selection_pool = static_cast<int>(ranked.size());
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Selected& a, const Selected& b) { return a.f < b.f; });

  const int k = std::min<int>(statics_.mu, static_cast<int>(ranked.size()));
  const Vector w = normalized_head(statics_.weights, k);
  const double mu_eff_k = 1.0 / w.squaredNorm();

  const Vector old_mean = state_.mean;
  Vector new_mean = Vector::Zero(dim);
  for (int i = 0; i < k; ++i) new_mean += w[i] * ranked[i].x;
  state_.mean = new_mean;
  state_.mean_shift = new_mean - old_mean;
  summary.population_best = ranked.front().f;

  state_.parents.clear();
  for (int i = 0; i < k; ++i)
    state_.parents.push_back({ranked[i].x, ranked[i].y, ranked[i].f});

  // --- evolution paths ---
  const Vector y_w = state_.mean_shift / sigma;
  const Vector c_invsqrt_yw =
      state_.B * (state_.B.transpose() * y_w).cwiseQuotient(state_.D);
  const double cs = statics_.c_sigma;
  state_.path_sigma = (1.0 - cs) * state_.path_sigma +
                      std::sqrt(cs * (2.0 - cs) * mu_eff_k) * c_invsqrt_yw;
  const double ps_norm = state_.path_sigma.norm();
  const double normalizer =
      std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * (state_.path_age + 1)));
  const bool hsig = ps_norm / normalizer / statics_.chi_n <
                    1.4 + 2.0 / (dim + 1.0);
  const double cc = statics_.c_c;
  state_.path_c = (1.0 - cc) * state_.path_c +
                  (hsig ? std::sqrt(cc * (2.0 - cc) * mu_eff_k) : 0.0) * y_w;

  // --- covariance update ---
  const double c1 = statics_.c_1;
  const double cmu = statics_.c_mu;
  const double delta_hsig = hsig ? 0.0 : cc * (2.0 - cc);
  Matrix rank_mu = Matrix::Zero(dim, dim);
  for (int i = 0; i < k; ++i)
    rank_mu += w[i] * ranked[i].y * ranked[i].y.transpose();
  double decay = 1.0 - c1 - cmu + c1 * delta_hsig;
  Matrix update = c1 * state_.path_c * state_.path_c.transpose() + cmu * rank_mu;
  if (mod.active_update == 1 && evaluated.size() >= 2) {
    // negative-weight term from the worst offspring of the generation
    std::vector<const Candidate*> worst(evaluated);
    std::stable_sort(worst.begin(), worst.end(),
                     [](const Candidate* a, const Candidate* b) {
                       return a->ind.f > b->ind.f;
                     });
    const int m = std::min<int>(statics_.mu, static_cast<int>(worst.size()));
    const Vector wm = normalized_head(statics_.weights, m);
    Matrix z_neg = Matrix::Zero(dim, dim);
    for (int i = 0; i < m; ++i)
      z_neg += wm[i] * worst[i]->ind.y * worst[i]->ind.y.transpose();
    decay += statics_.c_active;
    update -= statics_.c_active * z_neg;
  }
  state_.C = decay * state_.C + update;

  // --- step-size adaptation ---
  if (mod.tpa == 1) {
    if (tpa_ready && cands[0].evaluated && cands[1].evaluated) {
      double increment = 0.0;
      if (cands[0].ind.f < cands[1].ind.f)
        increment = std::log(statics_.tpa_alpha_plus);
      else if (cands[1].ind.f < cands[0].ind.f)
        increment = std::log(statics_.tpa_alpha_minus);
      state_.tpa.smoothed = (1.0 - statics_.tpa_smoothing) * state_.tpa.smoothed +
                            statics_.tpa_smoothing * increment;
    }
    state_.sigma *= std::exp(state_.tpa.smoothed / statics_.tpa_damping);
  } else {
    state_.sigma *=
        std::exp(cs / statics_.d_sigma * (ps_norm / statics_.chi_n - 1.0));
  }
  state_.sigma = std::clamp(state_.sigma, kSigmaMin, kSigmaMax);
  if (!std::isfinite(state_.sigma)) state_.sigma = kSigma0;

  refresh_eigen_decomposition();

  ++state_.generation;
  ++state_.path_age;
  if (state_.best_f < best_at_start)
    state_.last_improvement_gen = state_.generation;

  if (mod.restart_scheme != 0 && !finished() && restart_triggered()) {
    perform_restart();
    summary.restarted = true;
  }
  return summary;
}

void EsRun::refresh_eigen_decomposition() {
  if (!state_.C.allFinite()) {
    // degenerate update (overflow); fall back to an isotropic matrix
    state_.C = Matrix::Identity(statics_.dim, statics_.dim);
    state_.path_sigma.setZero();
    state_.path_c.setZero();
    state_.path_age = 0;
  }
  state_.C = 0.5 * (state_.C + state_.C.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(state_.C);
  Vector eigenvalues = solver.eigenvalues();
  const double max_eig = eigenvalues.maxCoeff();
  const double floor = kEigenFloorRatio * std::max(max_eig, 1e-300);
  if (eigenvalues.minCoeff() < floor) {
    // restore the floor in the eigenbasis; adding the ridge to the matrix
    // itself cancels catastrophically when it is of the order of max_eig
    eigenvalues = eigenvalues.cwiseMax(floor);
    state_.C = solver.eigenvectors() * eigenvalues.asDiagonal() *
               solver.eigenvectors().transpose();
    state_.C = 0.5 * (state_.C + state_.C.transpose());
  }
  state_.B = solver.eigenvectors();
  state_.D = eigenvalues.cwiseSqrt();
}

bool EsRun::restart_triggered() const {
  const long patience =
      10 + static_cast<long>(std::ceil(30.0 * statics_.dim / statics_.lambda));
  if (state_.generation - state_.last_improvement_gen > patience) return true;
  const double max_eig = state_.D.maxCoeff() * state_.D.maxCoeff();
  return state_.sigma * max_eig < 1e-12;
}

void EsRun::perform_restart() {
  auto& rs = state_.restart;
  const long used = state_.evals_used - rs.evals_at_start;
  (rs.small_regime ? rs.budget_small : rs.budget_large) += used;

  const int default_lambda = derive_static(statics_.modules, statics_.dim).lambda;
  int new_lambda = statics_.lambda;
  double sigma0 = kSigma0;
  if (statics_.modules.restart_scheme == 1) {  // IPOP
    new_lambda = statics_.lambda * 2;
  } else {  // BIPOP
    if (rs.budget_large <= rs.budget_small) {
      ++rs.large_count;
      rs.small_regime = false;
      new_lambda = default_lambda << rs.large_count;
    } else {
      rs.small_regime = true;
      const double u1 = to_unit_double(rng_());
      const double u2 = to_unit_double(rng_());
      const int lambda_large = default_lambda << rs.large_count;
      new_lambda = std::max(
          2, static_cast<int>(std::floor(
                 default_lambda *
                 std::pow(0.5 * lambda_large / default_lambda, u1 * u1))));
      sigma0 = kSigma0 * std::pow(10.0, -2.0 * u2);
    }
  }
  ++rs.count;
  rs.evals_at_start = state_.evals_used;

  statics_ = derive_static(statics_.modules, statics_.dim, new_lambda);
  state_.mean = sample_initial_mean();
  reset_dynamic_state(sigma0);
  state_.path_age = 0;
  state_.threshold = {budget_ - state_.evals_used, state_.evals_used};
}

void EsRun::switch_configuration(const ModuleConfiguration& new_config) {
  if (new_config.restart_scheme != 0)
    throw std::invalid_argument(
        "switch target must have the restart scheme disabled");
  const ModuleConfiguration old = statics_.modules;
  statics_ = derive_static(new_config, statics_.dim, statics_.lambda);
  if (new_config.threshold_convergence == 1 && old.threshold_convergence == 0)
    state_.threshold = {budget_ - state_.evals_used, state_.evals_used};
  if (new_config.tpa == 1 && old.tpa == 0) state_.tpa = {};
  if (new_config.sampler != old.sampler) rebuild_sampler();
}

RunRecord run_static(const ModuleConfiguration& config,
                     const Objective& objective, double f_opt, int dim,
                     long budget, std::uint64_t seed) {
  EsRun run(config, objective, f_opt, dim, budget, seed);
  RunRecord rec;
  rec.config_repr = encode(config);
  rec.seed = seed;
  try {
    while (!run.finished()) run.step();
  } catch (const EngineError& e) {
    rec.error = e.what();
  }
  rec.hits = run.ledger().hits();
  rec.budget_used = run.evals_used();
  return rec;
}

RunRecord run_adaptive(const AdaptiveTriple& triple, const Objective& objective,
                       double f_opt, int dim, long budget, std::uint64_t seed) {
  const ModuleConfiguration c1 = decode(triple.c1);
  const ModuleConfiguration c2 = decode(triple.c2);
  if (c1.restart_scheme != 0 || c2.restart_scheme != 0)
    throw std::invalid_argument(
        "adaptive configurations must have the restart scheme disabled");
  if (triple.tau_index < 0 || triple.tau_index >= kNumTargets)
    throw std::invalid_argument("splitpoint index out of range");
  const double tau = TargetGrid::standard()[triple.tau_index];

  EsRun run(c1, objective, f_opt, dim, budget, seed);
  RunRecord rec;
  rec.config_repr = triple.repr();
  rec.seed = seed;
  bool switched = false;
  try {
    while (!run.finished()) {
      run.step();
      if (!switched && run.best_precision() <= tau) {
        run.switch_configuration(c2);
        rec.switch_eval = run.evals_used();
        switched = true;
      }
    }
  } catch (const EngineError& e) {
    rec.error = e.what();
  }
  rec.hits = run.ledger().hits();
  rec.budget_used = run.evals_used();
  return rec;
}

}  // namespace cmaswitch

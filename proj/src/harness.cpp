#include "reflectron/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "reflectron/rng.hpp"
#include "reflectron/svd.hpp"

namespace refl {

namespace {
constexpr double kSupportThreshold = 0.001;

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

long support_count(const Eigen::VectorXd& v) {
  long c = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > kSupportThreshold) ++c;
  }
  return c;
}
}  // namespace

void SparseTaskSpec::validate() const {
  if (d < 1 || sparsity < 1 || sparsity > d) {
    throw std::invalid_argument("need 1 <= sparsity <= d");
  }
  if (n_train < 1 || n_holdout < 1 || n_test < 1) {
    throw std::invalid_argument("sample counts must be positive");
  }
  if (noise_level < 0.0) {
    throw std::invalid_argument("noise level must be nonnegative");
  }
}

double SparseTask::radius(double p) const { return 2.0 * lp_norm(theta, p); }

namespace {

Dataset draw_split(Rng& rng, int n, const Eigen::VectorXd& theta,
                   double noise_level) {
  const int d = static_cast<int>(theta.size());
  const Activation sigmoid = Activation::sigmoid();
  Dataset out;
  out.features.resize(n, d);
  out.labels.resize(n);
  out.clean_labels.emplace(n);
  for (int i = 0; i < n; ++i) {
    double z = 0.0;
    for (int j = 0; j < d; ++j) {
      float x = static_cast<float>(rng.uniform(-1.0, 1.0));
      out.features(i, j) = x;
      z += theta[j] * static_cast<double>(x);
    }
    double clean = activation_apply(sigmoid, z);
    (*out.clean_labels)[i] = clean;
    out.labels[i] = noise_level > 0.0
                        ? clean + rng.uniform(-noise_level, noise_level)
                        : clean;
  }
  out.feature_dual_norm_bound = 1.0;
  out.dual_norm_tag = "linf";
  return out;
}

}  // namespace

SparseTask gen_sparse_task(const SparseTaskSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SparseTask task;
  // s active coordinates at random positions, magnitudes in [0.5, 1] with
  // random signs so they sit well above the support-count threshold.
  task.theta = Eigen::VectorXd::Zero(spec.d);
  std::vector<int> perm = rng.permutation(spec.d);
  for (int k = 0; k < spec.sparsity; ++k) {
    double mag = rng.uniform(0.5, 1.0);
    double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
    task.theta[perm[k]] = sign * mag;
  }
  task.train = draw_split(rng, spec.n_train, task.theta, spec.noise_level);
  task.holdout = draw_split(rng, spec.n_holdout, task.theta, spec.noise_level);
  task.test = draw_split(rng, spec.n_test, task.theta, spec.noise_level);
  task.radius_l1 = task.radius(1.0);
  return task;
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::glmtron:
      return "glmtron";
    case Algorithm::pnorm:
      return "pnorm";
    case Algorithm::hypentropy:
      return "hypentropy";
  }
  throw std::logic_error("unreachable");
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "glmtron") return Algorithm::glmtron;
  if (name == "pnorm") return Algorithm::pnorm;
  if (name == "hypentropy") return Algorithm::hypentropy;
  throw std::invalid_argument("unknown algorithm: " + name);
}

void SweepGrid::validate() const {
  if (lambdas.empty() || algorithms.empty()) {
    throw std::invalid_argument("grid lists must be nonempty");
  }
  for (Algorithm a : algorithms) {
    if (a == Algorithm::pnorm && ps.empty()) {
      throw std::invalid_argument("pnorm requires a nonempty p list");
    }
    if (a == Algorithm::hypentropy && betas.empty()) {
      throw std::invalid_argument("hypentropy requires a nonempty beta list");
    }
  }
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
}

std::vector<CellConfig> enumerate_cells(const SweepGrid& grid) {
  std::vector<CellConfig> cells;
  for (Algorithm alg : grid.algorithms) {
    for (double lambda : grid.lambdas) {
      switch (alg) {
        case Algorithm::glmtron:
          cells.push_back({alg, lambda, 0.0, 0.0});
          break;
        case Algorithm::pnorm:
          for (double p : grid.ps) cells.push_back({alg, lambda, 0.0, p});
          break;
        case Algorithm::hypentropy:
          for (double beta : grid.betas) {
            cells.push_back({alg, lambda, beta, 0.0});
          }
          break;
      }
    }
  }
  return cells;
}

namespace {

ReflectronConfig cell_to_config(const CellConfig& cell, const SweepGrid& grid,
                                double radius_l1, double radius_p,
                                bool spectral) {
  ReflectronConfig cfg;
  cfg.step_size = cell.lambda;
  cfg.iterations = grid.iterations;
  cfg.xi = grid.xi;
  cfg.activation = Activation::sigmoid();
  switch (cell.algorithm) {
    case Algorithm::glmtron:
      cfg.potential = Potential::euclidean();
      if (grid.use_projection) {
        cfg.constraint = spectral ? ConstraintSet::spectral_l1(radius_l1)
                                  : ConstraintSet::l1_ball(radius_l1);
      }
      break;
    case Algorithm::pnorm:
      cfg.potential = Potential::pnorm(cell.p);
      if (grid.use_projection) {
        cfg.constraint = spectral
                             ? ConstraintSet::spectral_lp(cell.p, radius_p)
                             : ConstraintSet::lp_ball(cell.p, radius_p);
      }
      break;
    case Algorithm::hypentropy:
      cfg.potential = Potential::hypentropy(cell.beta);
      if (grid.use_projection) {
        cfg.constraint = spectral ? ConstraintSet::spectral_l1(radius_l1)
                                  : ConstraintSet::l1_ball(radius_l1);
      }
      break;
  }
  return cfg;
}

ResultRecord base_record(const CellConfig& cell, std::uint64_t seed) {
  ResultRecord rec;
  rec.algorithm = algorithm_name(cell.algorithm);
  rec.lambda = cell.lambda;
  rec.beta = cell.beta;
  rec.p = cell.p;
  rec.seed = seed;
  return rec;
}

}  // namespace

ResultRecord run_sweep_cell(const SparseTaskSpec& spec, const SweepGrid& grid,
                            int cell_index, int trial) {
  spec.validate();
  grid.validate();
  std::vector<CellConfig> cells = enumerate_cells(grid);
  if (cell_index < 0 || cell_index >= static_cast<int>(cells.size())) {
    throw std::invalid_argument("cell index out of range");
  }
  const CellConfig& cell = cells[cell_index];

  SparseTaskSpec trial_spec = spec;
  trial_spec.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(trial),
                                0);
  SparseTask task = gen_sparse_task(trial_spec);

  std::uint64_t run_seed =
      derive_seed(spec.seed, static_cast<std::uint64_t>(trial),
                  static_cast<std::uint64_t>(cell_index) + 1);
  ReflectronConfig cfg =
      cell_to_config(cell, grid, task.radius_l1,
                     cell.algorithm == Algorithm::pnorm ? task.radius(cell.p)
                                                        : 0.0,
                     /*spectral=*/false);
  cfg.seed = run_seed;

  ResultRecord rec = base_record(cell, run_seed);
  auto t0 = std::chrono::steady_clock::now();
  TrainTrace trace = fit_full_batch(cfg, task.train, &task.holdout);
  rec.diverged = trace.diverged;
  if (trace.best_iteration > 0) {
    Hypothesis h = select_best_by_holdout(trace);
    rec.train_risk = trace.train_risk[trace.best_iteration - 1];
    rec.holdout_risk = trace.holdout_risk[trace.best_iteration - 1];
    rec.test_risk = empirical_err(h, task.test);
    rec.l1_error = (h.params - task.theta).lpNorm<1>();
    rec.support_count = support_count(h.params);
  } else {
    rec.train_risk = rec.holdout_risk = rec.test_risk =
        std::numeric_limits<double>::infinity();
  }
  rec.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return rec;
}

std::vector<ResultRecord> run_sweep(const SparseTaskSpec& spec,
                                    const SweepGrid& grid) {
  spec.validate();
  grid.validate();
  std::vector<CellConfig> cells = enumerate_cells(grid);
  const int n_cells = static_cast<int>(cells.size());
  std::vector<ResultRecord> records(
      static_cast<std::size_t>(n_cells) * grid.trials);

  for (int trial = 0; trial < grid.trials; ++trial) {
    // One task per trial, shared read-only across the cell fits.
    SparseTaskSpec trial_spec = spec;
    trial_spec.seed =
        derive_seed(spec.seed, static_cast<std::uint64_t>(trial), 0);
    SparseTask task = gen_sparse_task(trial_spec);

#pragma omp parallel for schedule(dynamic)
    for (int c = 0; c < n_cells; ++c) {
      const CellConfig& cell = cells[c];
      std::uint64_t run_seed =
          derive_seed(spec.seed, static_cast<std::uint64_t>(trial),
                      static_cast<std::uint64_t>(c) + 1);
      ReflectronConfig cfg = cell_to_config(
          cell, grid, task.radius_l1,
          cell.algorithm == Algorithm::pnorm ? task.radius(cell.p) : 0.0,
          /*spectral=*/false);
      cfg.seed = run_seed;

      ResultRecord rec = base_record(cell, run_seed);
      auto t0 = std::chrono::steady_clock::now();
      TrainTrace trace = fit_full_batch(cfg, task.train, &task.holdout);
      rec.diverged = trace.diverged;
      if (trace.best_iteration > 0) {
        Hypothesis h = select_best_by_holdout(trace);
        rec.train_risk = trace.train_risk[trace.best_iteration - 1];
        rec.holdout_risk = trace.holdout_risk[trace.best_iteration - 1];
        rec.test_risk = empirical_err(h, task.test);
        rec.l1_error = (h.params - task.theta).lpNorm<1>();
        rec.support_count = support_count(h.params);
      } else {
        rec.train_risk = rec.holdout_risk = rec.test_risk =
            std::numeric_limits<double>::infinity();
      }
      rec.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
      records[static_cast<std::size_t>(c) * grid.trials + trial] =
          std::move(rec);
    }
  }
  return records;
}

std::vector<AlgorithmSummary> summarize_best(
    const std::vector<ResultRecord>& records) {
  // Group by (algorithm, lambda, beta, p); rank configurations by the median
  // test risk over their trials.
  struct Key {
    std::string alg;
    double lambda, beta, p;
    bool operator<(const Key& o) const {
      if (alg != o.alg) return alg < o.alg;
      if (lambda != o.lambda) return lambda < o.lambda;
      if (beta != o.beta) return beta < o.beta;
      return p < o.p;
    }
  };
  std::map<Key, std::vector<const ResultRecord*>> groups;
  for (const auto& r : records) {
    groups[{r.algorithm, r.lambda, r.beta, r.p}].push_back(&r);
  }
  std::map<std::string, AlgorithmSummary> best;
  for (const auto& [key, recs] : groups) {
    std::vector<double> tests, l1s, supports;
    for (const auto* r : recs) {
      tests.push_back(r->test_risk);
      l1s.push_back(r->l1_error);
      supports.push_back(static_cast<double>(r->support_count));
    }
    double med = median(tests);
    auto it = best.find(key.alg);
    if (!std::isfinite(med)) continue;
    if (it == best.end() || med < it->second.median_test_risk) {
      AlgorithmSummary s;
      s.algorithm = key.alg;
      s.lambda = key.lambda;
      s.beta = key.beta;
      s.p = key.p;
      s.median_test_risk = med;
      s.median_l1_error = median(l1s);
      s.median_support_count = median(supports);
      best[key.alg] = s;
    }
  }
  std::vector<AlgorithmSummary> out;
  for (auto& [alg, s] : best) out.push_back(s);
  return out;
}

void LowRankTaskSpec::validate() const {
  if (dimension < 1 || rank < 1 || rank > dimension) {
    throw std::invalid_argument("need 1 <= rank <= dimension");
  }
  if (n_train < 1 || n_holdout < 1 || n_test < 1) {
    throw std::invalid_argument("trajectory counts must be positive");
  }
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
}

namespace {

struct LowRankTrial {
  SystemSpec system;
  TrajectorySet train, holdout, test;
  double radius_l1 = 0.0;
  Eigen::VectorXd true_spectrum;
};

LowRankTrial make_lowrank_trial(const LowRankTaskSpec& spec, int trial) {
  LowRankTrial t;
  std::uint64_t s = derive_seed(spec.seed, static_cast<std::uint64_t>(trial),
                                0);
  t.system = make_system_spec(spec.dimension, spec.rank, spec.decay,
                              spec.noise_level, spec.horizon,
                              derive_seed(s, 1, 0));
  t.train = simulate(t.system, spec.n_train, derive_seed(s, 2, 0));
  t.holdout = simulate(t.system, spec.n_holdout, derive_seed(s, 3, 0));
  t.test = simulate(t.system, spec.n_test, derive_seed(s, 4, 0));
  t.true_spectrum = thin_svd(t.system.true_matrix).singular_values;
  t.radius_l1 = 2.0 * t.true_spectrum.lpNorm<1>();
  return t;
}

ResultRecord run_lowrank_on_trial(const LowRankTrial& t,
                                  const LowRankTaskSpec& spec,
                                  const SweepGrid& grid,
                                  const CellConfig& cell,
                                  std::uint64_t run_seed) {
  double radius_p = cell.algorithm == Algorithm::pnorm
                        ? 2.0 * lp_norm(t.true_spectrum, cell.p)
                        : 0.0;
  ReflectronConfig cfg = cell_to_config(cell, grid, t.radius_l1, radius_p,
                                        /*spectral=*/true);
  cfg.seed = run_seed;

  ResultRecord rec = base_record(cell, run_seed);
  auto t0 = std::chrono::steady_clock::now();
  MatrixTrainTrace trace = fit_spectral(cfg, t.train, t.system, &t.holdout);
  rec.diverged = trace.diverged;
  if (trace.best_iteration > 0) {
    rec.train_risk = trace.train_risk[trace.best_iteration - 1];
    rec.holdout_risk = trace.holdout_risk[trace.best_iteration - 1];
    rec.test_risk =
        matrix_empirical_risk(trace.best_params, t.test, t.system);
    rec.l1_error =
        (trace.best_params - t.system.true_matrix).cwiseAbs().sum();
    rec.support_count =
        support_count(thin_svd(trace.best_params).singular_values);
  } else {
    rec.train_risk = rec.holdout_risk = rec.test_risk =
        std::numeric_limits<double>::infinity();
  }
  rec.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return rec;
}

}  // namespace

ResultRecord run_lowrank_cell(const LowRankTaskSpec& spec,
                              const SweepGrid& grid, int cell_index,
                              int trial) {
  spec.validate();
  grid.validate();
  std::vector<CellConfig> cells = enumerate_cells(grid);
  if (cell_index < 0 || cell_index >= static_cast<int>(cells.size())) {
    throw std::invalid_argument("cell index out of range");
  }
  LowRankTrial t = make_lowrank_trial(spec, trial);
  std::uint64_t run_seed =
      derive_seed(spec.seed, static_cast<std::uint64_t>(trial),
                  static_cast<std::uint64_t>(cell_index) + 1);
  return run_lowrank_on_trial(t, spec, grid, cells[cell_index], run_seed);
}

std::vector<ResultRecord> run_lowrank_experiment(const LowRankTaskSpec& spec,
                                                 const SweepGrid& grid) {
  spec.validate();
  grid.validate();
  std::vector<CellConfig> cells = enumerate_cells(grid);
  const int n_cells = static_cast<int>(cells.size());
  std::vector<ResultRecord> records(
      static_cast<std::size_t>(n_cells) * grid.trials);
  for (int trial = 0; trial < grid.trials; ++trial) {
    LowRankTrial t = make_lowrank_trial(spec, trial);
#pragma omp parallel for schedule(dynamic)
    for (int c = 0; c < n_cells; ++c) {
      std::uint64_t run_seed =
          derive_seed(spec.seed, static_cast<std::uint64_t>(trial),
                      static_cast<std::uint64_t>(c) + 1);
      records[static_cast<std::size_t>(c) * grid.trials + trial] =
          run_lowrank_on_trial(t, spec, grid, cells[c], run_seed);
    }
  }
  return records;
}

GramNormEstimate gram_norm_diagnostic(int n, int d, int trials,
                                      std::uint64_t seed) {
  if (n < 1 || d < 1 || trials < 1) {
    throw std::invalid_argument("sizes must be positive");
  }
  double sum_f = 0.0, sum_op = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t), 0));
    Eigen::MatrixXd x(n, d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) x(i, j) = rng.normal();
    }
    Eigen::MatrixXd h = (x.transpose() * x) / static_cast<double>(n);
    sum_f += h.norm();
    sum_op += thin_svd(h).singular_values[0];
  }
  return {sum_f / trials, sum_op / trials};
}

}  // namespace refl

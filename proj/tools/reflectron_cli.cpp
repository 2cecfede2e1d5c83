#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "reflectron/bounds.hpp"
#include "reflectron/config.hpp"
#include "reflectron/harness.hpp"
#include "reflectron/rng.hpp"

using json = nlohmann::json;
using namespace refl;

namespace {

struct TaskFlags {
  SparseTaskSpec spec;
  void attach(CLI::App* app) {
    app->add_option("--d", spec.d, "ambient dimension");
    app->add_option("--sparsity", spec.sparsity, "active coordinates");
    app->add_option("--n-train", spec.n_train, "training samples");
    app->add_option("--n-holdout", spec.n_holdout, "holdout samples");
    app->add_option("--n-test", spec.n_test, "test samples");
    app->add_option("--noise", spec.noise_level, "label noise half-width");
    app->add_option("--seed", spec.seed, "base seed");
  }
};

struct GridFlags {
  std::vector<std::string> algorithms = {"glmtron", "pnorm", "hypentropy"};
  SweepGrid grid;
  bool no_projection = false;
  std::string xi = "one";

  void attach(CLI::App* app) {
    app->add_option("--lambda-grid", grid.lambdas, "step sizes")->delimiter(',');
    app->add_option("--beta-grid", grid.betas, "hypentropy scales")->delimiter(',');
    app->add_option("--p-grid", grid.ps, "pnorm exponents")->delimiter(',');
    app->add_option("--algorithms", algorithms,
                    "subset of glmtron,pnorm,hypentropy")
        ->delimiter(',');
    app->add_option("--trials", grid.trials, "independent trials");
    app->add_option("--iterations", grid.iterations, "iterations per fit");
    app->add_flag("--no-projection", no_projection,
                  "drop the explicit constraint");
    app->add_option("--xi", xi, "pseudogradient weight: one|derivative");
  }

  SweepGrid resolve() const {
    SweepGrid g = grid;
    g.algorithms.clear();
    for (const auto& name : algorithms) {
      g.algorithms.push_back(algorithm_from_name(name));
    }
    g.use_projection = !no_projection;
    if (xi == "one") {
      g.xi = XiMode::one();
    } else if (xi == "derivative") {
      g.xi = XiMode::derivative();
    } else {
      throw CLI::ValidationError("--xi must be one or derivative");
    }
    return g;
  }
};

// Flat key=value config support. File values fill options the command line
// did not set; command-line flags win; unknown keys are rejected.
struct ConfigOption {
  std::string path;
  void attach(CLI::App* app) {
    app->add_option("--config", path,
                    "key=value config file; command-line flags override "
                    "file values");
  }
  void apply(CLI::App* app) const {
    if (path.empty()) return;
    for (const auto& [key, value] : parse_key_value_file(path)) {
      if (key == "config") {
        throw std::runtime_error("config files cannot nest");
      }
      CLI::Option* opt = app->get_option_no_throw("--" + key);
      if (opt == nullptr) {
        throw std::runtime_error("unknown config key: " + key);
      }
      if (opt->count() == 0) {
        opt->add_result(value);
        opt->run_callback();
      }
    }
  }
};

json records_to_summary_json(const std::vector<ResultRecord>& records) {
  json out = json::array();
  for (const auto& s : summarize_best(records)) {
    out.push_back({{"algorithm", s.algorithm},
                   {"lambda", s.lambda},
                   {"beta", s.beta},
                   {"p", s.p},
                   {"median_test_risk", s.median_test_risk},
                   {"median_l1_error", s.median_l1_error},
                   {"median_support_count", s.median_support_count}});
  }
  return out;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << "\n";
}

int cmd_fit(const TaskFlags& task, const std::string& algorithm,
            double lambda, double beta, double p, int iterations,
            const std::string& xi, bool no_projection,
            const std::string& trace_csv, const std::string& out_json) {
  SparseTask data = gen_sparse_task(task.spec);
  SweepGrid grid;
  grid.lambdas = {lambda};
  grid.betas = {beta};
  grid.ps = {p};
  grid.algorithms = {algorithm_from_name(algorithm)};
  grid.trials = 1;
  grid.iterations = iterations;
  grid.use_projection = !no_projection;
  grid.xi = xi == "derivative" ? XiMode::derivative() : XiMode::one();

  ResultRecord rec = run_sweep_cell(task.spec, grid, 0, 0);
  std::cout << records_csv_header() << "\n";
  std::vector<ResultRecord> one = {rec};
  std::cout << rec.algorithm << " test_risk=" << rec.test_risk
            << " holdout_risk=" << rec.holdout_risk
            << " l1_error=" << rec.l1_error
            << " support=" << rec.support_count << "\n";

  if (!trace_csv.empty()) {
    // refit to dump the per-iteration curves
    auto cells = enumerate_cells(grid);
    SparseTaskSpec trial_spec = task.spec;
    trial_spec.seed = derive_seed(task.spec.seed, 0, 0);
    SparseTask t = gen_sparse_task(trial_spec);
    ReflectronConfig cfg;
    cfg.step_size = lambda;
    cfg.iterations = iterations;
    cfg.xi = grid.xi;
    switch (cells[0].algorithm) {
      case Algorithm::glmtron:
        cfg.potential = Potential::euclidean();
        if (grid.use_projection) {
          cfg.constraint = ConstraintSet::l1_ball(t.radius_l1);
        }
        break;
      case Algorithm::pnorm:
        cfg.potential = Potential::pnorm(p);
        if (grid.use_projection) {
          cfg.constraint = ConstraintSet::lp_ball(p, t.radius(p));
        }
        break;
      case Algorithm::hypentropy:
        cfg.potential = Potential::hypentropy(beta);
        if (grid.use_projection) {
          cfg.constraint = ConstraintSet::l1_ball(t.radius_l1);
        }
        break;
    }
    TrainTrace trace = fit_full_batch(cfg, t.train, &t.holdout);
    write_trace_csv(trace_csv, trace);
    std::cout << "trace written to " << trace_csv << "\n";
  }
  if (!out_json.empty()) {
    json j = {{"command", "fit"},
              {"algorithm", rec.algorithm},
              {"lambda", rec.lambda},
              {"beta", rec.beta},
              {"p", rec.p},
              {"seed", rec.seed},
              {"train_risk", rec.train_risk},
              {"holdout_risk", rec.holdout_risk},
              {"test_risk", rec.test_risk},
              {"l1_error", rec.l1_error},
              {"support_count", rec.support_count},
              {"diverged", rec.diverged}};
    write_json(out_json, j);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  // OpenBLAS threading would fight the sweep-level OpenMP parallelism and
  // make results depend on a second environment variable; pin it.
  setenv("OPENBLAS_NUM_THREADS", "1", 1);

  CLI::App app{"mirror-descent pseudogradient GLM training"};
  app.require_subcommand(1);

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "single full-batch fit");
  ConfigOption fit_cfg;
  fit_cfg.attach(fit);
  TaskFlags fit_task;
  fit_task.attach(fit);
  std::string fit_alg = "glmtron", fit_xi = "one";
  double fit_lambda = 0.1, fit_beta = 1e-3, fit_p = 1.5;
  int fit_iterations = 5000;
  bool fit_noproj = false;
  std::string fit_trace, fit_json;
  fit->add_option("--algorithm", fit_alg, "glmtron|pnorm|hypentropy");
  fit->add_option("--lambda", fit_lambda, "step size");
  fit->add_option("--beta", fit_beta, "hypentropy scale");
  fit->add_option("--p", fit_p, "pnorm exponent");
  fit->add_option("--iterations", fit_iterations, "iteration budget");
  fit->add_option("--xi", fit_xi, "one|derivative");
  fit->add_flag("--no-projection", fit_noproj, "drop the constraint");
  fit->add_option("--trace-csv", fit_trace, "per-iteration curve output");
  fit->add_option("--out-json", fit_json, "summary output");

  // ---- sweep ----
  auto* sweep = app.add_subcommand("sweep", "hyperparameter grid sweep");
  ConfigOption sweep_cfg;
  sweep_cfg.attach(sweep);
  TaskFlags sweep_task;
  sweep_task.attach(sweep);
  GridFlags sweep_grid;
  sweep_grid.attach(sweep);
  std::string sweep_csv = "sweep_results.csv";
  std::string sweep_json = "sweep_summary.json";
  sweep->add_option("--out-csv", sweep_csv, "records output");
  sweep->add_option("--out-json", sweep_json, "summary output");

  // ---- experiment ----
  auto* experiment = app.add_subcommand("experiment", "experiment suites");
  experiment->require_subcommand(1);

  auto* sparse = experiment->add_subcommand(
      "sparse-vector", "sparse-target suite over a list of sample sizes");
  ConfigOption sparse_cfg;
  sparse_cfg.attach(sparse);
  int sp_d = 10000, sp_s = 100, sp_nhold = 500, sp_ntest = 1000;
  double sp_noise = 0.1;
  std::uint64_t sp_seed = 0;
  std::vector<int> sp_nlist = {1000, 2000, 5000};
  GridFlags sparse_grid;
  sparse_grid.attach(sparse);
  std::string sp_prefix = "sparse_vector";
  sparse->add_option("--d", sp_d, "ambient dimension");
  sparse->add_option("--sparsity", sp_s, "active coordinates");
  sparse->add_option("--n-list", sp_nlist, "training sizes")->delimiter(',');
  sparse->add_option("--n-holdout", sp_nhold, "holdout samples");
  sparse->add_option("--n-test", sp_ntest, "test samples");
  sparse->add_option("--noise", sp_noise, "label noise half-width");
  sparse->add_option("--seed", sp_seed, "base seed");
  sparse->add_option("--out-prefix", sp_prefix, "output file prefix");

  auto* lowrank = experiment->add_subcommand(
      "low-rank", "low-rank system identification suite");
  ConfigOption lowrank_cfg;
  lowrank_cfg.attach(lowrank);
  LowRankTaskSpec lr_spec;
  lr_spec.dimension = 1000;
  lr_spec.rank = 20;
  std::vector<int> lr_nlist = {500, 1000};
  GridFlags lowrank_grid;
  lowrank_grid.attach(lowrank);
  std::string lr_prefix = "low_rank";
  lowrank->add_option("--dimension", lr_spec.dimension, "state dimension");
  lowrank->add_option("--rank", lr_spec.rank, "transition matrix rank");
  lowrank->add_option("--decay", lr_spec.decay, "state decay factor");
  lowrank->add_option("--noise", lr_spec.noise_level,
                      "process noise half-width");
  lowrank->add_option("--horizon", lr_spec.horizon, "trajectory length");
  lowrank->add_option("--n-list", lr_nlist, "trajectory counts")->delimiter(',');
  lowrank->add_option("--n-holdout", lr_spec.n_holdout,
                      "holdout trajectories");
  lowrank->add_option("--n-test", lr_spec.n_test, "test trajectories");
  lowrank->add_option("--seed", lr_spec.seed, "base seed");
  lowrank->add_option("--out-prefix", lr_prefix, "output file prefix");

  // ---- gram-norms ----
  auto* gram = app.add_subcommand("gram-norms",
                                  "Frobenius vs operator norm scaling of the "
                                  "empirical second-moment matrix");
  ConfigOption gram_cfg;
  gram_cfg.attach(gram);
  int gn_n = 100, gn_d = 100, gn_trials = 20;
  std::uint64_t gn_seed = 0;
  std::string gn_json;
  gram->add_option("--n", gn_n, "samples");
  gram->add_option("--d", gn_d, "dimension");
  gram->add_option("--trials", gn_trials, "Monte-Carlo trials");
  gram->add_option("--seed", gn_seed, "base seed");
  gram->add_option("--out-json", gn_json, "summary output");

  // ---- bound ----
  auto* bound = app.add_subcommand("bound", "evaluate a closed-form bound");
  ConfigOption bound_cfg;
  bound_cfg.attach(bound);
  std::string bd_kind;
  bounds::BoundInputs bd;
  double bd_rademacher = 0.0;
  bound->add_option("--kind", bd_kind,
                    "risk|pnorm-pair|l1-logdim|simplex-kl|rademacher|"
                    "eta-pnorm|eta-linf");
  bound->add_option("--L", bd.lipschitz, "activation Lipschitz constant");
  bound->add_option("--C", bd.feature_bound, "feature dual-norm bound");
  bound->add_option("--W", bd.param_bound, "target primal-norm bound");
  bound->add_option("--B", bd.xi_bound, "xi bound");
  bound->add_option("--sigma", bd.sigma, "strong convexity constant");
  bound->add_option("--gamma", bd.gamma, "xi lower bound");
  bound->add_option("--eta", bd.eta, "noise concentration level");
  bound->add_option("--psi-theta", bd.potential_at_target,
                    "potential at the target");
  bound->add_option("--n", bd.n, "sample count");
  bound->add_option("--dim", bd.d, "dimension");
  bound->add_option("--delta", bd.delta, "failure probability");
  bound->add_option("--q", bd.q, "primal exponent");
  bound->add_option("--rademacher", bd_rademacher,
                    "Rademacher complexity for the risk kind");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed()) {
      fit_cfg.apply(fit);
      return cmd_fit(fit_task, fit_alg, fit_lambda, fit_beta, fit_p,
                     fit_iterations, fit_xi, fit_noproj, fit_trace, fit_json);
    }
    if (sweep->parsed()) {
      sweep_cfg.apply(sweep);
      auto records = run_sweep(sweep_task.spec, sweep_grid.resolve());
      write_records_csv(sweep_csv, records);
      json j = {{"command", "sweep"},
                {"d", sweep_task.spec.d},
                {"sparsity", sweep_task.spec.sparsity},
                {"n_train", sweep_task.spec.n_train},
                {"seed", sweep_task.spec.seed},
                {"records_csv", sweep_csv},
                {"best", records_to_summary_json(records)}};
      write_json(sweep_json, j);
      std::cout << "wrote " << sweep_csv << " and " << sweep_json << "\n";
      return 0;
    }
    if (sparse->parsed()) {
      sparse_cfg.apply(sparse);
      json all = json::array();
      for (int n : sp_nlist) {
        SparseTaskSpec spec;
        spec.d = sp_d;
        spec.sparsity = sp_s;
        spec.n_train = n;
        spec.n_holdout = sp_nhold;
        spec.n_test = sp_ntest;
        spec.noise_level = sp_noise;
        spec.seed = derive_seed(sp_seed, static_cast<std::uint64_t>(n), 17);
        auto records = run_sweep(spec, sparse_grid.resolve());
        std::string csv = sp_prefix + "_n" + std::to_string(n) + ".csv";
        write_records_csv(csv, records);
        all.push_back({{"n", n},
                       {"records_csv", csv},
                       {"best", records_to_summary_json(records)}});
        std::cout << "n=" << n << " done -> " << csv << "\n";
      }
      write_json(sp_prefix + "_summary.json",
                 json{{"command", "experiment sparse-vector"},
                      {"d", sp_d},
                      {"sparsity", sp_s},
                      {"runs", all}});
      return 0;
    }
    if (lowrank->parsed()) {
      lowrank_cfg.apply(lowrank);
      json all = json::array();
      for (int n : lr_nlist) {
        LowRankTaskSpec spec = lr_spec;
        spec.n_train = n;
        spec.seed = derive_seed(lr_spec.seed, static_cast<std::uint64_t>(n),
                                23);
        auto records = run_lowrank_experiment(spec, lowrank_grid.resolve());
        std::string csv = lr_prefix + "_n" + std::to_string(n) + ".csv";
        write_records_csv(csv, records);
        all.push_back({{"n", n},
                       {"records_csv", csv},
                       {"best", records_to_summary_json(records)}});
        std::cout << "n=" << n << " done -> " << csv << "\n";
      }
      write_json(lr_prefix + "_summary.json",
                 json{{"command", "experiment low-rank"},
                      {"dimension", lr_spec.dimension},
                      {"rank", lr_spec.rank},
                      {"runs", all}});
      return 0;
    }
    if (gram->parsed()) {
      gram_cfg.apply(gram);
      GramNormEstimate est = gram_norm_diagnostic(gn_n, gn_d, gn_trials,
                                                  gn_seed);
      std::cout << "mean_frobenius=" << est.mean_frobenius
                << " mean_operator=" << est.mean_operator << "\n";
      if (!gn_json.empty()) {
        write_json(gn_json, json{{"command", "gram-norms"},
                                 {"n", gn_n},
                                 {"d", gn_d},
                                 {"trials", gn_trials},
                                 {"mean_frobenius", est.mean_frobenius},
                                 {"mean_operator", est.mean_operator}});
      }
      return 0;
    }
    if (bound->parsed()) {
      bound_cfg.apply(bound);
      if (bd_kind.empty()) {
        std::cerr << "error: --kind is required\n";
        return 1;
      }
      double value = 0.0;
      if (bd_kind == "risk") {
        value = bounds::risk_bound(bd, bd_rademacher);
      } else if (bd_kind == "pnorm-pair") {
        value = bounds::geometry_bound(bounds::GeometryBoundKind::pnorm_pair,
                                       bd);
      } else if (bd_kind == "l1-logdim") {
        value = bounds::geometry_bound(bounds::GeometryBoundKind::l1_logdim,
                                       bd);
      } else if (bd_kind == "simplex-kl") {
        value = bounds::geometry_bound(bounds::GeometryBoundKind::simplex_kl,
                                       bd);
      } else if (bd_kind == "rademacher") {
        value = bounds::rademacher_linear(bd.feature_bound, bd.param_bound,
                                          bd.sigma, bd.n);
      } else if (bd_kind == "eta-pnorm") {
        value = bounds::eta_bound(bd.feature_bound, bd.n, bd.delta,
                                  bounds::EtaRegime::dual_pnorm(bd.q));
      } else if (bd_kind == "eta-linf") {
        value = bounds::eta_bound(bd.feature_bound, bd.n, bd.delta,
                                  bounds::EtaRegime::dual_linf(bd.d));
      } else {
        std::cerr << "unknown bound kind: " << bd_kind << "\n";
        return 1;
      }
      std::cout << value << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

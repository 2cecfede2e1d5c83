#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reflectron/matrixglm.hpp"
#include "reflectron/reflectron.hpp"

namespace refl {

// Sparse-target regression task: x ~ Unif[-1,1]^d, y = sigmoid(<theta,x>)
// plus bounded label noise, with s active coordinates.
struct SparseTaskSpec {
  int d = 0;
  int sparsity = 0;
  int n_train = 0;
  int n_holdout = 500;
  int n_test = 1000;
  double noise_level = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SparseTask {
  Dataset train;
  Dataset holdout;
  Dataset test;
  Eigen::VectorXd theta;

  // Constraint radius 2 ||theta||_p attached at generation time.
  double radius_l1 = 0.0;
  double radius(double p) const;
};

SparseTask gen_sparse_task(const SparseTaskSpec& spec);

enum class Algorithm { glmtron, pnorm, hypentropy };

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

// Hyperparameter grid; the defaults are the full experiment tables.
struct SweepGrid {
  std::vector<double> lambdas = {1.0, 0.5, 0.1, 0.05, 0.01, 0.005, 0.001};
  std::vector<double> betas = {1.0, 1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<double> ps = {1.1, 1.2, 1.3, 1.4, 1.5};
  std::vector<Algorithm> algorithms = {Algorithm::glmtron, Algorithm::pnorm,
                                       Algorithm::hypentropy};
  int trials = 5;
  int iterations = 5000;
  bool use_projection = true;
  XiMode xi = XiMode::one();

  void validate() const;
};

// One grid cell: an algorithm with its hyperparameters pinned.
struct CellConfig {
  Algorithm algorithm = Algorithm::glmtron;
  double lambda = 0.0;
  double beta = 0.0;  // hypentropy only
  double p = 0.0;     // pnorm only
};

std::vector<CellConfig> enumerate_cells(const SweepGrid& grid);

struct ResultRecord {
  std::string algorithm;
  double lambda = 0.0;
  double beta = 0.0;
  double p = 0.0;
  std::uint64_t seed = 0;
  double train_risk = 0.0;
  double holdout_risk = 0.0;
  double test_risk = 0.0;
  double l1_error = 0.0;
  long support_count = 0;
  double seconds = 0.0;
  bool diverged = false;
};

// Fits one grid cell on one trial's task. Exposed so a single cell can be
// reproduced without rerunning the sweep.
ResultRecord run_sweep_cell(const SparseTaskSpec& spec, const SweepGrid& grid,
                            int cell_index, int trial);

// Full sweep: trials x cells, executed concurrently over cells. Records come
// back sorted by (cell, trial) regardless of execution order.
std::vector<ResultRecord> run_sweep(const SparseTaskSpec& spec,
                                    const SweepGrid& grid);

// Per-algorithm configuration with the lowest median test risk over trials.
struct AlgorithmSummary {
  std::string algorithm;
  double lambda = 0.0;
  double beta = 0.0;
  double p = 0.0;
  double median_test_risk = 0.0;
  double median_l1_error = 0.0;
  double median_support_count = 0.0;
};

std::vector<AlgorithmSummary> summarize_best(
    const std::vector<ResultRecord>& records);

// Low-rank system identification task.
struct LowRankTaskSpec {
  int dimension = 0;
  int rank = 0;
  double decay = 0.9;
  double noise_level = 0.1;
  int horizon = 5;
  int n_train = 0;
  int n_holdout = 50;
  int n_test = 200;
  std::uint64_t seed = 0;

  void validate() const;
};

ResultRecord run_lowrank_cell(const LowRankTaskSpec& spec,
                              const SweepGrid& grid, int cell_index,
                              int trial);

std::vector<ResultRecord> run_lowrank_experiment(const LowRankTaskSpec& spec,
                                                 const SweepGrid& grid);

// Monte-Carlo estimates of E||H||_F and E||H|| for H = (1/n) sum x x^T with
// standard Gaussian samples.
struct GramNormEstimate {
  double mean_frobenius = 0.0;
  double mean_operator = 0.0;
};

GramNormEstimate gram_norm_diagnostic(int n, int d, int trials,
                                      std::uint64_t seed);

// CSV round-trip for result records; doubles are written with enough digits
// to reparse bit-exactly.
void write_records_csv(const std::string& path,
                       const std::vector<ResultRecord>& records);
std::vector<ResultRecord> read_records_csv(const std::string& path);
std::string records_csv_header();

void write_trace_csv(const std::string& path, const TrainTrace& trace);

}  // namespace refl

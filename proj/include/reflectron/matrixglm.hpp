#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "reflectron/reflectron.hpp"

namespace refl {

// Vector-valued GLM dynamics x_{t+1} = rho x_t + sigmoid(Theta x_t) + w_t
// with a low-rank transition matrix.
struct SystemSpec {
  int dimension = 0;
  int rank = 0;
  double decay = 0.9;        // rho
  double noise_level = 0.1;  // sigma_w
  int horizon = 5;           // T
  Eigen::MatrixXd true_matrix;
};

// Rank-r transition matrix A B^T with Gaussian factors, rescaled to unit
// spectral norm so the sigmoid stays unsaturated.
SystemSpec make_system_spec(int dimension, int rank, double decay,
                            double noise_level, int horizon,
                            std::uint64_t seed);

// n trajectories, each a (T+1)-sequence of d-vectors.
struct TrajectorySet {
  std::vector<Eigen::MatrixXd> trajectories;  // each d x (T+1)

  int count() const { return static_cast<int>(trajectories.size()); }
  int horizon() const {
    return trajectories.empty()
               ? 0
               : static_cast<int>(trajectories.front().cols()) - 1;
  }
};

TrajectorySet simulate(const SystemSpec& spec, int n, std::uint64_t seed);

// Current/next state pairs stacked column-wise in trajectory-major order.
struct StackedTrajectories {
  Eigen::MatrixXd states;      // d x nT
  Eigen::MatrixXd next_states; // d x nT
};
StackedTrajectories stack_trajectories(const TrajectorySet& data);

// (1/(nT)) sum (sigmoid(Theta_hat x_t) - x_{t+1} + rho x_t) x_t^T, with the
// xi weight applied elementwise to the residual in derivative mode.
Eigen::MatrixXd matrix_pseudogradient(const Eigen::MatrixXd& theta_hat,
                                      const TrajectorySet& data,
                                      const SystemSpec& spec,
                                      const XiMode& xi);

// (1/(2nT)) sum ||x_{t+1} - rho x_t - sigmoid(Theta_hat x_t)||^2
double matrix_empirical_risk(const Eigen::MatrixXd& theta_hat,
                             const TrajectorySet& data,
                             const SystemSpec& spec);

// Mirror iteration over matrices. The euclidean potential acts entrywise
// (Frobenius geometry); pnorm and hypentropy act on the singular values,
// with singular vectors recomputed from the current primal point each
// iteration. Constraint must be unconstrained or a spectral variant.
MatrixTrainTrace fit_spectral(const ReflectronConfig& config,
                              const TrajectorySet& train,
                              const SystemSpec& spec,
                              const TrajectorySet* holdout = nullptr);

}  // namespace refl

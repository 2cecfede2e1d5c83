#include "reflectron/matrixglm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "reflectron/rng.hpp"
#include "reflectron/svd.hpp"

namespace refl {

namespace {
constexpr double kRiskGuard = 1e6;

const Activation kSigmoid = Activation::sigmoid();

Eigen::MatrixXd sigmoid_elementwise(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd s(z.rows(), z.cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      s(i, j) = activation_apply(kSigmoid, z(i, j));
    }
  }
  return s;
}
}  // namespace

SystemSpec make_system_spec(int dimension, int rank, double decay,
                            double noise_level, int horizon,
                            std::uint64_t seed) {
  if (dimension < 1 || rank < 1 || rank > dimension) {
    throw std::invalid_argument("rank must lie in [1, dimension]");
  }
  if (decay < 0.0 || decay >= 1.0) {
    throw std::invalid_argument("decay must lie in [0, 1)");
  }
  if (noise_level < 0.0) {
    throw std::invalid_argument("noise level must be nonnegative");
  }
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  Rng rng(seed);
  Eigen::MatrixXd a(dimension, rank), b(dimension, rank);
  for (int j = 0; j < rank; ++j) {
    for (int i = 0; i < dimension; ++i) a(i, j) = rng.normal();
  }
  for (int j = 0; j < rank; ++j) {
    for (int i = 0; i < dimension; ++i) b(i, j) = rng.normal();
  }
  Eigen::MatrixXd theta = a * b.transpose();
  double top = thin_svd(theta).singular_values[0];
  theta /= top;
  SystemSpec spec;
  spec.dimension = dimension;
  spec.rank = rank;
  spec.decay = decay;
  spec.noise_level = noise_level;
  spec.horizon = horizon;
  spec.true_matrix = std::move(theta);
  return spec;
}

TrajectorySet simulate(const SystemSpec& spec, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("need at least one trajectory");
  const int d = spec.dimension;
  const int T = spec.horizon;
  Rng rng(seed);
  TrajectorySet out;
  out.trajectories.reserve(n);
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd traj(d, T + 1);
    traj.col(0) = rng.uniform_vector(d, -1.0, 1.0);
    for (int t = 0; t < T; ++t) {
      Eigen::VectorXd drive = spec.true_matrix * traj.col(t);
      for (int k = 0; k < d; ++k) {
        drive[k] = activation_apply(kSigmoid, drive[k]);
      }
      Eigen::VectorXd next = spec.decay * traj.col(t) + drive;
      if (spec.noise_level > 0.0) {
        for (int k = 0; k < d; ++k) {
          next[k] += rng.uniform(-spec.noise_level, spec.noise_level);
        }
      }
      traj.col(t + 1) = next;
    }
    out.trajectories.push_back(std::move(traj));
  }
  return out;
}

StackedTrajectories stack_trajectories(const TrajectorySet& data) {
  if (data.count() == 0) throw std::invalid_argument("no trajectories");
  const int T = data.horizon();
  const int d = static_cast<int>(data.trajectories.front().rows());
  const int m = data.count() * T;
  StackedTrajectories st;
  st.states.resize(d, m);
  st.next_states.resize(d, m);
  int c = 0;
  for (const auto& traj : data.trajectories) {
    if (traj.cols() != T + 1 || traj.rows() != d) {
      throw std::invalid_argument("trajectory lengths are not uniform");
    }
    for (int t = 0; t < T; ++t, ++c) {
      st.states.col(c) = traj.col(t);
      st.next_states.col(c) = traj.col(t + 1);
    }
  }
  return st;
}

namespace {

struct MatrixStep {
  Eigen::MatrixXd gradient;
  double risk = 0.0;
};

MatrixStep matrix_step(const Eigen::MatrixXd& theta_hat,
                       const StackedTrajectories& st, double decay,
                       const XiMode& xi) {
  const double m = static_cast<double>(st.states.cols());
  Eigen::MatrixXd z = theta_hat * st.states;
  Eigen::MatrixXd resid = sigmoid_elementwise(z);
  resid -= st.next_states;
  resid += decay * st.states;
  MatrixStep step;
  step.risk = resid.squaredNorm() / (2.0 * m);
  if (xi.kind == XiMode::Kind::derivative) {
    for (Eigen::Index j = 0; j < resid.cols(); ++j) {
      for (Eigen::Index i = 0; i < resid.rows(); ++i) {
        resid(i, j) *= activation_derivative(kSigmoid, z(i, j));
      }
    }
  }
  step.gradient.noalias() = resid * st.states.transpose();
  step.gradient /= m;
  return step;
}

double stacked_risk(const Eigen::MatrixXd& theta_hat,
                    const StackedTrajectories& st, double decay) {
  const double m = static_cast<double>(st.states.cols());
  Eigen::MatrixXd resid = sigmoid_elementwise(theta_hat * st.states);
  resid -= st.next_states;
  resid += decay * st.states;
  return resid.squaredNorm() / (2.0 * m);
}

}  // namespace

Eigen::MatrixXd matrix_pseudogradient(const Eigen::MatrixXd& theta_hat,
                                      const TrajectorySet& data,
                                      const SystemSpec& spec,
                                      const XiMode& xi) {
  if (theta_hat.rows() != spec.dimension ||
      theta_hat.cols() != spec.dimension) {
    throw std::invalid_argument("parameter matrix dimension mismatch");
  }
  return matrix_step(theta_hat, stack_trajectories(data), spec.decay, xi)
      .gradient;
}

double matrix_empirical_risk(const Eigen::MatrixXd& theta_hat,
                             const TrajectorySet& data,
                             const SystemSpec& spec) {
  if (theta_hat.rows() != spec.dimension ||
      theta_hat.cols() != spec.dimension) {
    throw std::invalid_argument("parameter matrix dimension mismatch");
  }
  return stacked_risk(theta_hat, stack_trajectories(data), spec.decay);
}

MatrixTrainTrace fit_spectral(const ReflectronConfig& config,
                              const TrajectorySet& train,
                              const SystemSpec& spec,
                              const TrajectorySet* holdout) {
  config.validate();
  if (!config.constraint.is_unconstrained() &&
      !config.constraint.is_spectral()) {
    throw std::invalid_argument(
        "matrix fit requires an unconstrained or spectral constraint set");
  }
  const Potential& psi = config.potential;
  if (psi.kind == Potential::Kind::negentropy) {
    throw std::invalid_argument("negentropy has no spectral lift here");
  }
  const int d = spec.dimension;
  const int T = config.iterations;
  const bool rec = config.record_trace;
  const double lambda = config.step_size;
  const bool entrywise = psi.kind == Potential::Kind::euclidean;

  StackedTrajectories st = stack_trajectories(train);
  StackedTrajectories sh;
  if (holdout != nullptr) sh = stack_trajectories(*holdout);

  MatrixTrainTrace trace;
  trace.activation = kSigmoid;

  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(d, d);
  double best = std::numeric_limits<double>::infinity();
  for (int t = 1; t <= T; ++t) {
    MatrixStep step = matrix_step(theta, st, spec.decay, config.xi);
    if (rec) trace.train_risk.push_back(step.risk);
    if (holdout != nullptr) {
      double hold = stacked_risk(theta, sh, spec.decay);
      if (rec) trace.holdout_risk.push_back(hold);
      if (hold < best) {
        best = hold;
        trace.best_iteration = t;
        trace.best_params = theta;
      }
    }
    if (!std::isfinite(step.risk) || step.risk > kRiskGuard ||
        !theta.allFinite()) {
      trace.diverged = true;
      break;
    }
    if (t < T) {
      // A run that blows up mid-update (overflowing dual coordinates, SVD
      // breakdown) is recorded as diverged rather than aborting the sweep.
      try {
        if (entrywise) {
          theta -= lambda * step.gradient;
          if (!theta.allFinite()) {
            trace.diverged = true;
            break;
          }
          if (!config.constraint.is_unconstrained()) {
            theta = project_spectral(config.constraint, theta, psi);
          }
        } else {
          // Mirror map on the singular values; the dual matrix shares the
          // primal's singular vectors, the update re-factorizes.
          ThinSvd cur = thin_svd(theta);
          Eigen::VectorXd dual_s =
              potential_gradient(psi, cur.singular_values);
          Eigen::MatrixXd dual =
              cur.u * dual_s.asDiagonal() * cur.v.transpose();
          dual.noalias() -= lambda * step.gradient;
          if (!dual.allFinite()) {
            trace.diverged = true;
            break;
          }
          ThinSvd upd = thin_svd(dual);
          Eigen::VectorXd w =
              potential_gradient_inverse(psi, upd.singular_values);
          if (!w.allFinite()) {
            trace.diverged = true;
            break;
          }
          if (!config.constraint.is_unconstrained()) {
            double norm =
                config.constraint.kind == ConstraintSet::Kind::spectral_l1
                    ? w.lpNorm<1>()
                    : lp_norm(w, config.constraint.exponent);
            if (norm > config.constraint.radius) {
              w = project_spectrum(config.constraint, w, psi);
            }
          }
          theta = upd.u * w.asDiagonal() * upd.v.transpose();
        }
      } catch (const std::runtime_error&) {
        trace.diverged = true;
        break;
      }
      if (!theta.allFinite()) {
        trace.diverged = true;
        break;
      }
    }
  }
  trace.final_params = theta;
  return trace;
}

}  // namespace refl

#include "reflectron/reflectron.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "reflectron/kernels.hpp"
#include "reflectron/rng.hpp"

namespace refl {

namespace {
constexpr double kRiskGuard = 1e6;

double resolve_sigma(const ReflectronConfig& config) {
  if (config.sigma_override.has_value()) return *config.sigma_override;
  if (config.potential.strong_convexity.has_value()) {
    return *config.potential.strong_convexity;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

void ReflectronConfig::validate() const {
  if (!(step_size > 0.0)) {
    throw std::invalid_argument("step size must be positive");
  }
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (holdout_fraction < 0.0 || holdout_fraction >= 1.0) {
    throw std::invalid_argument("holdout fraction must lie in [0, 1)");
  }
}

Eigen::VectorXd initialize(const ReflectronConfig& config, int dim) {
  switch (config.potential.kind) {
    case Potential::Kind::euclidean:
    case Potential::Kind::pnorm:
    case Potential::Kind::hypentropy: {
      // The origin minimizes all three and lies inside every norm ball.
      Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
      if (!config.constraint.is_unconstrained() &&
          !config.constraint.is_spectral()) {
        if (config.constraint.kind == ConstraintSet::Kind::simplex) {
          throw std::invalid_argument(
              "simplex constraint requires the negentropy potential");
        }
      }
      return w;
    }
    case Potential::Kind::negentropy:
      if (config.potential.reference.size() != dim) {
        throw std::invalid_argument(
            "negentropy reference dimension mismatch");
      }
      return config.potential.reference;
  }
  throw std::logic_error("unreachable");
}

namespace {

struct FitState {
  Eigen::VectorXd theta;
  Eigen::VectorXd dual;
};

// Dual step, primal recovery, projection, dual re-derivation.
void mirror_update(const ReflectronConfig& config,
                   const Eigen::VectorXd& direction, double scale,
                   FitState& st) {
  st.dual.noalias() -= scale * direction;
  Eigen::VectorXd phi = potential_gradient_inverse(config.potential, st.dual);
  if (config.constraint.is_unconstrained()) {
    st.theta = std::move(phi);
  } else {
    st.theta = project(config.constraint, phi, config.potential);
    st.dual = potential_gradient(config.potential, st.theta);
  }
}

bool state_is_finite(const FitState& st) {
  return st.theta.allFinite() && st.dual.allFinite();
}

void record(std::vector<double>& v, bool enabled, double x) {
  if (enabled) v.push_back(x);
}

}  // namespace

TrainTrace fit_full_batch(const ReflectronConfig& config, const Dataset& train,
                          const Dataset* holdout) {
  config.validate();
  if (train.size() == 0) throw std::invalid_argument("dataset is empty");
  const int dim = static_cast<int>(train.dim());
  const int T = config.iterations;
  const bool rec = config.record_trace;

  TrainTrace trace;
  trace.activation = config.activation;
  if (rec) {
    trace.train_risk.reserve(T);
    if (holdout) trace.holdout_risk.reserve(T);
  }

  FitState st;
  st.theta = initialize(config, dim);
  st.dual = potential_gradient(config.potential, st.theta);

  double best = std::numeric_limits<double>::infinity();
  for (int t = 1; t <= T; ++t) {
    auto step = kernels::pseudogradient_with_risk(train, st.theta,
                                                  config.activation,
                                                  config.xi);
    record(trace.train_risk, rec, step.risk);
    if (holdout) {
      double hold = kernels::mean_squared_residual(
          holdout->features, holdout->labels, st.theta, config.activation);
      record(trace.holdout_risk, rec, hold);
      if (hold < best) {
        best = hold;
        trace.best_iteration = t;
        trace.best_params = st.theta;
      }
    }
    if (rec && config.record_excess && train.clean_labels.has_value()) {
      trace.excess.push_back(kernels::mean_squared_residual(
          train.features, *train.clean_labels, st.theta, config.activation));
    }
    if (rec && config.reference_params.has_value()) {
      trace.divergence_to_reference.push_back(bregman_divergence(
          config.potential, *config.reference_params, st.theta));
    }
    if (!std::isfinite(step.risk) || step.risk > kRiskGuard ||
        !st.theta.allFinite()) {
      trace.diverged = true;
      break;
    }
    if (t < T) {
      mirror_update(config, step.gradient, config.step_size, st);
      if (!state_is_finite(st)) {
        trace.diverged = true;
        break;
      }
    }
  }
  trace.final_params = st.theta;
  return trace;
}

namespace {

Dataset take_rows(const Dataset& data, const std::vector<int>& idx, int lo,
                  int hi) {
  Dataset out;
  out.features.resize(hi - lo, data.dim());
  out.labels.resize(hi - lo);
  if (data.clean_labels.has_value()) {
    out.clean_labels.emplace(hi - lo);
  }
  for (int r = lo; r < hi; ++r) {
    out.features.row(r - lo) = data.features.row(idx[r]);
    out.labels[r - lo] = data.labels[idx[r]];
    if (data.clean_labels.has_value()) {
      (*out.clean_labels)[r - lo] = (*data.clean_labels)[idx[r]];
    }
  }
  out.feature_dual_norm_bound = data.feature_dual_norm_bound;
  out.dual_norm_tag = data.dual_norm_tag;
  return out;
}

}  // namespace

TrainTrace fit_full_batch(const ReflectronConfig& config,
                          const Dataset& data) {
  if (config.holdout_fraction == 0.0) {
    return fit_full_batch(config, data, nullptr);
  }
  const int n = static_cast<int>(data.size());
  int n_hold = static_cast<int>(std::floor(config.holdout_fraction * n));
  if (n_hold < 1 || n_hold >= n) {
    throw std::invalid_argument("holdout fraction leaves an empty split");
  }
  Rng rng(derive_seed(config.seed, 0, 1));
  std::vector<int> idx = rng.permutation(n);
  Dataset train = take_rows(data, idx, 0, n - n_hold);
  Dataset hold = take_rows(data, idx, n - n_hold, n);
  return fit_full_batch(config, train, &hold);
}

class SyntheticGlmStream::Impl {
 public:
  explicit Impl(std::uint64_t seed) : rng(seed) {}
  Rng rng;
};

SyntheticGlmStream::SyntheticGlmStream(Eigen::VectorXd theta,
                                       Activation activation,
                                       double noise_level, std::uint64_t seed)
    : theta_(std::move(theta)),
      activation_(activation),
      noise_level_(noise_level),
      impl_(std::make_shared<Impl>(seed)) {}

bool SyntheticGlmStream::next(StreamSample& out) {
  const int d = static_cast<int>(theta_.size());
  out.x = impl_->rng.uniform_vector(d, -1.0, 1.0);
  double clean = activation_apply(activation_, theta_.dot(out.x));
  out.clean_y = clean;
  out.y = noise_level_ > 0.0
              ? clean + impl_->rng.uniform(-noise_level_, noise_level_)
              : clean;
  return true;
}

bool DatasetStream::next(StreamSample& out) {
  if (pos_ >= data_->size()) return false;
  out.x = data_->row(pos_);
  out.y = data_->labels[pos_];
  if (data_->clean_labels.has_value()) {
    out.clean_y = (*data_->clean_labels)[pos_];
  } else {
    out.clean_y.reset();
  }
  ++pos_;
  return true;
}

TrainTrace fit_stochastic(const ReflectronConfig& config, SampleStream& stream,
                          const Dataset* eval_data) {
  config.validate();
  if (eval_data != nullptr && !eval_data->clean_labels.has_value()) {
    throw std::invalid_argument("evaluation dataset carries no clean labels");
  }
  const int T = config.iterations;
  const bool rec = config.record_trace;

  TrainTrace trace;
  trace.activation = config.activation;

  FitState st;
  StreamSample sample;
  if (!stream.next(sample)) {
    trace.truncated = true;
    return trace;
  }
  const int dim = static_cast<int>(sample.x.size());
  st.theta = initialize(config, dim);
  st.dual = potential_gradient(config.potential, st.theta);

  for (int t = 1; t <= T; ++t) {
    if (t > 1 && !stream.next(sample)) {
      trace.truncated = true;
      break;
    }
    double z = st.theta.dot(sample.x);
    double resid = activation_apply(config.activation, z) - sample.y;
    record(trace.train_risk, rec, resid * resid);
    if (rec) {
      if (eval_data != nullptr) {
        trace.excess.push_back(kernels::mean_squared_residual(
            eval_data->features, *eval_data->clean_labels, st.theta,
            config.activation));
      } else if (sample.clean_y.has_value()) {
        double gap = activation_apply(config.activation, z) - *sample.clean_y;
        trace.excess.push_back(gap * gap);
      }
      if (config.reference_params.has_value()) {
        trace.divergence_to_reference.push_back(bregman_divergence(
            config.potential, *config.reference_params, st.theta));
      }
    }
    if (!std::isfinite(resid) || resid * resid > kRiskGuard) {
      trace.diverged = true;
      break;
    }
    if (t < T) {
      double coeff = resid * config.xi.weight(config.activation, z);
      mirror_update(config, sample.x, config.step_size * coeff, st);
      if (!state_is_finite(st)) {
        trace.diverged = true;
        break;
      }
    }
  }
  trace.final_params = st.theta;
  return trace;
}

StepBoundInputs make_step_inputs(const Potential& psi, double feature_bound,
                                 const Activation& u, const XiMode& xi,
                                 std::optional<double> sigma_override,
                                 std::optional<long> horizon) {
  StepBoundInputs in;
  in.sigma = sigma_override.has_value() ? sigma_override
                                        : psi.strong_convexity;
  in.feature_bound = feature_bound;
  in.xi_bound = xi.bound(u);
  in.lipschitz = u.lipschitz;
  in.horizon = horizon;
  return in;
}

double max_stable_step(const StepBoundInputs& inputs, StepRule rule) {
  if (!inputs.sigma.has_value()) {
    throw std::invalid_argument(
        "no strong convexity constant available; supply an override");
  }
  const double sigma = *inputs.sigma;
  const double c = inputs.feature_bound;
  const double b = inputs.xi_bound;
  const double l = inputs.lipschitz;
  if (!(sigma > 0.0) || !(c > 0.0) || !(b > 0.0) || !(l > 0.0)) {
    throw std::invalid_argument("step bound inputs must be positive");
  }
  switch (rule) {
    case StepRule::full_batch:
      return sigma / (2.0 * c * c * b * l);
    case StepRule::full_batch_realizable:
      return 2.0 * sigma / (c * c * b * l);
    case StepRule::stochastic_bounded_noise: {
      if (!inputs.horizon.has_value() || *inputs.horizon < 1) {
        throw std::invalid_argument("stochastic rule requires a horizon");
      }
      double base = 2.0 * sigma / (c * c * l * b);
      double hz = 1.0 / std::sqrt(static_cast<double>(*inputs.horizon));
      return std::min(base, hz);
    }
  }
  throw std::logic_error("unreachable");
}

Hypothesis select_best_by_holdout(const TrainTrace& trace) {
  if (trace.best_iteration == 0) {
    throw std::invalid_argument("no holdout risk recorded");
  }
  return Hypothesis{trace.best_params, trace.activation};
}

}  // namespace refl

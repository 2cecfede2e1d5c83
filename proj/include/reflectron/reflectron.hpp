#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "reflectron/geometry.hpp"
#include "reflectron/model.hpp"
#include "reflectron/projection.hpp"

namespace refl {

struct ReflectronConfig {
  Potential potential = Potential::euclidean();
  ConstraintSet constraint = ConstraintSet::unconstrained();
  XiMode xi = XiMode::one();
  Activation activation = Activation::sigmoid();
  double step_size = 1.0;
  int iterations = 1;
  double holdout_fraction = 0.0;  // used by the single-dataset overload
  std::uint64_t seed = 0;
  bool record_trace = true;
  // Excess-risk recording costs an extra pass per iteration; opt in.
  bool record_excess = false;
  // When set, D_psi(reference, iterate) is recorded each iteration.
  std::optional<Eigen::VectorXd> reference_params;
  // Strong convexity override for potentials without a known constant.
  std::optional<double> sigma_override;

  void validate() const;
};

// Per-iteration record of a fit. Entry t (1-based) describes the t-th
// iterate; the first entry is the initialization. A fit with iterations = T
// records T iterates and applies T-1 updates, so final_params is the last
// recorded iterate.
template <typename ParamT>
struct TrainTraceT {
  std::vector<double> train_risk;
  std::vector<double> holdout_risk;
  std::vector<double> excess;
  std::vector<double> divergence_to_reference;
  int best_iteration = 0;  // 1-based argmin of holdout risk; 0 if no holdout
  ParamT best_params;
  ParamT final_params;
  Activation activation;
  bool diverged = false;
  bool truncated = false;
};

using TrainTrace = TrainTraceT<Eigen::VectorXd>;
using MatrixTrainTrace = TrainTraceT<Eigen::MatrixXd>;

// Minimizer of the potential over the constraint set: the origin for the
// norm-ball geometries, the reference distribution for negentropy.
Eigen::VectorXd initialize(const ReflectronConfig& config, int dim);

// Full-batch mirror iteration: dual step with the pseudogradient, primal
// recovery through the inverse gradient, Bregman projection. The dual point
// is carried across iterations and re-derived from the primal after any
// projection.
TrainTrace fit_full_batch(const ReflectronConfig& config, const Dataset& train,
                          const Dataset* holdout);

// Splits off the trailing holdout_fraction of a seeded shuffle, then runs
// the overload above.
TrainTrace fit_full_batch(const ReflectronConfig& config, const Dataset& data);

// One supervised sample at a time.
struct StreamSample {
  Eigen::VectorXd x;
  double y = 0.0;
  std::optional<double> clean_y;
};

class SampleStream {
 public:
  virtual ~SampleStream() = default;
  virtual bool next(StreamSample& out) = 0;
};

// Infinite stream of x ~ Unif[-1,1]^d with y = u(<theta,x>) + Unif[-w,w].
class SyntheticGlmStream : public SampleStream {
 public:
  SyntheticGlmStream(Eigen::VectorXd theta, Activation activation,
                     double noise_level, std::uint64_t seed);
  bool next(StreamSample& out) override;

 private:
  Eigen::VectorXd theta_;
  Activation activation_;
  double noise_level_;
  class Impl;
  std::shared_ptr<Impl> impl_;
};

// Finite pass over dataset rows; exhausting it truncates the fit.
class DatasetStream : public SampleStream {
 public:
  explicit DatasetStream(const Dataset& data) : data_(&data) {}
  bool next(StreamSample& out) override;

 private:
  const Dataset* data_;
  Eigen::Index pos_ = 0;
};

// Single-sample mirror iteration. When eval_data is given (with clean
// labels), the excess channel records the empirical excess on it at every
// step; otherwise per-sample excess is recorded when the stream is clean.
TrainTrace fit_stochastic(const ReflectronConfig& config, SampleStream& stream,
                          const Dataset* eval_data = nullptr);

// Inputs for the closed-form step-size rules.
struct StepBoundInputs {
  std::optional<double> sigma;  // from the potential or an override
  double feature_bound = 0.0;   // C
  double xi_bound = 1.0;        // B
  double lipschitz = 1.0;       // L
  std::optional<long> horizon;  // T, stochastic rule only
};

StepBoundInputs make_step_inputs(const Potential& psi, double feature_bound,
                                 const Activation& u, const XiMode& xi,
                                 std::optional<double> sigma_override = {},
                                 std::optional<long> horizon = {});

enum class StepRule {
  full_batch,              // sigma / (2 C^2 B L)
  full_batch_realizable,   // 2 sigma / (C^2 B L)
  stochastic_bounded_noise // min{2 sigma / (C^2 L B), 1/sqrt(T)}
};

double max_stable_step(const StepBoundInputs& inputs, StepRule rule);

// Hypothesis at the argmin of the recorded holdout risk (earliest tie).
Hypothesis select_best_by_holdout(const TrainTrace& trace);

}  // namespace refl

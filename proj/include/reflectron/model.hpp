#pragma once

#include <optional>
#include <string>

#include <Eigen/Core>

#include "reflectron/geometry.hpp"

namespace refl {

// Known, nondecreasing, Lipschitz link function.
struct Activation {
  enum class Kind { sigmoid, identity };

  Kind kind = Kind::sigmoid;
  double lipschitz = 0.25;
  bool invertible = true;

  static Activation sigmoid() { return {Kind::sigmoid, 0.25, true}; }
  // Identity is admitted for interpolation tests even though its range is
  // not [0, 1]; only the statistical bounds depend on that range.
  static Activation identity() { return {Kind::identity, 1.0, true}; }
};

double activation_apply(const Activation& u, double z);
double activation_derivative(const Activation& u, double z);
// Inverse on the interior of the range; sigmoid inputs are clamped to
// [1e-12, 1 - 1e-12] and exact endpoints rejected. Diagnostic use only.
double activation_inverse(const Activation& u, double y);

// Smallest value of the activation derivative over |<w,x>| <= a*b, used when
// evaluating bounds that need a positive lower bound on the derivative.
double activation_min_derivative(const Activation& u, double a, double b);

// Pseudogradient weight: 1 recovers the plain pseudogradient iteration,
// the derivative recovers mirror descent.
struct XiMode {
  enum class Kind { one, derivative };
  Kind kind = Kind::one;

  static XiMode one() { return {Kind::one}; }
  static XiMode derivative() { return {Kind::derivative}; }

  double bound(const Activation& u) const {
    return kind == Kind::one ? 1.0 : u.lipschitz;
  }
  double weight(const Activation& u, double z) const {
    return kind == Kind::one ? 1.0 : activation_derivative(u, z);
  }
};

// Supervised samples. Features are stored in single precision (they are
// synthetic draws; all accumulation happens in double).
struct Dataset {
  Eigen::MatrixXf features;  // n x d, column-major
  Eigen::VectorXd labels;
  std::optional<Eigen::VectorXd> clean_labels;
  double feature_dual_norm_bound = 0.0;
  std::string dual_norm_tag = "linf";

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
  Eigen::VectorXd row(Eigen::Index i) const {
    return features.row(i).cast<double>();
  }
};

struct Hypothesis {
  Eigen::VectorXd params;
  Activation activation;

  double predict(const Eigen::VectorXd& x) const {
    return activation_apply(activation, params.dot(x));
  }
};

// Largest dual norm of a feature row under the potential's declared pair.
double feature_dual_norm_bound(const Dataset& data, const Potential& psi);

// Mean squared residual against the observed labels.
double empirical_err(const Hypothesis& h, const Dataset& data);

// Mean squared gap to the noiseless labels; requires clean_labels.
double empirical_excess(const Hypothesis& h, const Dataset& data);

// (1/n) sum_i (u(<theta,x_i>) - y_i) xi(theta, x_i) x_i
Eigen::VectorXd pseudogradient(const Eigen::VectorXd& theta_hat,
                               const Dataset& data, const Activation& u,
                               const XiMode& xi);

}  // namespace refl

#include "reflectron/model.hpp"

#include <cmath>
#include <stdexcept>

#include "reflectron/kernels.hpp"

namespace refl {

double activation_apply(const Activation& u, double z) {
  switch (u.kind) {
    case Activation::Kind::identity:
      return z;
    case Activation::Kind::sigmoid:
      if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
      } else {
        double e = std::exp(z);
        return e / (1.0 + e);
      }
  }
  throw std::logic_error("unreachable");
}

double activation_derivative(const Activation& u, double z) {
  switch (u.kind) {
    case Activation::Kind::identity:
      return 1.0;
    case Activation::Kind::sigmoid: {
      double s = activation_apply(u, z);
      return s * (1.0 - s);
    }
  }
  throw std::logic_error("unreachable");
}

double activation_inverse(const Activation& u, double y) {
  switch (u.kind) {
    case Activation::Kind::identity:
      return y;
    case Activation::Kind::sigmoid: {
      if (!(y > 0.0) || !(y < 1.0)) {
        throw std::domain_error("sigmoid inverse requires y in (0, 1)");
      }
      double c = std::min(std::max(y, 1e-12), 1.0 - 1e-12);
      return std::log(c / (1.0 - c));
    }
  }
  throw std::logic_error("unreachable");
}

double activation_min_derivative(const Activation& u, double a, double b) {
  switch (u.kind) {
    case Activation::Kind::identity:
      return 1.0;
    case Activation::Kind::sigmoid:
      // The derivative is even and decreasing in |z|, so the infimum over
      // |z| <= a*b sits at the boundary.
      return activation_derivative(u, a * b);
  }
  throw std::logic_error("unreachable");
}

double feature_dual_norm_bound(const Dataset& data, const Potential& psi) {
  double bound = 0.0;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    bound = std::max(bound, dual_norm(psi, data.row(i)));
  }
  return bound;
}

double empirical_err(const Hypothesis& h, const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("dataset is empty");
  return kernels::mean_squared_residual(data.features, data.labels, h.params,
                                        h.activation);
}

double empirical_excess(const Hypothesis& h, const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("dataset is empty");
  if (!data.clean_labels.has_value()) {
    throw std::invalid_argument("dataset carries no clean labels");
  }
  return kernels::mean_squared_residual(data.features, *data.clean_labels,
                                        h.params, h.activation);
}

Eigen::VectorXd pseudogradient(const Eigen::VectorXd& theta_hat,
                               const Dataset& data, const Activation& u,
                               const XiMode& xi) {
  return kernels::pseudogradient_with_risk(data, theta_hat, u, xi).gradient;
}

}  // namespace refl

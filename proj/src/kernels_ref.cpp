#include "reflectron/kernels.hpp"

#include <stdexcept>

namespace refl {
namespace serial_ref {

void predict_linear(const Eigen::MatrixXf& features, const Eigen::VectorXd& v,
                    Eigen::VectorXd& out) {
  const int n = static_cast<int>(features.rows());
  const int d = static_cast<int>(features.cols());
  if (v.size() != d) throw std::invalid_argument("dimension mismatch");
  out.resize(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) {
      s += v[j] * static_cast<double>(features(i, j));
    }
    out[i] = s;
  }
}

kernels::BatchStep pseudogradient_with_risk(const Dataset& data,
                                            const Eigen::VectorXd& theta,
                                            const Activation& u,
                                            const XiMode& xi) {
  const int n = static_cast<int>(data.size());
  const int d = static_cast<int>(data.dim());
  if (n == 0) throw std::invalid_argument("dataset is empty");
  if (theta.size() != d) throw std::invalid_argument("dimension mismatch");

  Eigen::VectorXd z;
  predict_linear(data.features, theta, z);

  Eigen::VectorXd weighted(n);
  double risk = 0.0;
  for (int i = 0; i < n; ++i) {
    double resid = activation_apply(u, z[i]) - data.labels[i];
    risk += resid * resid;
    weighted[i] = resid * xi.weight(u, z[i]);
  }

  kernels::BatchStep step;
  step.gradient.resize(d);
  for (int j = 0; j < d; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      s += weighted[i] * static_cast<double>(data.features(i, j));
    }
    step.gradient[j] = s / n;
  }
  step.risk = risk / n;
  return step;
}

double mean_squared_residual(const Eigen::MatrixXf& features,
                             const Eigen::VectorXd& labels,
                             const Eigen::VectorXd& theta,
                             const Activation& u) {
  const int n = static_cast<int>(features.rows());
  Eigen::VectorXd z;
  predict_linear(features, theta, z);
  double risk = 0.0;
  for (int i = 0; i < n; ++i) {
    double resid = activation_apply(u, z[i]) - labels[i];
    risk += resid * resid;
  }
  return risk / n;
}

}  // namespace serial_ref
}  // namespace refl

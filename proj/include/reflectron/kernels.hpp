#pragma once

#include <Eigen/Core>

#include "reflectron/model.hpp"

namespace refl {

// OpenMP kernels for the batch iteration. Summation order is pinned: every
// output coefficient accumulates its terms in ascending index order, so the
// result is independent of the thread count and matches the serial reference
// in kernels_ref.cpp bit for bit.
namespace kernels {

// out[i] = sum_j X(i,j) * v[j], accumulated in ascending j.
void predict_linear(const Eigen::MatrixXf& features,
                    const Eigen::VectorXd& v, Eigen::VectorXd& out);

// Single fused pass: margins z = X theta, residuals r_i = u(z_i) - y_i,
// gradient g = (1/n) X^T (r .* xi), risk = (1/n) sum r_i^2. The gradient
// accumulates block-by-block over rows while each block is cache-hot.
struct BatchStep {
  Eigen::VectorXd gradient;
  double risk = 0.0;
};
BatchStep pseudogradient_with_risk(const Dataset& data,
                                   const Eigen::VectorXd& theta,
                                   const Activation& u, const XiMode& xi);

// Mean squared residual of u(X theta) against labels.
double mean_squared_residual(const Eigen::MatrixXf& features,
                             const Eigen::VectorXd& labels,
                             const Eigen::VectorXd& theta,
                             const Activation& u);

}  // namespace kernels

// Serial reference implementations: textbook loops, no OpenMP, kept for
// bitwise comparison tests and the kernel benchmark.
namespace serial_ref {

void predict_linear(const Eigen::MatrixXf& features,
                    const Eigen::VectorXd& v, Eigen::VectorXd& out);

kernels::BatchStep pseudogradient_with_risk(const Dataset& data,
                                            const Eigen::VectorXd& theta,
                                            const Activation& u,
                                            const XiMode& xi);

double mean_squared_residual(const Eigen::MatrixXf& features,
                             const Eigen::VectorXd& labels,
                             const Eigen::VectorXd& theta,
                             const Activation& u);

}  // namespace serial_ref

}  // namespace refl

#pragma once

#include <Eigen/Core>

namespace refl {

// Thin SVD of a square matrix, M = U diag(s) V^T with s sorted descending.
struct ThinSvd {
  Eigen::MatrixXd u;
  Eigen::VectorXd singular_values;
  Eigen::MatrixXd v;
};

// Divide-and-conquer SVD through LAPACK. Throws on non-convergence.
ThinSvd thin_svd(const Eigen::MatrixXd& m);

}  // namespace refl

#include "reflectron/svd.hpp"

#include <stdexcept>
#include <string>

#include <lapacke.h>

namespace refl {

ThinSvd thin_svd(const Eigen::MatrixXd& m) {
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  const int k = std::min(rows, cols);
  Eigen::MatrixXd a = m;  // the LAPACK drivers destroy their input
  ThinSvd out;
  out.u.resize(rows, k);
  out.singular_values.resize(k);
  Eigen::MatrixXd vt(k, cols);
  lapack_int info = LAPACKE_dgesdd(
      LAPACK_COL_MAJOR, 'S', rows, cols, a.data(), rows,
      out.singular_values.data(), out.u.data(), rows, vt.data(), k);
  if (info != 0) {
    // The divide-and-conquer driver occasionally stalls on matrices with
    // extreme spectra; the QR-based driver handles those.
    a = m;
    Eigen::VectorXd superb(std::max(1, k - 1));
    info = LAPACKE_dgesvd(LAPACK_COL_MAJOR, 'S', 'S', rows, cols, a.data(),
                          rows, out.singular_values.data(), out.u.data(), rows,
                          vt.data(), k, superb.data());
  }
  if (info != 0) {
    throw std::runtime_error("SVD failed to converge (info=" +
                             std::to_string(info) + ")");
  }
  out.v = vt.transpose();
  return out;
}

}  // namespace refl

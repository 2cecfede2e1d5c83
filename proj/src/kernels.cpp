#include "reflectron/kernels.hpp"

#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace refl {
namespace kernels {

namespace {
// Row-block size: one block of a d=2000 task is ~4 MB of floats, small
// enough that the gradient pass re-reads it from cache.
constexpr int kRowBlock = 512;

inline void thread_slice(int lo, int hi, int* out_lo, int* out_hi) {
#ifdef _OPENMP
  int nt = omp_get_num_threads();
  int tid = omp_get_thread_num();
#else
  int nt = 1, tid = 0;
#endif
  long len = hi - lo;
  *out_lo = lo + static_cast<int>(len * tid / nt);
  *out_hi = lo + static_cast<int>(len * (tid + 1) / nt);
}
}  // namespace

void predict_linear(const Eigen::MatrixXf& features, const Eigen::VectorXd& v,
                    Eigen::VectorXd& out) {
  const int n = static_cast<int>(features.rows());
  const int d = static_cast<int>(features.cols());
  if (v.size() != d) throw std::invalid_argument("dimension mismatch");
  out.resize(n);
  const float* x = features.data();
#pragma omp parallel
  {
    int i0, i1;
    thread_slice(0, n, &i0, &i1);
    for (int i = i0; i < i1; ++i) out[i] = 0.0;
    for (int j = 0; j < d; ++j) {
      const float* col = x + static_cast<std::size_t>(j) * n;
      const double vj = v[j];
      double* z = out.data();
      for (int i = i0; i < i1; ++i) z[i] += vj * static_cast<double>(col[i]);
    }
  }
}

BatchStep pseudogradient_with_risk(const Dataset& data,
                                   const Eigen::VectorXd& theta,
                                   const Activation& u, const XiMode& xi) {
  const int n = static_cast<int>(data.size());
  const int d = static_cast<int>(data.dim());
  if (n == 0) throw std::invalid_argument("dataset is empty");
  if (theta.size() != d) throw std::invalid_argument("dimension mismatch");

  BatchStep step;
  step.gradient.setZero(d);
  Eigen::VectorXd z(n), weighted(n), sq(n);
  const float* x = data.features.data();
  const double* y = data.labels.data();
  double* g = step.gradient.data();

#pragma omp parallel
  {
    for (int b0 = 0; b0 < n; b0 += kRowBlock) {
      const int b1 = std::min(b0 + kRowBlock, n);
      int i0, i1;
      thread_slice(b0, b1, &i0, &i1);
      // margins on this thread's rows of the block
      for (int i = i0; i < i1; ++i) z[i] = 0.0;
      for (int j = 0; j < d; ++j) {
        const float* col = x + static_cast<std::size_t>(j) * n;
        const double tj = theta[j];
        for (int i = i0; i < i1; ++i) z[i] += tj * static_cast<double>(col[i]);
      }
      // residuals, xi weights
      for (int i = i0; i < i1; ++i) {
        double resid = activation_apply(u, z[i]) - y[i];
        sq[i] = resid * resid;
        weighted[i] = resid * xi.weight(u, z[i]);
      }
#pragma omp barrier
      // gradient columns; g[j] keeps accumulating across blocks so each
      // coefficient sums its terms in plain ascending row order
#pragma omp for
      for (int j = 0; j < d; ++j) {
        const float* col = x + static_cast<std::size_t>(j) * n;
        double s = g[j];
        for (int i = b0; i < b1; ++i) {
          s += weighted[i] * static_cast<double>(col[i]);
        }
        g[j] = s;
      }
    }
#pragma omp for
    for (int j = 0; j < d; ++j) g[j] = g[j] / n;
  }

  double risk = 0.0;
  for (int i = 0; i < n; ++i) risk += sq[i];
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
  Eigen::VectorXd sq(n);
#pragma omp parallel for
  for (int i = 0; i < n; ++i) {
    double resid = activation_apply(u, z[i]) - labels[i];
    sq[i] = resid * resid;
  }
  double risk = 0.0;
  for (int i = 0; i < n; ++i) risk += sq[i];
  return risk / n;
}

}  // namespace kernels
}  // namespace refl

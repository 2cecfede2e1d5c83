#include <doctest.h>

#include <omp.h>

#include "reflectron/kernels.hpp"
#include "reflectron/rng.hpp"
#include "test_support.hpp"

using namespace refl;
using testing::synthetic_dataset;

namespace {
struct ThreadGuard {
  int saved;
  explicit ThreadGuard(int n) : saved(omp_get_max_threads()) {
    omp_set_num_threads(n);
  }
  ~ThreadGuard() { omp_set_num_threads(saved); }
};
}  // namespace

TEST_CASE("parallel kernels match the serial reference bitwise") {
  Rng rng(41);
  auto sig = Activation::sigmoid();
  auto id = Activation::identity();
  for (int threads : {1, 2, 4}) {
    ThreadGuard guard(threads);
    for (auto [n, d] : std::vector<std::pair<int, int>>{
             {1, 1}, {7, 5}, {130, 16}, {513, 33}, {1200, 64}}) {
      Eigen::VectorXd theta = rng.uniform_vector(d, -1.0, 1.0);
      Dataset data = synthetic_dataset(n, d, theta, sig, 0.1, rng);
      Eigen::VectorXd at = rng.uniform_vector(d, -1.0, 1.0);

      for (auto xi : {XiMode::one(), XiMode::derivative()}) {
        for (auto u : {sig, id}) {
          auto par = kernels::pseudogradient_with_risk(data, at, u, xi);
          auto ser = serial_ref::pseudogradient_with_risk(data, at, u, xi);
          CHECK(par.risk == ser.risk);
          for (int j = 0; j < d; ++j) {
            CHECK(par.gradient[j] == ser.gradient[j]);
          }
        }
      }

      Eigen::VectorXd zp, zs;
      kernels::predict_linear(data.features, at, zp);
      serial_ref::predict_linear(data.features, at, zs);
      for (int i = 0; i < n; ++i) CHECK(zp[i] == zs[i]);

      double rp = kernels::mean_squared_residual(data.features, data.labels,
                                                 at, sig);
      double rs = serial_ref::mean_squared_residual(data.features, data.labels,
                                                    at, sig);
      CHECK(rp == rs);
    }
  }
}

TEST_CASE("kernel output does not depend on the thread count") {
  Rng rng(42);
  auto sig = Activation::sigmoid();
  Eigen::VectorXd theta = rng.uniform_vector(24, -1.0, 1.0);
  Dataset data = synthetic_dataset(700, 24, theta, sig, 0.1, rng);
  Eigen::VectorXd at = rng.uniform_vector(24, -1.0, 1.0);

  Eigen::VectorXd g1, g2;
  double risk1, risk2;
  {
    ThreadGuard guard(1);
    auto step = kernels::pseudogradient_with_risk(data, at, sig,
                                                  XiMode::one());
    g1 = step.gradient;
    risk1 = step.risk;
  }
  {
    ThreadGuard guard(4);
    auto step = kernels::pseudogradient_with_risk(data, at, sig,
                                                  XiMode::one());
    g2 = step.gradient;
    risk2 = step.risk;
  }
  CHECK(risk1 == risk2);
  for (int j = 0; j < 24; ++j) CHECK(g1[j] == g2[j]);
}

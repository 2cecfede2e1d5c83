// Compares the OpenMP batch kernels against the serial reference at a few
// task shapes and checks they agree bit for bit while timing both.
#include <chrono>
#include <cstdio>
#include <cstring>

#include <omp.h>

#include "reflectron/kernels.hpp"
#include "reflectron/rng.hpp"

using namespace refl;
using clock_type = std::chrono::high_resolution_clock;

namespace {

Dataset make_data(int n, int d, Rng& rng) {
  Eigen::VectorXd theta = rng.uniform_vector(d, -1.0, 1.0);
  Dataset data;
  data.features.resize(n, d);
  data.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = 0.0;
    for (int j = 0; j < d; ++j) {
      float x = static_cast<float>(rng.uniform(-1.0, 1.0));
      data.features(i, j) = x;
      z += theta[j] * x;
    }
    data.labels[i] = activation_apply(Activation::sigmoid(), z) +
                     rng.uniform(-0.1, 0.1);
  }
  return data;
}

template <typename F>
double time_ms(F&& f, int reps) {
  auto t0 = clock_type::now();
  for (int r = 0; r < reps; ++r) f();
  auto t1 = clock_type::now();
  return std::chrono::duration<double>(t1 - t0).count() / reps * 1e3;
}

}  // namespace

int main(int argc, char** argv) {
  int reps = argc > 1 ? std::atoi(argv[1]) : 20;
  Rng rng(7);
  auto sig = Activation::sigmoid();
  auto xi = XiMode::one();

  std::printf("threads=%d reps=%d\n", omp_get_max_threads(), reps);
  std::printf("%8s %6s | %10s %10s %8s | %s\n", "n", "d", "serial ms",
              "omp ms", "speedup", "bitwise");

  for (auto [n, d] : {std::pair<int, int>{500, 500},
                      {2000, 500},
                      {500, 2000},
                      {2000, 2000}}) {
    Dataset data = make_data(n, d, rng);
    Eigen::VectorXd at = rng.uniform_vector(d, -0.5, 0.5);

    kernels::BatchStep par, ser;
    double t_par = time_ms(
        [&] { par = kernels::pseudogradient_with_risk(data, at, sig, xi); },
        reps);
    double t_ser = time_ms(
        [&] { ser = serial_ref::pseudogradient_with_risk(data, at, sig, xi); },
        reps);

    bool same = par.risk == ser.risk &&
                std::memcmp(par.gradient.data(), ser.gradient.data(),
                            sizeof(double) * d) == 0;
    std::printf("%8d %6d | %10.3f %10.3f %8.2fx | %s\n", n, d, t_ser, t_par,
                t_ser / t_par, same ? "yes" : "NO");
    if (!same) return 1;
  }
  return 0;
}

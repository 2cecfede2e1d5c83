#include "reflectron/rng.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace refl {

double Rng::normal() {
  // u1 in (0, 1] so the log is finite.
  double u1 = 1.0 - uniform01();
  double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::VectorXd Rng::uniform_vector(int dim, double lo, double hi) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = uniform(lo, hi);
  return v;
}

Eigen::VectorXd Rng::normal_vector(int dim) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = normal();
  return v;
}

std::vector<int> Rng::permutation(int n) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(uniform_index(static_cast<std::uint64_t>(i) + 1));
    std::swap(p[i], p[j]);
  }
  return p;
}

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                          std::uint64_t b) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ (a + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ (b + 0x1f83d9abfb41bd6bULL));
  return h;
}

}  // namespace refl

#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <stdexcept>

#include "reflectron/bounds.hpp"

using namespace refl::bounds;

TEST_CASE("rademacher complexity of the linear class") {
  CHECK(rademacher_linear(1.0, 1.0, 1.0, 2) == doctest::Approx(1.0));
  double a = rademacher_linear(1.5, 2.0, 0.7, 100);
  double b = rademacher_linear(1.5, 2.0, 0.7, 200);
  CHECK(a / b == doctest::Approx(std::sqrt(2.0)));
  CHECK(rademacher_linear(2.0, 3.0, 4.0, 8) == doctest::Approx(1.5));
  CHECK_THROWS_AS(rademacher_linear(0.0, 1.0, 1.0, 10), std::invalid_argument);
}

TEST_CASE("eta concentration levels") {
  CHECK(eta_bound(0.0, 50, 0.1, EtaRegime::dual_pnorm(1.5)) == 0.0);
  double prev = 1e18;
  for (long n : {100L, 1000L, 10000L}) {
    double v = eta_bound(1.0, n, 0.1, EtaRegime::dual_pnorm(1.5));
    CHECK(v < prev);
    prev = v;
  }
  double expect = std::sqrt(2.0 * std::log(16.0) / 100.0) + 0.1;
  CHECK(eta_bound(1.0, 100, 0.25, EtaRegime::dual_pnorm(2.0)) ==
        doctest::Approx(expect).epsilon(1e-12));

  double vinf = eta_bound(1.0, 400, 0.25, EtaRegime::dual_linf(1000));
  double expect_inf = std::sqrt(2.0 * std::log(16.0) / 400.0) +
                      4.0 * std::sqrt(std::log(1000.0) / 400.0);
  CHECK(vinf == doctest::Approx(expect_inf).epsilon(1e-12));

  CHECK_THROWS_AS(eta_bound(1.0, 100, 1.5, EtaRegime::dual_pnorm(1.5)),
                  std::invalid_argument);
}

TEST_CASE("master risk bound") {
  BoundInputs in;
  in.lipschitz = 0.25;
  in.feature_bound = 1.0;
  in.xi_bound = 1.0;
  in.sigma = 1.0;
  in.gamma = 0.05;
  in.eta = 0.0;
  in.potential_at_target = 1.0;
  in.n = 1000;
  in.delta = 0.05;
  CHECK(risk_bound(in, 0.0) ==
        doctest::Approx(std::sqrt(8.0 * std::log(20.0) / 1000.0)));

  in.eta = 0.1;
  double base = risk_bound(in, 0.05);
  BoundInputs more = in;
  more.eta = 0.2;
  CHECK(risk_bound(more, 0.05) > base);
  more = in;
  more.potential_at_target = 2.0;
  CHECK(risk_bound(more, 0.05) > base);

  // independent arithmetic evaluation of the same display
  double l = 0.25, eta = 0.1, psi = 1.0, gamma = 0.05, sigma = 1.0, c = 1.0,
         b = 1.0;
  double lead = std::sqrt(32.0 * l * l * eta * eta * psi) /
                (gamma * std::sqrt(sigma));
  double factor = (2.0 * c * c * l * b + 1.0) / (2.0 * c * c * l * b);
  double expect =
      lead * factor + 4.0 * 0.05 + std::sqrt(8.0 * std::log(20.0) / 1000.0);
  CHECK(base == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("geometry bounds decrease in n") {
  for (auto kind : {GeometryBoundKind::pnorm_pair, GeometryBoundKind::l1_logdim,
                    GeometryBoundKind::simplex_kl}) {
    double prev = 1e300;
    for (long n : {100L, 1000L, 10000L}) {
      BoundInputs in;
      in.lipschitz = 0.25;
      in.feature_bound = 1.0;
      in.param_bound = 2.0;
      in.xi_bound = 1.0;
      in.n = n;
      in.d = 1000;
      in.delta = 0.05;
      in.q = 1.5;
      double v = geometry_bound(kind, in);
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("log-dimension bounds grow slowly in d") {
  for (auto kind :
       {GeometryBoundKind::l1_logdim, GeometryBoundKind::simplex_kl}) {
    BoundInputs in;
    in.lipschitz = 0.25;
    in.feature_bound = 1.0;
    in.param_bound = 2.0;
    in.xi_bound = 1.0;
    in.n = 1000;
    in.delta = 0.05;
    in.d = 1000;
    double lo = geometry_bound(kind, in);
    in.d = 1000000;
    double hi = geometry_bound(kind, in);
    CHECK(hi / lo < 3.0);
  }
}

TEST_CASE("pnorm bound at q = 2 is the euclidean specialization") {
  BoundInputs in;
  in.lipschitz = 0.25;
  in.feature_bound = 1.5;
  in.param_bound = 2.0;
  in.xi_bound = 1.0;
  in.n = 500;
  in.delta = 0.05;
  in.q = 2.0;
  double got = geometry_bound(GeometryBoundKind::pnorm_pair, in);
  // with q - 1 = 1 every (q-1) factor drops out
  double l = in.lipschitz, w = in.param_bound, c = in.feature_bound;
  double clb = 2.0 * c * c * l * in.xi_bound;
  double expect =
      4.0 * l * w * c * ((std::sqrt(2.0 * std::log(4.0 / in.delta)) + 1.0) /
                         std::sqrt(500.0)) *
          ((clb + 1.0) / clb) +
      (4.0 * c * w / std::sqrt(500.0)) * 2.0 +
      std::sqrt(8.0 * std::log(1.0 / in.delta) / 500.0);
  CHECK(got == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("dimensional crossover between euclidean and l1 geometries") {
  // Unit-cube features: the euclidean dual bound grows like sqrt(d) while
  // the sup-norm bound stays 1. Somewhere on the grid the log-dimension
  // bounds undercut the euclidean-pair bound.
  bool crossover = false;
  for (long d : {1000L, 10000L, 100000L}) {
    for (long n : {1000L, 10000L}) {
      BoundInputs euc;
      euc.lipschitz = 0.25;
      euc.xi_bound = 1.0;
      euc.n = n;
      euc.delta = 0.05;
      euc.q = 2.0;
      euc.feature_bound = std::sqrt(static_cast<double>(d));
      euc.param_bound = 2.0;  // l2 norm of a fixed sparse target
      double cor1 = geometry_bound(GeometryBoundKind::pnorm_pair, euc);

      BoundInputs ell1;
      ell1.lipschitz = 0.25;
      ell1.xi_bound = 1.0;
      ell1.n = n;
      ell1.d = d;
      ell1.delta = 0.05;
      ell1.feature_bound = 1.0;
      ell1.param_bound = 6.0;  // l1 norm of the same target
      double cor2 = geometry_bound(GeometryBoundKind::l1_logdim, ell1);
      double cor3 = geometry_bound(GeometryBoundKind::simplex_kl, ell1);
      if (cor2 < cor1 && cor3 < cor1) crossover = true;
    }
  }
  CHECK(crossover);
}

TEST_CASE("missing parameters are rejected") {
  BoundInputs in;
  in.lipschitz = 0.25;
  in.feature_bound = 1.0;
  in.xi_bound = 1.0;
  in.n = 100;
  in.delta = 0.05;
  in.q = 1.5;
  // param_bound missing
  CHECK_THROWS_AS(geometry_bound(GeometryBoundKind::pnorm_pair, in),
                  std::invalid_argument);
  in.param_bound = 1.0;
  in.d = 0;  // dimension missing
  CHECK_THROWS_AS(geometry_bound(GeometryBoundKind::l1_logdim, in),
                  std::invalid_argument);
}

#include <doctest.h>

#include <cmath>

#include "reflectron/matrixglm.hpp"
#include "reflectron/rng.hpp"
#include "reflectron/svd.hpp"
#include "test_support.hpp"

using namespace refl;

namespace {
SystemSpec manual_spec(const Eigen::MatrixXd& theta, double decay,
                       double noise, int horizon) {
  SystemSpec s;
  s.dimension = static_cast<int>(theta.rows());
  s.rank = std::max<int>(1, static_cast<int>(theta.rows()));
  s.decay = decay;
  s.noise_level = noise;
  s.horizon = horizon;
  s.true_matrix = theta;
  return s;
}
}  // namespace

TEST_CASE("simulate fixed point with zero matrix and zero decay") {
  const int d = 5;
  SystemSpec spec = manual_spec(Eigen::MatrixXd::Zero(d, d), 0.0, 0.0, 4);
  TrajectorySet ts = simulate(spec, 3, 42);
  for (const auto& traj : ts.trajectories) {
    for (int t = 1; t <= 4; ++t) {
      for (int k = 0; k < d; ++k) {
        CHECK(traj(k, t) == doctest::Approx(0.5).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("simulate determinism and state bound") {
  SystemSpec spec = make_system_spec(6, 2, 0.9, 0.0, 5, 1234);
  CHECK(thin_svd(spec.true_matrix).singular_values[0] ==
        doctest::Approx(1.0));

  TrajectorySet a = simulate(spec, 4, 99);
  TrajectorySet b = simulate(spec, 4, 99);
  for (int i = 0; i < 4; ++i) {
    CHECK((a.trajectories[i] - b.trajectories[i]).cwiseAbs().maxCoeff() ==
          0.0);
  }

  double bound = 1.0 / (1.0 - spec.decay) + 1.0 / (1.0 - spec.decay);
  for (const auto& traj : a.trajectories) {
    CHECK(traj.cwiseAbs().maxCoeff() <= bound);
  }
}

TEST_CASE("matrix pseudogradient closed forms") {
  Rng rng(71);
  SystemSpec spec = make_system_spec(4, 2, 0.5, 0.0, 3, 7);
  TrajectorySet data = simulate(spec, 5, 11);
  Eigen::MatrixXd g =
      matrix_pseudogradient(spec.true_matrix, data, spec, XiMode::one());
  CHECK(g.cwiseAbs().maxCoeff() <= 1e-14);

  // n = 1, T = 1: single outer product
  SystemSpec one = manual_spec(spec.true_matrix, 0.5, 0.0, 1);
  TrajectorySet single = simulate(one, 1, 13);
  Eigen::MatrixXd that(4, 4);
  for (int i = 0; i < 16; ++i) that(i / 4, i % 4) = rng.uniform(-1.0, 1.0);
  Eigen::VectorXd x0 = single.trajectories[0].col(0);
  Eigen::VectorXd x1 = single.trajectories[0].col(1);
  Eigen::VectorXd resid(4);
  for (int k = 0; k < 4; ++k) {
    resid[k] = activation_apply(Activation::sigmoid(), that.row(k).dot(x0)) -
               x1[k] + 0.5 * x0[k];
  }
  Eigen::MatrixXd expect = resid * x0.transpose();
  Eigen::MatrixXd got = matrix_pseudogradient(that, single, one,
                                              XiMode::one());
  CHECK((got - expect).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("derivative-mode matrix pseudogradient matches finite differences"
          " of the empirical risk") {
  Rng rng(72);
  SystemSpec spec = make_system_spec(4, 1, 0.9, 0.1, 3, 21);
  TrajectorySet data = simulate(spec, 4, 22);
  Eigen::MatrixXd that(4, 4);
  for (int i = 0; i < 16; ++i) that(i / 4, i % 4) = rng.uniform(-0.5, 0.5);

  Eigen::MatrixXd g = matrix_pseudogradient(that, data, spec,
                                            XiMode::derivative());
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      double h = 1e-5;
      Eigen::MatrixXd hi = that, lo = that;
      hi(r, c) += h;
      lo(r, c) -= h;
      double fd = (matrix_empirical_risk(hi, data, spec) -
                   matrix_empirical_risk(lo, data, spec)) /
                  (2.0 * h);
      CHECK(std::abs(g(r, c) - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("matrix empirical risk") {
  Rng rng(73);
  SystemSpec spec = make_system_spec(4, 2, 0.9, 0.0, 4, 31);
  TrajectorySet clean = simulate(spec, 3, 32);
  CHECK(matrix_empirical_risk(spec.true_matrix, clean, spec) <= 1e-14);

  // constant offset c per coordinate per step -> d c^2 / 2
  const int d = 4, T = 3;
  const double c = 0.2;
  Eigen::MatrixXd that(d, d);
  for (int i = 0; i < 16; ++i) that(i / 4, i % 4) = rng.uniform(-1.0, 1.0);
  SystemSpec offspec = manual_spec(that, 0.7, 0.0, T);
  TrajectorySet off;
  Eigen::MatrixXd traj(d, T + 1);
  traj.col(0) = rng.uniform_vector(d, -1.0, 1.0);
  for (int t = 0; t < T; ++t) {
    Eigen::VectorXd drive(d);
    for (int k = 0; k < d; ++k) {
      drive[k] =
          activation_apply(Activation::sigmoid(), that.row(k).dot(traj.col(t)));
    }
    traj.col(t + 1) =
        0.7 * traj.col(t) + drive + Eigen::VectorXd::Constant(d, c);
  }
  off.trajectories.push_back(traj);
  CHECK(matrix_empirical_risk(that, off, offspec) ==
        doctest::Approx(d * c * c / 2.0).epsilon(1e-10));

  // naive triple-loop oracle
  SystemSpec noisy = make_system_spec(5, 2, 0.8, 0.1, 4, 41);
  TrajectorySet data = simulate(noisy, 6, 42);
  Eigen::MatrixXd at(5, 5);
  for (int i = 0; i < 25; ++i) at(i / 5, i % 5) = rng.uniform(-1.0, 1.0);
  double naive = 0.0;
  for (const auto& tr : data.trajectories) {
    for (int t = 0; t < 4; ++t) {
      for (int k = 0; k < 5; ++k) {
        double pred = activation_apply(Activation::sigmoid(),
                                       at.row(k).dot(tr.col(t)));
        double r = tr(k, t + 1) - 0.8 * tr(k, t) - pred;
        naive += r * r;
      }
    }
  }
  naive /= 2.0 * 6 * 4;
  CHECK(std::abs(matrix_empirical_risk(at, data, noisy) - naive) <= 1e-12);
}

TEST_CASE("euclidean unconstrained spectral fit is the plain matrix"
          " pseudogradient recursion bitwise") {
  SystemSpec spec = make_system_spec(4, 2, 0.9, 0.05, 3, 51);
  TrajectorySet data = simulate(spec, 5, 52);
  ReflectronConfig cfg;
  cfg.step_size = 0.2;
  Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(4, 4);
  for (int t = 1; t <= 10; ++t) {
    cfg.iterations = t;
    MatrixTrainTrace trace = fit_spectral(cfg, data, spec);
    CHECK((trace.final_params - ref).cwiseAbs().maxCoeff() == 0.0);
    ref -= 0.2 * matrix_pseudogradient(ref, data, spec, XiMode::one());
  }
}

TEST_CASE("noiseless low-rank system is identified to low risk") {
  SystemSpec spec = make_system_spec(4, 1, 0.9, 0.0, 3, 61);
  TrajectorySet data = simulate(spec, 10, 62);
  ReflectronConfig cfg;
  cfg.step_size = 1.0;
  cfg.iterations = 20000;
  cfg.record_trace = false;
  MatrixTrainTrace trace = fit_spectral(cfg, data, spec);
  CHECK(matrix_empirical_risk(trace.final_params, data, spec) < 1e-5);
}

TEST_CASE("spectral constraint keeps every iterate feasible") {
  SystemSpec spec = make_system_spec(6, 2, 0.9, 0.1, 4, 71);
  TrajectorySet data = simulate(spec, 6, 72);
  double radius = 2.0 * thin_svd(spec.true_matrix).singular_values.lpNorm<1>();

  SUBCASE("euclidean with spectral l1") {
    ReflectronConfig cfg;
    cfg.constraint = ConstraintSet::spectral_l1(radius);
    cfg.step_size = 0.5;
    for (int t = 1; t <= 15; ++t) {
      cfg.iterations = t;
      MatrixTrainTrace trace = fit_spectral(cfg, data, spec);
      CHECK(thin_svd(trace.final_params).singular_values.lpNorm<1>() <=
            radius + 1e-8);
    }
  }
  SUBCASE("hypentropy with spectral l1") {
    ReflectronConfig cfg;
    cfg.potential = Potential::hypentropy(0.01);
    cfg.constraint = ConstraintSet::spectral_l1(radius);
    cfg.step_size = 0.5;
    for (int t = 1; t <= 15; ++t) {
      cfg.iterations = t;
      MatrixTrainTrace trace = fit_spectral(cfg, data, spec);
      CHECK(thin_svd(trace.final_params).singular_values.lpNorm<1>() <=
            radius + 1e-8);
    }
  }
  SUBCASE("pnorm with spectral lp") {
    ReflectronConfig cfg;
    cfg.potential = Potential::pnorm(1.5);
    cfg.constraint = ConstraintSet::spectral_lp(
        1.5, 2.0 * lp_norm(thin_svd(spec.true_matrix).singular_values, 1.5));
    cfg.step_size = 0.5;
    cfg.iterations = 15;
    MatrixTrainTrace trace = fit_spectral(cfg, data, spec);
    CHECK(lp_norm(thin_svd(trace.final_params).singular_values, 1.5) <=
          cfg.constraint.radius + 1e-8);
  }
}

TEST_CASE("euclidean matrix fit equals the flattened vector fit") {
  // Quantize states through float so both paths consume identical values.
  SystemSpec spec = make_system_spec(3, 1, 0.6, 0.05, 2, 81);
  TrajectorySet raw = simulate(spec, 2, 82);
  for (auto& tr : raw.trajectories) {
    tr = tr.cast<float>().cast<double>();
  }
  const int d = 3, T = 2, n = 2;

  Dataset flat;
  flat.features.resize(n * T * d, d * d);
  flat.features.setZero();
  flat.labels.resize(n * T * d);
  int row = 0;
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < T; ++t) {
      for (int j = 0; j < d; ++j, ++row) {
        for (int k = 0; k < d; ++k) {
          flat.features(row, j * d + k) =
              static_cast<float>(raw.trajectories[i](k, t));
        }
        flat.labels[row] = raw.trajectories[i](j, t + 1) -
                           spec.decay * raw.trajectories[i](j, t);
      }
    }
  }

  const double lambda = 0.3;
  ReflectronConfig mcfg;
  mcfg.step_size = lambda;

  ReflectronConfig vcfg;
  vcfg.activation = Activation::sigmoid();
  vcfg.step_size = lambda * d;

  for (int steps = 1; steps <= 8; ++steps) {
    mcfg.iterations = steps;
    vcfg.iterations = steps;
    MatrixTrainTrace mt = fit_spectral(mcfg, raw, spec);
    TrainTrace vt = fit_full_batch(vcfg, flat, nullptr);
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        CHECK(std::abs(mt.final_params(j, k) - vt.final_params[j * d + k]) <=
              1e-10);
      }
    }
  }
}

TEST_CASE("fit_spectral rejects non-spectral constraints") {
  SystemSpec spec = make_system_spec(3, 1, 0.9, 0.1, 2, 91);
  TrajectorySet data = simulate(spec, 2, 92);
  ReflectronConfig cfg;
  cfg.constraint = ConstraintSet::l1_ball(1.0);
  cfg.iterations = 2;
  CHECK_THROWS_AS(fit_spectral(cfg, data, spec), std::invalid_argument);
}

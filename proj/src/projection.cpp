#include "reflectron/projection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "reflectron/svd.hpp"

namespace refl {

namespace {
constexpr double kBisectionTol = 1e-8;
constexpr int kBisectionMaxIter = 200;

void check_radius(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("radius must be positive");
}
}  // namespace

ConstraintSet ConstraintSet::unconstrained() { return ConstraintSet{}; }

ConstraintSet ConstraintSet::l1_ball(double radius) {
  check_radius(radius);
  return ConstraintSet{Kind::l1_ball, radius, 1.0};
}

ConstraintSet ConstraintSet::lp_ball(double exponent, double radius) {
  check_radius(radius);
  if (!(exponent > 1.0) || exponent > 2.0) {
    throw std::invalid_argument("lp ball exponent must lie in (1, 2]");
  }
  return ConstraintSet{Kind::lp_ball, radius, exponent};
}

ConstraintSet ConstraintSet::simplex() {
  return ConstraintSet{Kind::simplex, 1.0, 1.0};
}

ConstraintSet ConstraintSet::spectral_l1(double radius) {
  check_radius(radius);
  return ConstraintSet{Kind::spectral_l1, radius, 1.0};
}

ConstraintSet ConstraintSet::spectral_lp(double exponent, double radius) {
  check_radius(radius);
  if (!(exponent > 1.0) || exponent > 2.0) {
    throw std::invalid_argument("lp ball exponent must lie in (1, 2]");
  }
  return ConstraintSet{Kind::spectral_lp, radius, exponent};
}

Eigen::VectorXd project_l1_euclidean(const Eigen::VectorXd& y, double radius) {
  check_radius(radius);
  if (y.lpNorm<1>() <= radius) return y;
  const int d = static_cast<int>(y.size());
  std::vector<double> mag(d);
  for (int i = 0; i < d; ++i) mag[i] = std::abs(y[i]);
  std::sort(mag.begin(), mag.end(), std::greater<double>());
  // Largest j with mag_j - (cumsum_j - R)/j > 0; ties fall out of the
  // cumulative sum automatically.
  double cumsum = 0.0;
  double tau = 0.0;
  for (int j = 0; j < d; ++j) {
    cumsum += mag[j];
    double cand = (cumsum - radius) / (j + 1);
    if (mag[j] - cand > 0.0) {
      tau = cand;
    } else {
      break;
    }
  }
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) {
    double v = std::abs(y[i]) - tau;
    x[i] = v > 0.0 ? (y[i] < 0.0 ? -v : v) : 0.0;
  }
  return x;
}

Eigen::VectorXd project_lp_radial(double p, const Eigen::VectorXd& y,
                                  double radius) {
  check_radius(radius);
  double np = lp_norm(y, p);
  if (np <= radius) return y;
  return y * (radius / np);
}

Eigen::VectorXd hypentropy_shrinkage(double theta, double beta,
                                     const Eigen::VectorXd& x) {
  if (!(theta > 0.0) || theta > 1.0) {
    throw std::invalid_argument("shrinkage theta must lie in (0, 1]");
  }
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  Eigen::VectorXd s(x.size());
  for (int i = 0; i < x.size(); ++i) {
    double a = std::abs(x[i]);
    double h = std::sqrt(x[i] * x[i] + beta * beta);
    double v = theta * (h + a) * 0.5 - (h - a) / (2.0 * theta);
    if (v < 0.0) v = 0.0;
    s[i] = x[i] < 0.0 ? -v : (x[i] > 0.0 ? v : 0.0);
  }
  return s;
}

Eigen::VectorXd project_l1_hypentropy(double beta, const Eigen::VectorXd& y,
                                      double radius) {
  check_radius(radius);
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (y.lpNorm<1>() <= radius) return y;
  // ||s_theta(y)||_1 increases from 0 to ||y||_1 > R as theta goes 0 -> 1,
  // so the root is bracketed on (0, 1]. Terminate on the feasible side so
  // the output always lies inside the ball and reprojects to itself.
  double lo = 0.0, hi = 1.0;
  Eigen::VectorXd best = Eigen::VectorXd::Zero(y.size());
  for (int it = 0; it < kBisectionMaxIter; ++it) {
    double mid = 0.5 * (lo + hi);
    Eigen::VectorXd s = hypentropy_shrinkage(mid, beta, y);
    double gap = s.lpNorm<1>() - radius;
    if (gap > 0.0) {
      hi = mid;
    } else {
      lo = mid;
      best = std::move(s);
      if (-gap <= kBisectionTol) return best;
    }
  }
  if (radius - best.lpNorm<1>() > 1e-4 * (1.0 + radius)) {
    throw std::runtime_error(
        "hypentropy l1 projection bisection failed to bracket the target");
  }
  return best;
}

Eigen::VectorXd project_simplex_kl(const Eigen::VectorXd& y) {
  double sum = 0.0;
  for (int i = 0; i < y.size(); ++i) {
    if (!(y[i] > 0.0)) {
      throw std::domain_error("simplex projection requires positive entries");
    }
    sum += y[i];
  }
  return y / sum;
}

Eigen::VectorXd project_spectrum(const ConstraintSet& set,
                                 const Eigen::VectorXd& s,
                                 const Potential& psi) {
  switch (set.kind) {
    case ConstraintSet::Kind::spectral_l1:
      switch (psi.kind) {
        case Potential::Kind::euclidean:
          return project_l1_euclidean(s, set.radius);
        case Potential::Kind::hypentropy:
          return project_l1_hypentropy(psi.beta, s, set.radius);
        default:
          throw std::invalid_argument(
              "no spectral l1 projection rule for this potential");
      }
    case ConstraintSet::Kind::spectral_lp:
      if (psi.kind != Potential::Kind::pnorm) {
        throw std::invalid_argument(
            "spectral lp projection requires the pnorm potential");
      }
      return project_lp_radial(set.exponent, s, set.radius);
    default:
      throw std::invalid_argument("constraint set is not spectral");
  }
}

Eigen::MatrixXd project_spectral(const ConstraintSet& set,
                                 const Eigen::MatrixXd& m,
                                 const Potential& psi) {
  if (!set.is_spectral()) {
    throw std::invalid_argument("constraint set is not spectral");
  }
  ThinSvd svd = thin_svd(m);
  double norm = set.kind == ConstraintSet::Kind::spectral_l1
                    ? svd.singular_values.lpNorm<1>()
                    : lp_norm(svd.singular_values, set.exponent);
  if (norm <= set.radius) return m;
  Eigen::VectorXd s = project_spectrum(set, svd.singular_values, psi);
  return svd.u * s.asDiagonal() * svd.v.transpose();
}

Eigen::VectorXd project(const ConstraintSet& set, const Eigen::VectorXd& y,
                        const Potential& psi) {
  switch (set.kind) {
    case ConstraintSet::Kind::unconstrained:
      return y;
    case ConstraintSet::Kind::l1_ball:
      switch (psi.kind) {
        case Potential::Kind::euclidean:
          return project_l1_euclidean(y, set.radius);
        case Potential::Kind::hypentropy:
          return project_l1_hypentropy(psi.beta, y, set.radius);
        default:
          // Notably absent: the pnorm potential onto the l1 ball, which has
          // no known near-linear-time rule.
          throw std::invalid_argument(
              "no l1-ball projection rule for this potential");
      }
    case ConstraintSet::Kind::lp_ball:
      if (psi.kind != Potential::Kind::pnorm) {
        throw std::invalid_argument(
            "lp-ball projection requires the pnorm potential");
      }
      return project_lp_radial(set.exponent, y, set.radius);
    case ConstraintSet::Kind::simplex:
      if (psi.kind != Potential::Kind::negentropy) {
        throw std::invalid_argument(
            "simplex projection requires the negentropy potential");
      }
      return project_simplex_kl(y);
    default:
      throw std::invalid_argument(
          "spectral constraints apply to matrix parameters");
  }
}

}  // namespace refl

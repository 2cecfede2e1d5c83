#include "reflectron/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace refl {

namespace {
constexpr double kMinPnormExponent = 1.0 + 1e-6;  // degeneracy floor near q=1
constexpr double kLogFloor = 1e-300;              // keeps logs finite
}  // namespace

Potential Potential::euclidean() {
  Potential p;
  p.kind = Kind::euclidean;
  p.strong_convexity = 1.0;
  p.norm_pair = NormPair::l2_l2;
  return p;
}

Potential Potential::pnorm(double q) {
  if (!(q > 1.0) || q > 2.0) {
    throw std::invalid_argument("pnorm exponent must lie in (1, 2]");
  }
  Potential p;
  p.kind = Kind::pnorm;
  p.q = std::max(q, kMinPnormExponent);
  p.strong_convexity = p.q - 1.0;
  p.norm_pair = NormPair::lq_lp;
  return p;
}

Potential Potential::hypentropy(double beta) {
  if (!(beta > 0.0)) {
    throw std::invalid_argument("hypentropy beta must be positive");
  }
  Potential p;
  p.kind = Kind::hypentropy;
  p.beta = beta;
  p.strong_convexity = std::nullopt;
  p.norm_pair = NormPair::l1_linf;
  return p;
}

Potential Potential::negentropy(Eigen::VectorXd reference) {
  if (reference.size() == 0) {
    throw std::invalid_argument("negentropy reference must be nonempty");
  }
  double sum = 0.0;
  for (int i = 0; i < reference.size(); ++i) {
    if (!(reference[i] > 0.0)) {
      throw std::invalid_argument(
          "negentropy reference must be strictly positive");
    }
    sum += reference[i];
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("negentropy reference must sum to 1");
  }
  Potential p;
  p.kind = Kind::negentropy;
  p.reference = std::move(reference);
  p.strong_convexity = 1.0;  // Pinsker, over the simplex
  p.norm_pair = NormPair::l1_linf;
  return p;
}

double lp_norm(const Eigen::VectorXd& v, double p) {
  double s = 0.0;
  for (int i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]), p);
  return std::pow(s, 1.0 / p);
}

namespace {

void check_negentropy_domain(const Potential& psi, const Eigen::VectorXd& w) {
  if (psi.reference.size() != w.size()) {
    throw std::invalid_argument("dimension mismatch with negentropy reference");
  }
  for (int i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0)) {
      throw std::domain_error("negentropy requires strictly positive entries");
    }
  }
}

}  // namespace

double potential_value(const Potential& psi, const Eigen::VectorXd& w) {
  switch (psi.kind) {
    case Potential::Kind::euclidean:
      return 0.5 * w.squaredNorm();
    case Potential::Kind::pnorm: {
      double nq = lp_norm(w, psi.q);
      return 0.5 * nq * nq;
    }
    case Potential::Kind::hypentropy: {
      double s = 0.0;
      double b = psi.beta;
      for (int i = 0; i < w.size(); ++i) {
        double x = w[i];
        s += x * std::asinh(x / b) - std::sqrt(x * x + b * b);
      }
      return s + static_cast<double>(w.size()) * b;
    }
    case Potential::Kind::negentropy: {
      check_negentropy_domain(psi, w);
      double s = 0.0;
      for (int i = 0; i < w.size(); ++i) {
        s += w[i] * std::log(std::max(w[i], kLogFloor) / psi.reference[i]);
      }
      return s;
    }
  }
  throw std::logic_error("unreachable");
}

Eigen::VectorXd potential_gradient(const Potential& psi,
                                   const Eigen::VectorXd& w) {
  Eigen::VectorXd g(w.size());
  switch (psi.kind) {
    case Potential::Kind::euclidean:
      return w;
    case Potential::Kind::pnorm: {
      double q = psi.q;
      double nq = lp_norm(w, q);
      if (nq == 0.0) {
        g.setZero();
        return g;
      }
      double scale = std::pow(nq, 2.0 - q);
      for (int i = 0; i < w.size(); ++i) {
        double a = std::abs(w[i]);
        g[i] = scale * (w[i] < 0 ? -1.0 : (w[i] > 0 ? 1.0 : 0.0)) *
               std::pow(a, q - 1.0);
      }
      return g;
    }
    case Potential::Kind::hypentropy:
      for (int i = 0; i < w.size(); ++i) g[i] = std::asinh(w[i] / psi.beta);
      return g;
    case Potential::Kind::negentropy:
      check_negentropy_domain(psi, w);
      for (int i = 0; i < w.size(); ++i) {
        g[i] = std::log(std::max(w[i], kLogFloor) / psi.reference[i]) + 1.0;
      }
      return g;
  }
  throw std::logic_error("unreachable");
}

Eigen::VectorXd potential_gradient_inverse(const Potential& psi,
                                           const Eigen::VectorXd& z) {
  Eigen::VectorXd w(z.size());
  switch (psi.kind) {
    case Potential::Kind::euclidean:
      return z;
    case Potential::Kind::pnorm: {
      // The inverse map is the gradient of the conjugate 0.5 ||.||_p^2.
      double p = psi.dual_exponent();
      double np = lp_norm(z, p);
      if (np == 0.0) {
        w.setZero();
        return w;
      }
      double scale = std::pow(np, 2.0 - p);
      for (int i = 0; i < z.size(); ++i) {
        double a = std::abs(z[i]);
        w[i] = scale * (z[i] < 0 ? -1.0 : (z[i] > 0 ? 1.0 : 0.0)) *
               std::pow(a, p - 1.0);
      }
      return w;
    }
    case Potential::Kind::hypentropy:
      for (int i = 0; i < z.size(); ++i) w[i] = psi.beta * std::sinh(z[i]);
      return w;
    case Potential::Kind::negentropy:
      if (psi.reference.size() != z.size()) {
        throw std::invalid_argument(
            "dimension mismatch with negentropy reference");
      }
      for (int i = 0; i < z.size(); ++i) {
        w[i] = psi.reference[i] * std::exp(z[i] - 1.0);
      }
      return w;
  }
  throw std::logic_error("unreachable");
}

double bregman_divergence(const Potential& psi, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& y) {
  double px = potential_value(psi, x);
  double py = potential_value(psi, y);
  Eigen::VectorXd gy = potential_gradient(psi, y);
  double d = px - py - gy.dot(x - y);
  // Rounding can leave a tiny negative residue when x is very close to y.
  if (d < 0.0 && d > -1e-10 * (1.0 + std::abs(px) + std::abs(py))) d = 0.0;
  return d;
}

BregmanPair make_bregman_pair(const Potential& psi, const Eigen::VectorXd& w) {
  return BregmanPair{w, potential_gradient(psi, w)};
}

double primal_norm(const Potential& psi, const Eigen::VectorXd& v) {
  switch (psi.norm_pair) {
    case NormPair::l2_l2:
      return v.norm();
    case NormPair::lq_lp:
      return lp_norm(v, psi.q);
    case NormPair::l1_linf:
      return v.lpNorm<1>();
  }
  throw std::logic_error("unreachable");
}

double dual_norm(const Potential& psi, const Eigen::VectorXd& v) {
  switch (psi.norm_pair) {
    case NormPair::l2_l2:
      return v.norm();
    case NormPair::lq_lp:
      return lp_norm(v, psi.dual_exponent());
    case NormPair::l1_linf:
      return v.lpNorm<Eigen::Infinity>();
  }
  throw std::logic_error("unreachable");
}

}  // namespace refl

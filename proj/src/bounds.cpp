#include "reflectron/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace refl::bounds {

namespace {
void check_delta_n(double delta, long n) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  if (n < 1) throw std::invalid_argument("n must be >= 1");
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) {
    throw std::invalid_argument(std::string(name) + " must be positive");
  }
}

double deviation_term(double delta, long n) {
  return std::sqrt(8.0 * std::log(1.0 / delta) / static_cast<double>(n));
}
}  // namespace

double rademacher_linear(double feature_bound, double param_bound,
                         double sigma, long n) {
  require_positive(feature_bound, "feature bound");
  require_positive(param_bound, "parameter bound");
  require_positive(sigma, "sigma");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  return feature_bound * param_bound *
         std::sqrt(2.0 / (sigma * static_cast<double>(n)));
}

EtaRegime EtaRegime::dual_pnorm(double q) {
  if (!(q > 1.0) || q > 2.0) {
    throw std::invalid_argument("q must lie in (1, 2]");
  }
  EtaRegime r;
  r.kind = Kind::dual_pnorm;
  r.q = q;
  return r;
}

EtaRegime EtaRegime::dual_linf(long d) {
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  EtaRegime r;
  r.kind = Kind::dual_linf;
  r.d = d;
  return r;
}

double eta_bound(double feature_bound, long n, double delta,
                 const EtaRegime& regime) {
  if (feature_bound < 0.0) {
    throw std::invalid_argument("feature bound must be nonnegative");
  }
  check_delta_n(delta, n);
  double dn = static_cast<double>(n);
  double common = std::sqrt(2.0 * std::log(4.0 / delta) / dn);
  switch (regime.kind) {
    case EtaRegime::Kind::dual_pnorm:
      return feature_bound * (common + 1.0 / std::sqrt(dn * (regime.q - 1.0)));
    case EtaRegime::Kind::dual_linf:
      return feature_bound *
             (common +
              4.0 * std::sqrt(std::log(static_cast<double>(regime.d)) / dn));
  }
  throw std::logic_error("unreachable");
}

double risk_bound(const BoundInputs& in, double rademacher) {
  check_delta_n(in.delta, in.n);
  require_positive(in.gamma, "gamma");
  require_positive(in.sigma, "sigma");
  require_positive(in.lipschitz, "L");
  require_positive(in.feature_bound, "C");
  require_positive(in.xi_bound, "B");
  if (in.eta < 0.0 || in.potential_at_target < 0.0 || rademacher < 0.0) {
    throw std::invalid_argument("eta, psi(theta), R_n must be nonnegative");
  }
  double l = in.lipschitz;
  double cc = in.feature_bound * in.feature_bound;
  double clb = 2.0 * cc * l * in.xi_bound;
  double lead = std::sqrt(32.0 * l * l * in.eta * in.eta *
                          in.potential_at_target /
                          (in.gamma * in.gamma * in.sigma));
  return lead * ((clb + 1.0) / clb) + 4.0 * rademacher +
         deviation_term(in.delta, in.n);
}

double geometry_bound(GeometryBoundKind kind, const BoundInputs& in) {
  check_delta_n(in.delta, in.n);
  require_positive(in.lipschitz, "L");
  require_positive(in.feature_bound, "C");
  require_positive(in.xi_bound, "B");
  const double l = in.lipschitz;
  const double c = in.feature_bound;
  const double b = in.xi_bound;
  const double dn = static_cast<double>(in.n);
  const double clb = 2.0 * c * c * l * b;
  switch (kind) {
    case GeometryBoundKind::pnorm_pair: {
      require_positive(in.param_bound, "W");
      if (!(in.q > 1.0) || in.q > 2.0) {
        throw std::invalid_argument("q must lie in (1, 2]");
      }
      double qm1 = in.q - 1.0;
      double first = (4.0 * l * in.param_bound * c / qm1) *
                     ((std::sqrt(2.0 * std::log(4.0 / in.delta) * qm1) + 1.0) /
                      std::sqrt(dn)) *
                     ((clb + 1.0) / clb);
      double second = (4.0 * c * in.param_bound / std::sqrt(dn * qm1)) *
                      (1.0 + 1.0 / std::sqrt(qm1));
      return first + second + deviation_term(in.delta, in.n);
    }
    case GeometryBoundKind::l1_logdim: {
      require_positive(in.param_bound, "W");
      if (in.d < 2) throw std::invalid_argument("d must be >= 2");
      double logd = std::log(static_cast<double>(in.d));
      double root = 1.0 + std::sqrt(3.0 * logd);
      double first = 4.0 * c * in.param_bound * root * root / std::sqrt(dn);
      double third = (12.0 * l * c * in.param_bound *
                      std::sqrt(3.0 * logd) * (clb + 1.0) / (c * c * l * b)) *
                     std::sqrt(std::log(4.0 * static_cast<double>(in.d) /
                                        in.delta) /
                               dn);
      return first + deviation_term(in.delta, in.n) + third;
    }
    case GeometryBoundKind::simplex_kl: {
      if (in.d < 2) throw std::invalid_argument("d must be >= 2");
      double logd = std::log(static_cast<double>(in.d));
      double first = 4.0 * c * std::sqrt(2.0 * logd / dn);
      double third = (3.0 * l * c * std::sqrt(32.0 * logd) * (clb + 1.0) /
                      (c * c * l * b)) *
                     std::sqrt(std::log(4.0 * static_cast<double>(in.d) /
                                        in.delta) /
                               dn);
      return first + deviation_term(in.delta, in.n) + third;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace refl::bounds

#pragma once

namespace refl::bounds {

// Scalar ingredients for the closed-form generalization bounds. All values
// are plain formula inputs; nothing here is estimated from data.
struct BoundInputs {
  double lipschitz = 0.0;            // L
  double feature_bound = 0.0;        // C, dual norm bound on features
  double param_bound = 0.0;          // W, primal norm bound on the target
  double xi_bound = 0.0;             // B
  double sigma = 0.0;                // strong convexity constant
  double gamma = 0.0;                // lower bound on the xi weight
  double eta = 0.0;                  // dual norm of the noise average
  double potential_at_target = 0.0;  // psi(theta)
  long n = 0;
  long d = 0;
  double delta = 0.0;
  double q = 2.0;
};

// Rademacher complexity of a strongly-convex-potential-bounded linear class:
// C W sqrt(2 / (sigma n)).
double rademacher_linear(double feature_bound, double param_bound,
                         double sigma, long n);

// Concentration level for the dual norm of the averaged noise vector.
struct EtaRegime {
  enum class Kind { dual_pnorm, dual_linf };
  Kind kind = Kind::dual_pnorm;
  double q = 2.0;  // primal exponent, dual_pnorm regime
  long d = 0;      // dimension, dual_linf regime

  static EtaRegime dual_pnorm(double q);
  static EtaRegime dual_linf(long d);
};

double eta_bound(double feature_bound, long n, double delta,
                 const EtaRegime& regime);

// Master generalization bound for the full-batch iteration:
// sqrt(32 L^2 eta^2 psi / (gamma^2 sigma)) (2C^2LB+1)/(2C^2LB)
//   + 4 R_n + sqrt(8 log(1/delta) / n).
double risk_bound(const BoundInputs& in, double rademacher);

// Geometry-specialized bounds.
enum class GeometryBoundKind {
  pnorm_pair,  // lq/lp dual pair
  l1_logdim,   // l1 geometry with q = log d / (log d - 1)
  simplex_kl   // negentropy over the simplex
};

double geometry_bound(GeometryBoundKind kind, const BoundInputs& in);

}  // namespace refl::bounds

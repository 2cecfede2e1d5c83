#pragma once

#include <optional>

#include <Eigen/Core>

namespace refl {

// Primal/dual norm pair a potential is strongly convex against.
enum class NormPair { l2_l2, lq_lp, l1_linf };

// Strongly convex mirror map. Four kinds:
//   euclidean   psi(w) = 0.5 ||w||_2^2
//   pnorm       psi(w) = 0.5 ||w||_q^2,  q in (1, 2]
//   hypentropy  psi(w) = sum_i (w_i asinh(w_i/beta) - sqrt(w_i^2 + beta^2)) + d beta
//   negentropy  psi(w) = sum_i w_i log(w_i / ref_i),  w > 0
//
// Hypentropy is stored shifted by +d*beta so its minimum (at the origin) is
// exactly zero; gradients and divergences are unchanged by the shift.
struct Potential {
  enum class Kind { euclidean, pnorm, hypentropy, negentropy };

  Kind kind = Kind::euclidean;
  double q = 2.0;               // pnorm exponent
  double beta = 1.0;            // hypentropy scale
  Eigen::VectorXd reference;    // negentropy reference distribution
  // Known closed-form strong convexity constant in the declared primal norm.
  // Absent for hypentropy: no constant is available, callers must supply one.
  std::optional<double> strong_convexity;
  NormPair norm_pair = NormPair::l2_l2;

  static Potential euclidean();
  static Potential pnorm(double q);
  static Potential hypentropy(double beta);
  static Potential negentropy(Eigen::VectorXd reference);

  // Dual exponent p = q/(q-1) for the pnorm kind.
  double dual_exponent() const { return q / (q - 1.0); }
};

// A primal point together with its image under the potential gradient.
struct BregmanPair {
  Eigen::VectorXd primal_point;
  Eigen::VectorXd dual_point;
};

BregmanPair make_bregman_pair(const Potential& psi, const Eigen::VectorXd& w);

double potential_value(const Potential& psi, const Eigen::VectorXd& w);
Eigen::VectorXd potential_gradient(const Potential& psi,
                                   const Eigen::VectorXd& w);
Eigen::VectorXd potential_gradient_inverse(const Potential& psi,
                                           const Eigen::VectorXd& z);

// psi(x) - psi(y) - <grad psi(y), x - y>; nonnegative by convexity.
double bregman_divergence(const Potential& psi, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& y);

// Norms of the potential's declared primal/dual pair.
double primal_norm(const Potential& psi, const Eigen::VectorXd& v);
double dual_norm(const Potential& psi, const Eigen::VectorXd& v);

double lp_norm(const Eigen::VectorXd& v, double p);

}  // namespace refl

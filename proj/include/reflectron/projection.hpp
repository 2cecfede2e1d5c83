#pragma once

#include <Eigen/Core>

#include "reflectron/geometry.hpp"

namespace refl {

// Feasible region with an associated projection rule.
struct ConstraintSet {
  enum class Kind {
    unconstrained,
    l1_ball,
    lp_ball,
    simplex,
    spectral_l1,
    spectral_lp
  };

  Kind kind = Kind::unconstrained;
  double radius = 0.0;
  double exponent = 2.0;  // p for the lp variants

  static ConstraintSet unconstrained();
  static ConstraintSet l1_ball(double radius);
  static ConstraintSet lp_ball(double exponent, double radius);
  static ConstraintSet simplex();
  static ConstraintSet spectral_l1(double radius);
  static ConstraintSet spectral_lp(double exponent, double radius);

  bool is_spectral() const {
    return kind == Kind::spectral_l1 || kind == Kind::spectral_lp;
  }
  bool is_unconstrained() const { return kind == Kind::unconstrained; }
};

// Euclidean projection onto the l1 ball by sort-and-threshold.
Eigen::VectorXd project_l1_euclidean(const Eigen::VectorXd& y, double radius);

// Bregman projection under the pnorm potential onto the lp ball: y when
// feasible, otherwise rescaled to the boundary.
Eigen::VectorXd project_lp_radial(double p, const Eigen::VectorXd& y,
                                  double radius);

// Elementwise shrinkage map whose theta-bisection solves the hypentropy
// l1-ball projection; the identity at theta = 1.
Eigen::VectorXd hypentropy_shrinkage(double theta, double beta,
                                     const Eigen::VectorXd& x);

// Bregman projection under hypentropy onto the l1 ball via bisection on the
// shrinkage parameter.
Eigen::VectorXd project_l1_hypentropy(double beta, const Eigen::VectorXd& y,
                                      double radius);

// Bregman projection under negentropy onto the probability simplex.
Eigen::VectorXd project_simplex_kl(const Eigen::VectorXd& y);

// Spectral lift: projects the singular values with the vector rule matching
// (set, psi) and recomposes. Returns M unchanged when already feasible.
Eigen::MatrixXd project_spectral(const ConstraintSet& set,
                                 const Eigen::MatrixXd& m,
                                 const Potential& psi);

// Vector-space dispatcher keyed on (constraint kind, potential kind). Throws
// for pairs without an implemented projection rule.
Eigen::VectorXd project(const ConstraintSet& set, const Eigen::VectorXd& y,
                        const Potential& psi);

// Projects a vector of (nonnegative) singular values per the spectral rule.
Eigen::VectorXd project_spectrum(const ConstraintSet& set,
                                 const Eigen::VectorXd& s,
                                 const Potential& psi);

}  // namespace refl

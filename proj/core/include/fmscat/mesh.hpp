#ifndef FMSCAT_MESH_HPP
#define FMSCAT_MESH_HPP

#include <Eigen/Dense>
#include <vector>

#include "fmscat/common.hpp"

namespace fmscat {

/// Regularized Lagrange-Laguerre basis on (0, inf),
///   F_i(x) = (-1)^i x_i^{-1/2} x L_N(x)/(x - x_i) exp(-x/2),
/// scaled by h and normalized so that the N-point Gauss-Laguerre inner
/// product is the identity: F_i vanishes at every mesh point but its own.
/// All evaluations use exp(-x/2)-damped recurrences, stable to N ~ 100.
class LagrangeLaguerreBasis {
public:
  LagrangeLaguerreBasis(int N, double h);

  int size() const { return N_; }
  double scale() const { return h_; }

  /// Unscaled Laguerre root x_i (zero-based index).
  double root(int i) const { return roots_[i]; }
  /// Physical mesh point h * x_i.
  double node(int i) const { return h_ * roots_[i]; }
  /// Integration weight for the Gauss-consistent rule: sum w_i f(node_i).
  double weight(int i) const { return h_ * lambda_[i]; }
  /// sqrt of the integration weight (projection coefficient of the basis).
  double sqrt_weight(int i) const { return sqrt_weight_[i]; }

  /// Normalized basis function value at physical coordinate x >= 0.
  double eval(int i, double x) const;
  /// Derivative of the normalized basis function.
  double eval_deriv(int i, double x) const;

  /// Values of all N functions at x (cheaper than N single evals).
  void eval_all(double x, double* out) const;

  /// Gauss-consistent matrix of -d^2/dx^2 (symmetric positive definite).
  const Eigen::MatrixXd& second_derivative_matrix() const { return kin_; }
  /// -d^2/dx^2 + l(l+1)/x^2 on the mesh.
  Eigen::MatrixXd kinetic_matrix(int l) const;

private:
  int N_;
  double h_;
  std::vector<double> roots_;       // Laguerre roots, unscaled
  std::vector<double> lambda_;      // lambda_i = w_i e^{x_i}
  std::vector<double> sqrt_weight_; // sqrt(h lambda_i)
  std::vector<double> lprime_;      // l_N'(x_i), damped Laguerre derivative
  std::vector<double> sign_;        // (-1)^i over x_i^{1/2}, cached
  Eigen::MatrixXd kin_;             // unscaled -d2/dx2, scaled by 1/h^2 here

  void compute_roots();
  void build_kinetic();
};

LagrangeLaguerreBasis build_laguerre_basis(int N, double h);

/// Gauss-Legendre rule on (-1, 1).
struct AngularGrid {
  std::vector<double> abscissas;
  std::vector<double> weights;
  int order() const { return static_cast<int>(abscissas.size()); }
};

AngularGrid gauss_legendre(int order);

/// exp(-x/2) L_N(x) and its derivative, overflow-free for x >= 0.
void damped_laguerre(int N, double x, double& value, double& deriv);

} // namespace fmscat

#endif

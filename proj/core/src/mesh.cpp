#include "fmscat/mesh.hpp"

#include <cmath>
#include <string>

namespace fmscat {

void damped_laguerre(int N, double x, double& value, double& deriv) {
  // l_n(x) = exp(-x/2) L_n(x); the recurrence is the Laguerre one since the
  // damping factor is n-independent. |l_n| <= 1 on x >= 0, no overflow.
  const double damp = std::exp(-0.5 * x);
  if (N == 0) {
    value = damp;
    deriv = -0.5 * damp;
    return;
  }
  double lm = damp;             // l_0
  double l = (1.0 - x) * damp;  // l_1
  for (int n = 1; n < N; ++n) {
    const double lp = ((2.0 * n + 1.0 - x) * l - n * lm) / (n + 1.0);
    lm = l;
    l = lp;
  }
  value = l;
  // x L_N' = N (L_N - L_{N-1});  l_N' = exp(-x/2)(L_N' - L_N/2)
  if (x > 0.0)
    deriv = (N * (l - lm)) / x - 0.5 * l;
  else
    deriv = damp * (-static_cast<double>(N) - 0.5); // L_N'(0) = -N
}

LagrangeLaguerreBasis::LagrangeLaguerreBasis(int N, double h) : N_(N), h_(h) {
  if (N < 1) throw ConfigError("LagrangeLaguerreBasis: N must be >= 1");
  if (!(h > 0.0)) throw ConfigError("LagrangeLaguerreBasis: scale h must be > 0");
  compute_roots();
  lambda_.resize(N_);
  sqrt_weight_.resize(N_);
  sign_.resize(N_);
  for (int i = 0; i < N_; ++i) {
    lambda_[i] = 1.0 / (roots_[i] * lprime_[i] * lprime_[i]);
    sqrt_weight_[i] = std::sqrt(h_ * lambda_[i]);
    sign_[i] = (lprime_[i] >= 0.0 ? 1.0 : -1.0) / std::sqrt(roots_[i]);
  }
  build_kinetic();
}

void LagrangeLaguerreBasis::compute_roots() {
  roots_.resize(N_);
  lprime_.resize(N_);
  double z = 0.0;
  for (int i = 0; i < N_; ++i) {
    // initial guesses, then Newton on the damped polynomial
    if (i == 0)
      z = 3.0 / (1.0 + 2.4 * N_);
    else if (i == 1)
      z = roots_[0] + 15.0 / (1.0 + 2.5 * N_);
    else
      z = roots_[i - 1] +
          ((1.0 + 2.55 * (i - 1)) / (1.9 * (i - 1))) * (roots_[i - 1] - roots_[i - 2]);
    bool converged = false;
    for (int it = 0; it < 200; ++it) {
      double v, d;
      damped_laguerre(N_, z, v, d);
      const double step = v / d;
      z -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) {
        converged = true;
        break;
      }
    }
    if (!converged || !(z > 0.0) || (i > 0 && z <= roots_[i - 1])) {
      // bracket by scanning for a sign change and bisect
      double lo = (i == 0) ? 1e-12 : roots_[i - 1] + 1e-12;
      double hi = lo;
      double vlo, d;
      damped_laguerre(N_, lo, vlo, d);
      double stepout = std::max(0.1, (i > 0 && i < N_ - 1)
                                         ? roots_[i - 1] - (i > 1 ? roots_[i - 2] : 0.0)
                                         : 0.5);
      bool bracketed = false;
      for (int k = 0; k < 4000; ++k) {
        hi += stepout;
        double vhi;
        damped_laguerre(N_, hi, vhi, d);
        if (vlo * vhi < 0.0) {
          bracketed = true;
          break;
        }
        lo = hi;
        vlo = vhi;
      }
      if (!bracketed)
        throw NumericError("Laguerre root " + std::to_string(i) +
                           " of N=" + std::to_string(N_) + ": no bracket found");
      for (int k = 0; k < 200; ++k) {
        z = 0.5 * (lo + hi);
        double v;
        damped_laguerre(N_, z, v, d);
        if (v * vlo < 0.0)
          hi = z;
        else {
          lo = z;
          vlo = v;
        }
        if (hi - lo < 1e-15 * z) break;
      }
    }
    double v, d;
    damped_laguerre(N_, z, v, d);
    roots_[i] = z;
    lprime_[i] = d;
  }
}

double LagrangeLaguerreBasis::eval(int i, double x) const {
  const double t = x / h_;
  const double xi = roots_[i];
  const double invsqh = 1.0 / std::sqrt(h_);
  if (std::abs(t - xi) < 1e-9 * std::max(1.0, xi)) {
    const double delta = t - xi;
    return sign_[i] * lprime_[i] * (xi + 0.5 * delta) * invsqh;
  }
  double v, d;
  damped_laguerre(N_, t, v, d);
  return sign_[i] * t * v / (t - xi) * invsqh;
}

void LagrangeLaguerreBasis::eval_all(double x, double* out) const {
  const double t = x / h_;
  const double invsqh = 1.0 / std::sqrt(h_);
  double v, d;
  damped_laguerre(N_, t, v, d);
  for (int i = 0; i < N_; ++i) {
    const double xi = roots_[i];
    if (std::abs(t - xi) < 1e-9 * std::max(1.0, xi)) {
      const double delta = t - xi;
      out[i] = sign_[i] * lprime_[i] * (xi + 0.5 * delta) * invsqh;
    } else {
      out[i] = sign_[i] * t * v / (t - xi) * invsqh;
    }
  }
}

double LagrangeLaguerreBasis::eval_deriv(int i, double x) const {
  const double t = x / h_;
  const double xi = roots_[i];
  const double norm = 1.0 / (h_ * std::sqrt(h_));
  if (std::abs(t - xi) < 1e-9 * std::max(1.0, xi))
    return sign_[i] * 0.5 * lprime_[i] * norm;
  double v, d;
  damped_laguerre(N_, t, v, d);
  const double dt = t - xi;
  return sign_[i] * ((v + t * d) * dt - t * v) / (dt * dt) * norm;
}

void LagrangeLaguerreBasis::build_kinetic() {
  // Gauss-consistent form: T_ij = sum_k lambda_k F_i'(x_k) F_j'(x_k), with
  // the derivative values in closed form from the damped Laguerre derivative.
  Eigen::MatrixXd D(N_, N_); // D(k, i) = F_i'(x_k), unscaled coordinate
  for (int k = 0; k < N_; ++k) {
    const double xk = roots_[k], dk = lprime_[k];
    for (int i = 0; i < N_; ++i) {
      if (k == i)
        D(k, i) = sign_[i] * 0.5 * lprime_[i];
      else
        D(k, i) = sign_[i] * xk * dk / (xk - roots_[i]);
    }
  }
  kin_.resize(N_, N_);
  for (int i = 0; i < N_; ++i)
    for (int j = i; j < N_; ++j) {
      double s = 0.0;
      for (int k = 0; k < N_; ++k) s += lambda_[k] * D(k, i) * D(k, j);
      kin_(i, j) = s / (h_ * h_);
      kin_(j, i) = kin_(i, j);
    }
}

Eigen::MatrixXd LagrangeLaguerreBasis::kinetic_matrix(int l) const {
  Eigen::MatrixXd T = kin_;
  if (l > 0) {
    const double ll = static_cast<double>(l) * (l + 1);
    for (int i = 0; i < N_; ++i) T(i, i) += ll / (node(i) * node(i));
  }
  return T;
}

LagrangeLaguerreBasis build_laguerre_basis(int N, double h) {
  return LagrangeLaguerreBasis(N, h);
}

AngularGrid gauss_legendre(int order) {
  if (order < 1) throw ConfigError("gauss_legendre: order must be >= 1");
  AngularGrid g;
  g.abscissas.resize(order);
  g.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(PI * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < order; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = order * (z * p0 - p1) / (z * z - 1.0);
      const double step = p0 / pp;
      z -= step;
      if (std::abs(step) < 1e-15) break;
    }
    g.abscissas[i] = -z;
    g.abscissas[order - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    g.weights[i] = w;
    g.weights[order - 1 - i] = w;
  }
  return g;
}

} // namespace fmscat

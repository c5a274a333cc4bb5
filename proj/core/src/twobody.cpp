#include "fmscat/twobody.hpp"

#include <cmath>
#include <string>

#include "fmscat/special.hpp"

namespace fmscat {

namespace {

// generalized Laguerre L^{(alpha)}_nu, real or complex argument
template <typename T>
T gen_laguerre(int nu, int alpha, T x) {
  if (nu == 0) return T(1.0);
  T lm = T(1.0);
  T l = T(1.0 + alpha) - x;
  for (int k = 1; k < nu; ++k) {
    const T lp = ((T(2.0 * k + 1.0 + alpha) - x) * l - T(k + alpha) * lm) / T(k + 1.0);
    lm = l;
    l = lp;
  }
  return l;
}

double factorial_ratio(int hi, int lo) { // hi! / lo!
  double v = 1.0;
  for (int k = lo + 1; k <= hi; ++k) v *= k;
  return v;
}

} // namespace

HydrogenicState::HydrogenicState(double Zs, int n, int l) : Zs_(Zs), n_(n), l_(l) {
  if (!(Zs > 0.0)) throw ConfigError("HydrogenicState: attractive strength required");
  if (n < 1 || l < 0 || l >= n)
    throw ConfigError("HydrogenicState: require 0 <= l < n");
  k_ = Zs / (2.0 * n);
  // norm from int t^{2l+2} e^{-t} [L^(2l+1)_nu(t)]^2 dt = 2n (n+l)!/(n-l-1)!
  const double tk = 2.0 * k_;
  norm_ = std::pow(tk, l + 1) *
          std::sqrt(tk / (2.0 * n * factorial_ratio(n + l, n - l - 1)));
}

double HydrogenicState::mean_x() const {
  return (3.0 * n_ * n_ - l_ * (l_ + 1.0)) / Zs_;
}

double HydrogenicState::eval(double x) const {
  return norm_ * std::pow(x, l_ + 1) * std::exp(-k_ * x) *
         gen_laguerre(n_ - l_ - 1, 2 * l_ + 1, 2.0 * k_ * x);
}

Complex HydrogenicState::eval(Complex x) const {
  return norm_ * std::pow(x, l_ + 1) * std::exp(-k_ * x) *
         gen_laguerre(n_ - l_ - 1, 2 * l_ + 1, Complex(2.0 * k_) * x);
}

std::pair<HydrogenicState, BinaryChannel>
hydrogenic_bound_state(const ThreeBodySystem& sys, int partition, int n, int lx) {
  const double strength = sys.coulomb_strength(partition);
  if (strength >= 0.0)
    throw ConfigError("hydrogenic_bound_state: pair in partition " +
                      std::to_string(partition) +
                      " is not attractive, no bound states");
  HydrogenicState state(-strength, n, lx);
  BinaryChannel chan;
  chan.partition = partition;
  chan.n = n;
  chan.lx = lx;
  chan.E_a = state.energy();
  chan.label = "p" + std::to_string(partition) + "(n=" + std::to_string(n) +
               ",l=" + std::to_string(lx) + ")";
  return {std::move(state), std::move(chan)};
}

Eigen::MatrixXd pair_hamiltonian(const LagrangeLaguerreBasis& basis, int l,
                                 double coulomb_strength) {
  Eigen::MatrixXd H = basis.kinetic_matrix(l);
  for (int i = 0; i < basis.size(); ++i) H(i, i) += coulomb_strength / basis.node(i);
  return H;
}

PairSpectrum diagonalize_pair_on_mesh(const LagrangeLaguerreBasis& basis, int l,
                                      double coulomb_strength) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      pair_hamiltonian(basis, l, coulomb_strength));
  if (es.info() != Eigen::Success)
    throw NumericError("diagonalize_pair_on_mesh: eigensolver failed");
  return PairSpectrum{es.eigenvalues(), es.eigenvectors()};
}

double dipole_radial(const HydrogenicState& a, const HydrogenicState& b) {
  // integrand decays like exp(-(k_a+k_b)x) times a polynomial
  const double h = 1.0 / (a.k() + b.k());
  LagrangeLaguerreBasis quad(a.n() + b.n() + 24, h);
  double sum = 0.0;
  for (int i = 0; i < quad.size(); ++i) {
    const double x = quad.node(i);
    sum += quad.weight(i) * a.eval(x) * x * b.eval(x);
  }
  return sum;
}

Complex FreeWave::eval(double y) const {
  return outgoing ? riccati_h_plus(l, q * y) : riccati_j(l, q * y);
}

Complex FreeWave::eval_scaled(double y, double theta) const {
  const Complex z = q * y * std::exp(Complex(0.0, theta));
  return outgoing ? riccati_h_plus(l, z) : riccati_j(l, z);
}

} // namespace fmscat

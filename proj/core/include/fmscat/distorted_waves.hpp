#ifndef FMSCAT_DISTORTED_WAVES_HPP
#define FMSCAT_DISTORTED_WAVES_HPP

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "fmscat/potentials.hpp"
#include "fmscat/twobody.hpp"

namespace fmscat {

/// One target state of the auxiliary problem together with its relative
/// angular momentum: a partial-wave channel of the two-body reduction.
struct AuxChannel {
  HydrogenicState state;
  BinaryChannel chan;
  int ly = 0;
};

/// Separable long-range potential W~ = sum |phi_a> lambda_ab(y) <phi_b| used
/// to distort the incoming wave. lambda includes the partial-wave angular
/// factors, so the radial coupled equations read g'' = (...) g + lambda g.
class AuxiliaryPotential {
public:
  enum class Variant { Free, Dipole, DipolePolarization, Custom };

  static AuxiliaryPotential build(Variant v, const ThreeBodySystem& sys,
                                  int partition, int n_max, int L,
                                  int entrance_n = 1, int entrance_lx = 0,
                                  int entrance_ly = -1);

  /// Custom coupling for tests and the decoupled-limit mode. The function
  /// fills the full channel matrix at (complex) radius y.
  static AuxiliaryPotential
  custom(int partition, int L, std::vector<AuxChannel> channels,
         std::function<void(Complex, Eigen::MatrixXcd&)> coupling);

  Variant variant() const { return variant_; }
  int partition() const { return partition_; }
  int L() const { return L_; }
  int size() const { return static_cast<int>(channels_.size()); }
  const std::vector<AuxChannel>& channels() const { return channels_; }
  const AuxChannel& channel(int i) const { return channels_[i]; }

  /// Channel index of the state (n, lx) with relative momentum ly; -1 if absent.
  int find_channel(int n, int lx, int ly) const;

  /// Coupling matrix at complex radius (analytic in y, symmetric).
  void lambda(Complex y, Eigen::MatrixXcd& out) const;

  /// Mass-scaled dipole coefficient entering lambda (zero for Free/Custom).
  double dipole_coefficient() const { return C_dip_; }

private:
  Variant variant_ = Variant::Free;
  int partition_ = 0;
  int L_ = 0;
  std::vector<AuxChannel> channels_;
  double C_dip_ = 0.0;
  Eigen::MatrixXd dip_radial_;  // <u_i | x | u_j>
  Eigen::MatrixXd ang_;         // <(lx ly)L| P_1 |(lx' ly')L>
  Eigen::MatrixXd reg_;         // n_i^3 n_j^3 regularization constants
  int pol_channel_ = -1;        // entrance diagonal receiving the pol. tail
  std::function<void(Complex, Eigen::MatrixXcd&)> custom_;
};

struct CCOptions {
  double r_match = 150.0;  ///< matching radius (a.u., scaled y)
  double step = 0.01;      ///< Numerov step
  double theta = 0.0;      ///< complex-scaling angle (radians)
  int stabilize_every = 256;
  bool check_matching = true;
  double match_check_rel = 2e-3;
};

/// Scattering solution of the auxiliary two-body problem: channel radial
/// functions g_b(y) with  g_b -> jhat delta_{b,entrance} + C_b hhat^+, the
/// auxiliary amplitudes Atilde_{b,entrance} = -i C_b sqrt(q_a/q_b), and (for
/// theta > 0) the complex-scaled counterparts g_b(y e^{i theta}).
class DistortedWave {
public:
  const AuxiliaryPotential& aux() const { return *aux_; }
  double energy() const { return E_; }
  double theta() const { return theta_; }
  int entrance() const { return entrance_; }
  int n_channels() const { return aux_->size(); }
  const AuxChannel& channel(int i) const { return aux_->channel(i); }
  Complex q(int i) const { return q_[i]; }
  bool open(int i) const { return q_[i].imag() == 0.0; }

  Complex Atilde(int i) const { return Atilde_[i]; }

  /// Radial channel function at (real) y; for theta > 0 this is the value on
  /// the rotated contour, g_b(y e^{i theta}).
  Complex g(int i, double y) const;

  /// [Lambda(y e^{i theta}) g]_i  — the W~-applied channel functions.
  Complex wtilde_g(int i, double y) const;

  /// Reduced-amplitude factorization f_i(x, y) = phi_i(x e^{i theta}) g_i(y).
  Complex phi(int i, double x) const;

  double matching_stability() const { return match_stability_; }
  double closed_channel_leak() const { return closed_leak_; }
  double max_radius() const;

private:
  friend DistortedWave solve_coupled_channels(
      std::shared_ptr<const AuxiliaryPotential>, double, int, const CCOptions&);
  friend DistortedWave make_free_wave(std::shared_ptr<const AuxiliaryPotential>,
                                      double, double);

  std::shared_ptr<const AuxiliaryPotential> aux_;
  double E_ = 0.0;
  double theta_ = 0.0;
  int entrance_ = 0;
  std::vector<Complex> q_;
  std::vector<Complex> Atilde_;
  std::vector<CubicSpline<Complex>> spl_;
  bool closed_form_ = false; // free wave: evaluate jhat directly
  double match_stability_ = 0.0;
  double closed_leak_ = 0.0;
  double rmax_ = 0.0;
};

/// Numerov propagation of the coupled radial equations with periodic QR
/// stabilization and two-point asymptotic matching against {jhat, hhat+}.
DistortedWave solve_coupled_channels(std::shared_ptr<const AuxiliaryPotential> aux,
                                     double E, int entrance,
                                     const CCOptions& opt = {});

/// Closed-form free incoming wave (single-channel Free auxiliary potential).
DistortedWave make_free_wave(std::shared_ptr<const AuxiliaryPotential> aux,
                             double E, double theta = 0.0);

} // namespace fmscat

#endif

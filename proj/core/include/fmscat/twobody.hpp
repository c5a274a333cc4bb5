#ifndef FMSCAT_TWOBODY_HPP
#define FMSCAT_TWOBODY_HPP

#include <Eigen/Dense>
#include <utility>

#include "fmscat/kinematics.hpp"
#include "fmscat/mesh.hpp"

namespace fmscat {

/// Reduced radial bound state u_{nl}(x) of -u'' + l(l+1)/x^2 u - (Zs/x) u = E u,
///   u_{nl}(x) = N x^{l+1} e^{-k x} L^{(2l+1)}_{n-l-1}(2 k x),  k = Zs/(2n),
/// normalized to unit norm, E = -k^2. Zs is the (positive) Coulomb strength
/// in the mass-scaled coordinate, so E equals -mu z^2/(2n^2) in Hartree.
class HydrogenicState {
public:
  HydrogenicState(double Zs, int n, int l);

  int n() const { return n_; }
  int l() const { return l_; }
  double Zs() const { return Zs_; }
  double k() const { return k_; }
  double energy() const { return -k_ * k_; }
  int radial_nodes() const { return n_ - l_ - 1; }
  /// <x> = (3n^2 - l(l+1))/Zs, the bound-state size in the scaled coordinate.
  double mean_x() const;

  double eval(double x) const;
  Complex eval(Complex x) const;

private:
  double Zs_;
  int n_, l_;
  double k_;
  double norm_;
};

/// Analytic bound state of the pair in `partition` plus its channel record.
/// Throws when the pair charges have the same sign (no bound states).
std::pair<HydrogenicState, BinaryChannel>
hydrogenic_bound_state(const ThreeBodySystem& sys, int partition, int n, int lx);

/// Mesh Hamiltonian of the radial pair problem: kinetic + strength/x diagonal.
Eigen::MatrixXd pair_hamiltonian(const LagrangeLaguerreBasis& basis, int l,
                                 double coulomb_strength);

struct PairSpectrum {
  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors; // columns; coefficients in the Lagrange basis
};

/// Diagonalize the pair Hamiltonian on the mesh (validation oracle).
PairSpectrum diagonalize_pair_on_mesh(const LagrangeLaguerreBasis& basis, int l,
                                      double coulomb_strength);

/// Radial dipole integral  int u_a(x) x u_b(x) dx, evaluated with a
/// Gauss-Laguerre rule matched to the combined exponential decay (exact for
/// the polynomial integrand up to quadrature degree).
double dipole_radial(const HydrogenicState& a, const HydrogenicState& b);

/// Asymptotic channel wave: regular jhat_l(q y) or outgoing hhat_l^+(q y).
struct FreeWave {
  int l = 0;
  Complex q = 1.0;
  bool outgoing = false;
  Complex eval(double y) const;
  /// Value on the rotated contour, argument q y e^{i theta}.
  Complex eval_scaled(double y, double theta) const;
};

} // namespace fmscat

#endif

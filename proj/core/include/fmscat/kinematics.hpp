#ifndef FMSCAT_KINEMATICS_HPP
#define FMSCAT_KINEMATICS_HPP

#include <array>
#include <complex>
#include <string>

#include "fmscat/common.hpp"

namespace fmscat {

struct Particle {
  double mass = 1.0;   ///< in units of the electron mass
  double charge = 0.0; ///< in units of the elementary charge
};

/// 2x2 coefficients of the linear map between two mass-scaled Jacobi sets:
///   x_to = cxx * x_from + cxy * y_from
///   y_to = cyx * x_from + cyy * y_from
/// applied componentwise to the 3-vectors. The map is orthogonal.
struct JacobiTransform {
  double cxx = 1.0, cxy = 0.0;
  double cyx = 0.0, cyy = 1.0;
};

/// Radii and in-plane directions of one Jacobi set expressed at a point of
/// another set. Directions are given as (cos theta, sign of the transverse
/// component), everything lying in the plane spanned by the source vectors.
struct RotatedFrame {
  double x = 0.0, y = 0.0;
  double cos_x = 1.0, sgn_x = 1.0;
  double cos_y = 1.0, sgn_y = 1.0;
};

/// Three particles in mass-scaled Jacobi coordinates. Units are atomic
/// (hbar = m_e = e = 1); the internal Hamiltonian reads
///   H = -Lap_x - Lap_y + sum_a V_a,   V_a(x_a) = z_b z_c jacobi_scale(a)/x_a,
/// so hydrogen binds at -mu/2 Hartree and channel momenta obey q^2 = E - E_a.
///
/// The partition index labels the spectator: partition a pairs the other two
/// particles. Index arithmetic is cyclic, (a, a+1, a+2) mod 3.
class ThreeBodySystem {
public:
  ThreeBodySystem(std::array<Particle, 3> particles, double reference_mass);

  const Particle& particle(int i) const { return particles_[i]; }
  double reference_mass() const { return reference_mass_; }
  double total_mass() const { return total_mass_; }

  /// sqrt(2 m_b m_c / ((m_b+m_c) m)) — scale of the pair vector x_a.
  double jacobi_scale(int a) const { return jacobi_scale_[a]; }
  /// sqrt(2 m_a (m_b+m_c) / (M m)) — scale of the spectator vector y_a.
  double spectator_scale(int a) const { return spectator_scale_[a]; }
  /// m_a (m_b+m_c) / (M m_e): reduced mass of the binary channel in m_e units,
  /// the denominator of the cross-section formulas.
  double channel_mass_factor(int a) const { return channel_mass_factor_[a]; }

  /// Product of the pair charges z_b z_c for partition a.
  double pair_charge_product(int a) const;
  /// Reduced mass of the pair in partition a (m_e units).
  double pair_reduced_mass(int a) const;
  /// Coefficient of 1/x in V_a: z_b z_c * jacobi_scale(a). Negative when the
  /// pair is attractive (supports bound states).
  double coulomb_strength(int a) const {
    return pair_charge_product(a) * jacobi_scale_[a];
  }

  const JacobiTransform& transform(int from, int to) const {
    return transforms_[from][to];
  }

  /// Evaluate the `to` set's radii and directions at a point of the `from`
  /// set given by radii (x, y) and relative angle cosine u = xhat . yhat.
  RotatedFrame rotate(int from, int to, double x, double y, double u) const;

private:
  std::array<Particle, 3> particles_;
  double reference_mass_;
  double total_mass_;
  std::array<double, 3> jacobi_scale_{};
  std::array<double, 3> spectator_scale_{};
  std::array<double, 3> channel_mass_factor_{};
  std::array<std::array<JacobiTransform, 3>, 3> transforms_{};
};

ThreeBodySystem build_system(std::array<Particle, 3> particles,
                             double reference_mass = 1.0);

/// A two-body arrangement channel: spectator partition plus target quantum
/// numbers and binding energy (Hartree, negative).
struct BinaryChannel {
  int partition = 0;
  int n = 1;
  int lx = 0;
  double E_a = 0.0;
  std::string label;
};

/// q_a = sqrt(E - E_a); closed channels get the positive-imaginary branch.
Complex channel_momentum(double E, const BinaryChannel& chan);
Complex channel_momentum(double E, double E_a);

} // namespace fmscat

#endif

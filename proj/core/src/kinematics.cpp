#include "fmscat/kinematics.hpp"

#include <cmath>

namespace fmscat {

namespace {

// CM-frame particle positions as linear combinations of (x_p, y_p):
// r_i = P[i] * x_p + Q[i] * y_p. Exact expressions from the definitions.
struct PositionMap {
  std::array<double, 3> P{}, Q{};
};

PositionMap position_map(const std::array<Particle, 3>& pp, double m, int p) {
  const int q = (p + 1) % 3, r = (p + 2) % 3;
  const double mq = pp[q].mass, mr = pp[r].mass, mp = pp[p].mass;
  const double M = mp + mq + mr;
  const double A = std::sqrt(2.0 * mq * mr / ((mq + mr) * m));
  const double B = std::sqrt(2.0 * mp * (mq + mr) / (M * m));
  PositionMap out;
  out.P[p] = 0.0;
  out.Q[p] = (mq + mr) / (M * B);
  out.P[r] = mq / (A * (mq + mr));
  out.Q[r] = -mp / (M * B);
  out.P[q] = -mr / (A * (mq + mr));
  out.Q[q] = out.Q[r];
  return out;
}

} // namespace

ThreeBodySystem::ThreeBodySystem(std::array<Particle, 3> particles,
                                 double reference_mass)
    : particles_(particles), reference_mass_(reference_mass) {
  for (int i = 0; i < 3; ++i) {
    if (!(particles_[i].mass > 0.0) || !std::isfinite(particles_[i].mass))
      throw ConfigError("ThreeBodySystem: particle mass must be positive");
    if (!std::isfinite(particles_[i].charge))
      throw ConfigError("ThreeBodySystem: particle charge must be finite");
  }
  if (!(reference_mass_ > 0.0))
    throw ConfigError("ThreeBodySystem: reference mass must be positive");

  total_mass_ = particles_[0].mass + particles_[1].mass + particles_[2].mass;
  const double m = reference_mass_;
  for (int p = 0; p < 3; ++p) {
    const int q = (p + 1) % 3, r = (p + 2) % 3;
    const double mp = particles_[p].mass, mq = particles_[q].mass,
                 mr = particles_[r].mass;
    jacobi_scale_[p] = std::sqrt(2.0 * mq * mr / ((mq + mr) * m));
    spectator_scale_[p] = std::sqrt(2.0 * mp * (mq + mr) / (total_mass_ * m));
    channel_mass_factor_[p] = mp * (mq + mr) / total_mass_;
  }

  for (int from = 0; from < 3; ++from) {
    const PositionMap pm = position_map(particles_, m, from);
    for (int to = 0; to < 3; ++to) {
      if (to == from) {
        transforms_[from][to] = JacobiTransform{};
        continue;
      }
      const int u = (to + 1) % 3, v = (to + 2) % 3;
      const double mu = particles_[u].mass, mv = particles_[v].mass;
      const double A = jacobi_scale_[to], B = spectator_scale_[to];
      JacobiTransform t;
      t.cxx = A * (pm.P[v] - pm.P[u]);
      t.cxy = A * (pm.Q[v] - pm.Q[u]);
      t.cyx = B * (pm.P[to] - (mu * pm.P[u] + mv * pm.P[v]) / (mu + mv));
      t.cyy = B * (pm.Q[to] - (mu * pm.Q[u] + mv * pm.Q[v]) / (mu + mv));
      transforms_[from][to] = t;
    }
  }
}

double ThreeBodySystem::pair_charge_product(int a) const {
  const int q = (a + 1) % 3, r = (a + 2) % 3;
  return particles_[q].charge * particles_[r].charge;
}

double ThreeBodySystem::pair_reduced_mass(int a) const {
  const int q = (a + 1) % 3, r = (a + 2) % 3;
  return particles_[q].mass * particles_[r].mass /
         (particles_[q].mass + particles_[r].mass);
}

RotatedFrame ThreeBodySystem::rotate(int from, int to, double x, double y,
                                     double u) const {
  RotatedFrame f;
  if (from == to) {
    f.x = x;
    f.y = y;
    f.cos_x = 1.0;
    f.sgn_x = 1.0;
    f.cos_y = u;
    f.sgn_y = 1.0;
    return f;
  }
  const JacobiTransform& t = transforms_[from][to];
  const double sy = std::sqrt(std::max(0.0, 1.0 - u * u));
  // source frame: xhat = z, yhat = (sy, 0, u)
  const double bx_t = t.cxy * y * sy;            // transverse component
  const double bx_z = t.cxx * x + t.cxy * y * u; // longitudinal component
  const double by_t = t.cyy * y * sy;
  const double by_z = t.cyx * x + t.cyy * y * u;
  f.x = std::hypot(bx_t, bx_z);
  f.y = std::hypot(by_t, by_z);
  if (f.x > 0.0) {
    f.cos_x = bx_z / f.x;
    f.sgn_x = bx_t >= 0.0 ? 1.0 : -1.0;
  }
  if (f.y > 0.0) {
    f.cos_y = by_z / f.y;
    f.sgn_y = by_t >= 0.0 ? 1.0 : -1.0;
  }
  return f;
}

ThreeBodySystem build_system(std::array<Particle, 3> particles,
                             double reference_mass) {
  return ThreeBodySystem(particles, reference_mass);
}

Complex channel_momentum(double E, double E_a) {
  const double d = E - E_a;
  if (d >= 0.0) return Complex(std::sqrt(d), 0.0);
  return Complex(0.0, std::sqrt(-d));
}

Complex channel_momentum(double E, const BinaryChannel& chan) {
  return channel_momentum(E, chan.E_a);
}

} // namespace fmscat

#include <doctest.h>

#include <cmath>
#include <random>

#include "fmscat/kinematics.hpp"

using namespace fmscat;

namespace {
ThreeBodySystem eep() {
  return build_system(
      {Particle{1.0, -1.0}, Particle{1.0, -1.0}, Particle{1836.152673, 1.0}}, 1.0);
}
ThreeBodySystem positronium_ion() {
  return build_system(
      {Particle{1.0, -1.0}, Particle{1.0, 1.0}, Particle{1.0, -1.0}}, 1.0);
}
} // namespace

TEST_CASE("equal masses give unit jacobi scales") {
  ThreeBodySystem sys = build_system(
      {Particle{1.0, 0.0}, Particle{1.0, 0.0}, Particle{1.0, 0.0}}, 1.0);
  for (int a = 0; a < 3; ++a) CHECK(sys.jacobi_scale(a) == doctest::Approx(1.0));
}

TEST_CASE("rotation matrices are orthogonal") {
  ThreeBodySystem sys = eep();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const JacobiTransform& t = sys.transform(a, b);
      CHECK(std::abs(t.cxx * t.cxx + t.cyx * t.cyx - 1.0) < 1e-14);
      CHECK(std::abs(t.cxy * t.cxy + t.cyy * t.cyy - 1.0) < 1e-14);
      CHECK(std::abs(t.cxx * t.cxy + t.cyx * t.cyy) < 1e-14);
      CHECK(std::abs(std::abs(t.cxx * t.cyy - t.cxy * t.cyx) - 1.0) < 1e-14);
    }
}

TEST_CASE("norm x^2+y^2 preserved on random points") {
  ThreeBodySystem sys = positronium_ion();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ur(0.05, 40.0), uu(-1.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    const double x = ur(rng), y = ur(rng), u = uu(rng);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        RotatedFrame f = sys.rotate(a, b, x, y, u);
        CHECK(std::abs(f.x * f.x + f.y * f.y - (x * x + y * y)) <
              1e-13 * (x * x + y * y));
      }
  }
}

TEST_CASE("transform composition is exact") {
  ThreeBodySystem sys = eep();
  auto mul = [](const JacobiTransform& a, const JacobiTransform& b) {
    // apply b then a
    JacobiTransform r;
    r.cxx = a.cxx * b.cxx + a.cxy * b.cyx;
    r.cxy = a.cxx * b.cxy + a.cxy * b.cyy;
    r.cyx = a.cyx * b.cxx + a.cyy * b.cyx;
    r.cyy = a.cyx * b.cxy + a.cyy * b.cyy;
    return r;
  };
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        JacobiTransform direct = sys.transform(a, c);
        JacobiTransform composed = mul(sys.transform(b, c), sys.transform(a, b));
        CHECK(std::abs(direct.cxx - composed.cxx) < 1e-14);
        CHECK(std::abs(direct.cxy - composed.cxy) < 1e-14);
        CHECK(std::abs(direct.cyx - composed.cyx) < 1e-14);
        CHECK(std::abs(direct.cyy - composed.cyy) < 1e-14);
      }
}

TEST_CASE("equal-mass rotation coefficients follow the 60-degree pattern") {
  ThreeBodySystem sys = build_system(
      {Particle{1.0, 0.0}, Particle{1.0, 0.0}, Particle{1.0, 0.0}}, 1.0);
  const JacobiTransform& t = sys.transform(0, 1);
  CHECK(std::abs(std::abs(t.cxx) - 0.5) < 1e-14);
  CHECK(std::abs(std::abs(t.cxy) - std::sqrt(3.0) / 2.0) < 1e-14);
  CHECK(std::abs(std::abs(t.cyx) - std::sqrt(3.0) / 2.0) < 1e-14);
  CHECK(std::abs(std::abs(t.cyy) - 0.5) < 1e-14);
}

TEST_CASE("channel mass factor against direct arithmetic") {
  ThreeBodySystem sys = positronium_ion(); // e- e+ e-
  // partition 1: spectator e+, pair (e-, e-)
  const double m_a = 1.0, m_b = 1.0, m_g = 1.0;
  CHECK(sys.channel_mass_factor(1) ==
        doctest::Approx(m_a * (m_b + m_g) / (m_a + m_b + m_g)).epsilon(1e-15));
  // e+ vs (e- p)-style check on the e-e-p system
  ThreeBodySystem h = eep();
  const double mp = 1836.152673;
  CHECK(h.channel_mass_factor(0) ==
        doctest::Approx(1.0 * (1.0 + mp) / (2.0 + mp)).epsilon(1e-15));
}

TEST_CASE("scales invariant under relabeling the pair") {
  // swap the two pair particles of partition 0 (indices 1 and 2)
  ThreeBodySystem a = build_system(
      {Particle{1.0, -1.0}, Particle{2.5, 1.0}, Particle{7.0, -1.0}}, 1.0);
  ThreeBodySystem b = build_system(
      {Particle{1.0, -1.0}, Particle{7.0, -1.0}, Particle{2.5, 1.0}}, 1.0);
  CHECK(a.jacobi_scale(0) == doctest::Approx(b.jacobi_scale(0)).epsilon(1e-15));
  CHECK(a.channel_mass_factor(0) ==
        doctest::Approx(b.channel_mass_factor(0)).epsilon(1e-15));
}

TEST_CASE("channel momentum") {
  BinaryChannel ch;
  ch.E_a = -0.25;
  CHECK(std::abs(channel_momentum(-0.25, ch)) == 0.0);
  CHECK(channel_momentum(0.0, ch).real() == doctest::Approx(0.5));
  // Ps(n=2) threshold: q(Ps(1s)) = sqrt(0.25 - 0.0625)
  CHECK(channel_momentum(-0.0625, ch).real() ==
        doctest::Approx(std::sqrt(0.25 - 0.0625)).epsilon(1e-15));
  // closed channel: positive imaginary branch
  Complex qc = channel_momentum(-0.3, ch);
  CHECK(qc.real() == 0.0);
  CHECK(qc.imag() > 0.0);
  // monotone in E for open channels
  double prev = 0.0;
  for (double E = -0.24; E < 0.5; E += 0.05) {
    const double q = channel_momentum(E, ch).real();
    CHECK(q > prev);
    prev = q;
  }
}

TEST_CASE("nonpositive mass rejected") {
  CHECK_THROWS_AS(build_system({Particle{0.0, 0.0}, Particle{1.0, 0.0},
                                Particle{1.0, 0.0}},
                               1.0),
                  ConfigError);
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "fmscat/potentials.hpp"

using namespace fmscat;

namespace {
ThreeBodySystem ePs() {
  return build_system(
      {Particle{1.0, -1.0}, Particle{1.0, 1.0}, Particle{1.0, -1.0}}, 1.0);
}
} // namespace

TEST_CASE("Merkuriev cut-off values") {
  MerkurievCutoff cut{2.0, 10.0, 2.1};
  for (double y : {0.0, 3.0, 50.0}) CHECK(cut.chi(0.0, y) == doctest::Approx(1.0));
  CHECK(cut.chi(2.0, 0.0) == doctest::Approx(2.0 / (1.0 + std::exp(1.0))));
  CHECK(cut.chi(100.0, 5.0) < 1e-100);
  // monotone increasing in y at fixed x
  double prev = 0.0;
  for (double y = 0.0; y < 60.0; y += 3.0) {
    const double c = cut.chi(5.0, y);
    CHECK(c >= prev);
    prev = c;
  }
  CHECK_THROWS_AS((MerkurievCutoff{1.0, 10.0, 2.0}.validate()), ConfigError);
}

TEST_CASE("splitting identity V^s + V^l = V") {
  PotentialModel m = default_potential_model(ePs());
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ux(1e-3, 50.0), uy(1e-3, 80.0);
  double maxerr = 0.0, maxerr_c = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const double x = ux(rng), y = uy(rng);
    for (int a = 0; a < 3; ++a) {
      maxerr = std::max(maxerr,
                        std::abs(m.Vs(a, x, y) + m.Vl(a, x, y) - m.V(a, x)));
      const Complex c = m.Vs_scaled(a, x, y, 0.12) + m.Vl_scaled(a, x, y, 0.12) -
                        m.V_scaled(a, x, 0.12);
      maxerr_c = std::max(maxerr_c, std::abs(c));
    }
  }
  CHECK(maxerr < 1e-14);
  CHECK(maxerr_c < 1e-12);
}

TEST_CASE("V^l limits") {
  PotentialModel m = default_potential_model(ePs());
  const double x0 = m.pair(0).cutoff->x0;
  //短 small x: the 0*inf limit resolves to zero
  CHECK(std::abs(m.Vl(0, 1e-6 * x0, 3.0)) < 1e-9);
  // large x: the full potential survives
  CHECK(m.Vl(0, 20.0 * x0, 1.0) / m.V(0, 20.0 * x0) > 0.999);
}

TEST_CASE("W vanishes when the cut-offs are forced wide open") {
  ThreeBodySystem sys = ePs();
  std::array<PairInteraction, 3> pairs;
  for (int a = 0; a < 3; ++a) {
    pairs[a].strength = sys.coulomb_strength(a);
    pairs[a].cutoff = MerkurievCutoff{1e7, 10.0, 2.1}; // chi ~= 1 everywhere
  }
  PotentialModel m(sys, pairs, {});
  for (double u : {-0.7, 0.1, 0.9})
    CHECK(std::abs(m.W(0, 2.0, 7.0, u)) < 1e-10);
}

TEST_CASE("W approaches the bare pair sum far from both pairs") {
  ThreeBodySystem sys = ePs();
  PotentialModel m = default_potential_model(sys);
  const double x = 1.0, y = 600.0, u = 0.4;
  double bare = 0.0;
  for (int d = 1; d <= 2; ++d) {
    const RotatedFrame f = sys.rotate(0, d, x, y, u);
    CHECK(f.x > 40.0 * m.pair(0).cutoff->x0);
    bare += m.V(d, f.x);
  }
  CHECK(std::abs(m.W(0, x, y, u) - bare) < 1e-3 * std::abs(bare));
}

TEST_CASE("W invariant under relabeling the pair with u -> -u") {
  // swapping the pair particles of partition 0 flips x_0
  ThreeBodySystem a = build_system(
      {Particle{1836.152673, 1.0}, Particle{1.0, 1.0}, Particle{1.0, -1.0}}, 1.0);
  ThreeBodySystem b = build_system(
      {Particle{1836.152673, 1.0}, Particle{1.0, -1.0}, Particle{1.0, 1.0}}, 1.0);
  PotentialModel ma = default_potential_model(a);
  PotentialModel mb = default_potential_model(b);
  for (double u : {-0.9, -0.2, 0.5})
    CHECK(ma.W(0, 1.7, 6.0, u) == doctest::Approx(mb.W(0, 1.7, 6.0, -u)).epsilon(1e-12));
}

TEST_CASE("screening profile") {
  ScreeningProfile s{32.0, 5.5, 2.0};
  CHECK(s.factor(16.0) == 1.0);
  CHECK(s.factor(31.9999) == 1.0);
  CHECK(s.factor(32.0 + 5.5) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK_THROWS_AS((ScreeningProfile{32.0, 5.5, 1.0}.validate()), ConfigError);
}

TEST_CASE("complex scaling reduces to the real evaluator at theta = 0") {
  PotentialModel m = default_potential_model(ePs());
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ux(0.01, 40.0);
  for (int t = 0; t < 2000; ++t) {
    const double x = ux(rng), y = ux(rng);
    for (int a = 0; a < 3; ++a) {
      CHECK(std::abs(m.Vs_scaled(a, x, y, 0.0) - m.Vs(a, x, y)) < 1e-15);
      CHECK(std::abs(m.chi_scaled(a, x, y, 0.0) - m.chi(a, x, y)) < 1e-15);
    }
  }
}

TEST_CASE("scaled Coulomb has unchanged modulus and rotated phase") {
  PotentialModel m = default_potential_model(ePs());
  const double th = deg2rad(8.0);
  const Complex v = m.V_scaled(0, 3.0, th);
  CHECK(std::abs(std::abs(v) - std::abs(m.V(0, 3.0))) < 1e-15);
  CHECK(std::arg(v) == doctest::Approx(-th + PI).epsilon(1e-12)); // attractive
}

TEST_CASE("scaled cut-off matches its Taylor continuation at small theta") {
  MerkurievCutoff cut{3.0, 10.0, 2.1};
  const double x = 2.2, y = 7.0;
  // real-dilation derivatives d^k/ds^k chi(x e^s, y e^s) at s = 0
  auto chi_s = [&](double s) { return cut.chi(x * std::exp(s), y * std::exp(s)); };
  const double h = 0.01;
  const double c0 = chi_s(0.0);
  const double c1 = (chi_s(h) - chi_s(-h)) / (2 * h);
  const double c2 = (chi_s(h) - 2 * c0 + chi_s(-h)) / (h * h);
  const Complex s(0.0, deg2rad(0.5));
  const Complex taylor = c0 + s * c1 + 0.5 * s * s * c2;
  CHECK(std::abs(cut.chi_scaled(x, y, s.imag()) - taylor) < 1e-6);
}

TEST_CASE("branch guard rejects large angles") {
  PotentialModel m = default_potential_model(ePs());
  CHECK_THROWS_AS(ScaledPotentialEvaluator(m, deg2rad(44.0)), ConfigError);
  ScaledPotentialEvaluator ev(m, deg2rad(8.0));
  CHECK(std::abs(ev.V(0, 2.0)) > 0.0);
}

TEST_CASE("summed FM potential terms reproduce the total potential") {
  // algebraic content of recovering the Schroedinger equation from the three
  // component equations, checked pointwise with arbitrary component values
  ThreeBodySystem sys = ePs();
  PotentialModel m = default_potential_model(sys);
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> ux(0.05, 30.0), uu(-1.0, 1.0),
      up(-2.0, 2.0);
  double maxrel = 0.0;
  for (int t = 0; t < 500; ++t) {
    const double x = ux(rng), y = ux(rng), u = uu(rng);
    const double psi[3] = {up(rng), up(rng), up(rng)};
    double Vtot = 0.0, lhs = 0.0;
    for (int d = 0; d < 3; ++d) {
      const RotatedFrame fd = sys.rotate(0, d, x, y, u);
      Vtot += m.V(d, fd.x);
    }
    for (int a = 0; a < 3; ++a) {
      const RotatedFrame fa = sys.rotate(0, a, x, y, u);
      const double sx = std::sqrt(std::max(0.0, 1.0 - fa.cos_x * fa.cos_x));
      const double sy = std::sqrt(std::max(0.0, 1.0 - fa.cos_y * fa.cos_y));
      const double ua = fa.cos_x * fa.cos_y + fa.sgn_x * fa.sgn_y * sx * sy;
      lhs += (m.V(a, fa.x) + m.W(a, fa.x, fa.y, ua)) * psi[a];
      for (int b = 0; b < 3; ++b)
        if (b != a) lhs += m.Vs(a, fa.x, fa.y) * psi[b];
    }
    const double scale = std::abs(Vtot) * 2.0 + 1.0;
    maxrel = std::max(maxrel, std::abs(lhs - Vtot * (psi[0] + psi[1] + psi[2])) /
                                  scale);
  }
  CHECK(maxrel < 1e-10);
}

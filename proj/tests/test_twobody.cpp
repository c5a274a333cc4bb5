#include <doctest.h>

#include <cmath>

#include "fmscat/twobody.hpp"

using namespace fmscat;

namespace {
ThreeBodySystem eH() {
  return build_system(
      {Particle{1.0, -1.0}, Particle{1.0, -1.0}, Particle{1836.152673, 1.0}}, 1.0);
}
ThreeBodySystem ePs() {
  return build_system(
      {Particle{1.0, -1.0}, Particle{1.0, 1.0}, Particle{1.0, -1.0}}, 1.0);
}
} // namespace

TEST_CASE("hydrogen binding with the physical proton mass") {
  auto [st, ch] = hydrogenic_bound_state(eH(), 0, 1, 0);
  const double mu = 1836.152673 / 1837.152673;
  CHECK(ch.E_a == doctest::Approx(-mu / 2.0).epsilon(1e-12));
  CHECK(ch.E_a == doctest::Approx(-0.4997278).epsilon(1e-6));
}

TEST_CASE("positronium binding is exactly -1/4") {
  auto [st, ch] = hydrogenic_bound_state(ePs(), 0, 1, 0);
  CHECK(ch.E_a == doctest::Approx(-0.25).epsilon(1e-15));
  auto [st2, ch2] = hydrogenic_bound_state(ePs(), 0, 2, 0);
  CHECK(ch2.E_a == doctest::Approx(-0.0625).epsilon(1e-15));
}

TEST_CASE("radial node counts") {
  auto [s2p, c2p] = hydrogenic_bound_state(ePs(), 0, 2, 1);
  auto [s3s, c3s] = hydrogenic_bound_state(ePs(), 0, 3, 0);
  auto count_nodes = [](const HydrogenicState& s) {
    int nodes = 0;
    double prev = s.eval(0.05);
    for (double x = 0.1; x < 200.0; x += 0.05) {
      const double v = s.eval(x);
      if (prev * v < 0.0) ++nodes;
      if (v != 0.0) prev = v;
    }
    return nodes;
  };
  CHECK(count_nodes(s2p) == 0);
  CHECK(count_nodes(s3s) == 2);
  CHECK(s2p.radial_nodes() == 0);
}

TEST_CASE("normalization and dipole integral against a fine grid") {
  auto [a, ca] = hydrogenic_bound_state(ePs(), 0, 1, 0);
  auto [b, cb] = hydrogenic_bound_state(ePs(), 0, 2, 1);
  double norm = 0.0, dip = 0.0;
  const double dx = 5e-4;
  for (int i = 1; i < 400000; ++i) {
    const double x = i * dx;
    norm += a.eval(x) * a.eval(x) * dx;
    dip += a.eval(x) * x * b.eval(x) * dx;
  }
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(dipole_radial(a, b) == doctest::Approx(dip).epsilon(1e-8));
}

TEST_CASE("same-sign pair has no bound state") {
  CHECK_THROWS_AS(hydrogenic_bound_state(ePs(), 1, 1, 0), ConfigError);
}

TEST_CASE("mesh spectra reproduce the analytic levels") {
  LagrangeLaguerreBasis b(40, 0.35);
  PairSpectrum h = diagonalize_pair_on_mesh(b, 0, -std::sqrt(2.0));
  CHECK(std::abs(h.energies(0) + 0.5) < 1e-10);
  CHECK(std::abs(h.energies(1) + 0.125) < 1e-8);
  LagrangeLaguerreBasis bps(40, 0.5);
  PairSpectrum ps = diagonalize_pair_on_mesh(bps, 0, -1.0);
  CHECK(std::abs(ps.energies(0) + 0.25) < 1e-10);
}

TEST_CASE("bound-state energy stable over a factor-2 window in h") {
  for (double h : {0.3, 0.45, 0.6}) {
    LagrangeLaguerreBasis b(40, h);
    PairSpectrum sp = diagonalize_pair_on_mesh(b, 0, -std::sqrt(2.0));
    CHECK(std::abs(sp.energies(0) + 0.5) < 1e-9);
  }
}

TEST_CASE("analytic and mesh ground states overlap") {
  auto [st, ch] = hydrogenic_bound_state(ePs(), 0, 1, 0);
  LagrangeLaguerreBasis b(40, 0.5);
  PairSpectrum sp = diagonalize_pair_on_mesh(b, 0, -1.0);
  double overlap = 0.0;
  for (int i = 0; i < b.size(); ++i)
    overlap += std::sqrt(b.weight(i)) * sp.vectors(i, 0) * st.eval(b.node(i));
  CHECK(std::abs(overlap) > 1.0 - 1e-8);
}

TEST_CASE("free wave wrappers") {
  FreeWave jw{1, Complex(0.7, 0.0), false};
  FreeWave hw{1, Complex(0.7, 0.0), true};
  const Complex z = 0.7 * 5.0;
  CHECK(std::abs(jw.eval(5.0) - (std::sin(z.real()) / z.real() -
                                 std::cos(z.real())) *
                                    1.0) < 1e-12);
  CHECK(std::abs(jw.eval(5.0) * hw.eval(5.0)) > 0.0);
}

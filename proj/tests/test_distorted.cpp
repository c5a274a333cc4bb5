#include <doctest.h>

#include <cmath>
#include <memory>

#include "fmscat/angular.hpp"
#include "fmscat/distorted_waves.hpp"
#include "fmscat/special.hpp"

using namespace fmscat;

namespace {
ThreeBodySystem pPs() {
  return build_system(
      {Particle{1836.152673, 1.0}, Particle{1.0, 1.0}, Particle{1.0, -1.0}}, 1.0);
}

std::shared_ptr<AuxiliaryPotential> single_channel(
    const ThreeBodySystem& sys, std::function<void(Complex, Eigen::MatrixXcd&)> lam) {
  auto [st, ch] = hydrogenic_bound_state(sys, 0, 1, 0);
  return std::make_shared<AuxiliaryPotential>(AuxiliaryPotential::custom(
      0, 0, {AuxChannel{st, ch, 0}}, std::move(lam)));
}
} // namespace

TEST_CASE("free variant couples nothing") {
  ThreeBodySystem sys = pPs();
  AuxiliaryPotential aux = AuxiliaryPotential::build(
      AuxiliaryPotential::Variant::Free, sys, 0, 1, 0);
  CHECK(aux.size() == 1);
  Eigen::MatrixXcd lam(1, 1);
  aux.lambda(Complex(5.0), lam);
  CHECK(std::abs(lam(0, 0)) == 0.0);
}

TEST_CASE("dipole selection rule kills s-s couplings") {
  ThreeBodySystem sys = pPs();
  AuxiliaryPotential aux = AuxiliaryPotential::build(
      AuxiliaryPotential::Variant::Dipole, sys, 0, 2, 0);
  const int i1s = aux.find_channel(1, 0, 0);
  const int i2s = aux.find_channel(2, 0, 0);
  const int i2p = aux.find_channel(2, 1, 1);
  REQUIRE(i1s >= 0);
  REQUIRE(i2s >= 0);
  REQUIRE(i2p >= 0);
  Eigen::MatrixXcd lam(3, 3);
  aux.lambda(Complex(12.0), lam);
  CHECK(std::abs(lam(i1s, i2s)) == 0.0);
  CHECK(std::abs(lam(i1s, i1s)) == 0.0);
  CHECK(std::abs(lam(i1s, i2p)) > 0.0);
  CHECK(std::abs(lam(i1s, i2p) - lam(i2p, i1s)) < 1e-15);
}

TEST_CASE("dipole coupling matches the regularized closed form") {
  ThreeBodySystem sys = pPs();
  AuxiliaryPotential aux = AuxiliaryPotential::build(
      AuxiliaryPotential::Variant::Dipole, sys, 0, 2, 0);
  auto [s1, c1] = hydrogenic_bound_state(sys, 0, 1, 0);
  auto [s2, c2] = hydrogenic_bound_state(sys, 0, 2, 1);
  const double d = dipole_radial(s1, s2);
  const double ang = pk_bipolar_element(1, 0, 0, 1, 1, 0);
  const double C = aux.dipole_coefficient();
  const double y = 9.0;
  const double yreg = y + 8.0 / (y * y); // n_a^3 n_b^3 = 8
  Eigen::MatrixXcd lam(aux.size(), aux.size());
  aux.lambda(Complex(y), lam);
  const int i1s = aux.find_channel(1, 0, 0), i2p = aux.find_channel(2, 1, 1);
  CHECK(lam(i1s, i2p).real() ==
        doctest::Approx(-C * d * ang / (yreg * yreg)).epsilon(1e-12));
}

TEST_CASE("dipole coefficient reproduces the asymptotic W tail") {
  // W_0(x,y,u) -> -C x u / y^2 for a neutral pair; C from the scaled frames
  ThreeBodySystem sys = pPs();
  PotentialModel m = default_potential_model(sys);
  AuxiliaryPotential aux = AuxiliaryPotential::build(
      AuxiliaryPotential::Variant::Dipole, sys, 0, 2, 0);
  const double C = aux.dipole_coefficient();
  const double x = 0.8, u = 0.6;
  for (double y : {200.0, 400.0}) {
    const double w = m.W(0, x, y, u);
    const double dip = -C * x * u / (y * y);
    CHECK(std::abs(w - dip) < 30.0 / (y * y * y)); // next order is 1/y^3
  }
}

TEST_CASE("free motion through the solver: g = jhat, Atilde = 0") {
  ThreeBodySystem sys = pPs();
  auto aux = single_channel(sys, [](Complex, Eigen::MatrixXcd& m) { m.setZero(); });
  const double E = -0.1, q = std::sqrt(E + 0.25);
  DistortedWave w = solve_coupled_channels(aux, E, 0, {});
  CHECK(std::abs(w.Atilde(0)) < 1e-8);
  for (double y : {3.0, 17.0, 55.0, 120.0})
    CHECK(std::abs(w.g(0, y) - riccati_j(0, Complex(q * y, 0))) < 1e-6);
}

TEST_CASE("weak potential follows the Born integral to O(eps^2)") {
  ThreeBodySystem sys = pPs();
  const double E = -0.05, q = std::sqrt(E + 0.25);
  double ratio_prev = 0.0;
  for (double eps : {1e-3, 1e-2}) {
    auto aux = single_channel(sys, [eps](Complex y, Eigen::MatrixXcd& m) {
      m(0, 0) = eps * std::exp(-(y * y) / 100.0);
    });
    DistortedWave w = solve_coupled_channels(aux, E, 0, {});
    double born = 0.0;
    const double dy = 5e-4;
    for (int i = 1; i < 120000; ++i) {
      const double y = i * dy;
      const double j = std::sin(q * y);
      born += -1.0 / q * j * eps * std::exp(-y * y / 100.0) * j * dy;
    }
    const double ratio = std::abs(w.Atilde(0) - born) / (eps * eps);
    if (ratio_prev > 0.0)
      CHECK(ratio == doctest::Approx(ratio_prev).epsilon(0.05));
    ratio_prev = ratio;
  }
}

TEST_CASE("two open dipole-coupled channels: unitary, symmetric S") {
  ThreeBodySystem sys = pPs();
  auto [s1, c1] = hydrogenic_bound_state(sys, 0, 1, 0);
  auto [s2, c2] = hydrogenic_bound_state(sys, 0, 2, 1);
  const double C = 3.9956, d = dipole_radial(s1, s2);
  const double ang = pk_bipolar_element(1, 0, 0, 1, 1, 0);
  auto lam = [=](Complex y, Eigen::MatrixXcd& m) {
    const Complex reg = y + 8.0 / (y * y);
    m.setZero();
    m(0, 1) = m(1, 0) = -C * d * ang / (reg * reg);
  };
  auto aux = std::make_shared<AuxiliaryPotential>(AuxiliaryPotential::custom(
      0, 0, {AuxChannel{s1, c1, 0}, AuxChannel{s2, c2, 1}}, lam));
  const double E = -0.03;
  CCOptions opt;
  opt.r_match = 2000.0;
  opt.step = 0.02;
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Identity(2, 2);
  for (int e = 0; e < 2; ++e) {
    DistortedWave w = solve_coupled_channels(aux, E, e, opt);
    for (int b = 0; b < 2; ++b) S(b, e) += 2.0 * Complex(0, 1) * w.Atilde(b);
  }
  CHECK((S.adjoint() * S - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-8);
  CHECK(std::abs(S(0, 1) - S(1, 0)) < 1e-8);
}

TEST_CASE("closed channels decay below the matching radius") {
  ThreeBodySystem sys = pPs();
  AuxiliaryPotential aux = AuxiliaryPotential::build(
      AuxiliaryPotential::Variant::Dipole, sys, 0, 2, 0);
  auto sp = std::make_shared<AuxiliaryPotential>(aux);
  const double E = -0.09; // Ps(n=2) closed, kappa R ~ 25
  DistortedWave w = solve_coupled_channels(sp, E, 0, {});
  CHECK(w.closed_channel_leak() < 1e-10);
}

TEST_CASE("complex-scaled solve continues the unscaled one") {
  ThreeBodySystem sys = pPs();
  // compact dipole-shaped coupling (entire function) keeps matching-radius
  // tails out of the comparison: the continuation must then be exact
  auto [s1, c1] = hydrogenic_bound_state(sys, 0, 1, 0);
  auto [s2, c2] = hydrogenic_bound_state(sys, 0, 2, 1);
  auto lam = [](Complex y, Eigen::MatrixXcd& m) {
    Complex y4 = y / 20.0;
    y4 = y4 * y4 * y4 * y4;
    const Complex reg = y + 8.0 / (y * y);
    m.setZero();
    m(0, 1) = m(1, 0) = -6.0 * std::exp(-y4) / (reg * reg);
  };
  auto aux = std::make_shared<AuxiliaryPotential>(AuxiliaryPotential::custom(
      0, 0, {AuxChannel{s1, c1, 0}, AuxChannel{s2, c2, 1}}, lam));
  const double E = -0.2;
  DistortedWave w0 = solve_coupled_channels(aux, E, 0, {});
  CCOptions oc;
  oc.theta = deg2rad(5.0);
  DistortedWave wt = solve_coupled_channels(aux, E, 0, oc);
  // amplitudes are theta-independent for an analytic compact potential
  CHECK(std::abs(wt.Atilde(0) - w0.Atilde(0)) < 1e-7);

  // wave matches the power series of g(y e^{i theta}) in s = i theta, with
  // y-derivatives from dense 5-point stencils on the solver grid
  const double y = 4.0, d = 0.04;
  for (int ch : {0, 1}) {
    auto g = [&](double yy) { return w0.g(ch, yy); };
    const Complex g0 = g(y);
    const Complex g1 =
        (-g(y + 2 * d) + 8.0 * g(y + d) - 8.0 * g(y - d) + g(y - 2 * d)) /
        (12.0 * d);
    const Complex g2 = (-g(y + 2 * d) + 16.0 * g(y + d) - 30.0 * g0 +
                        16.0 * g(y - d) - g(y - 2 * d)) /
                       (12.0 * d * d);
    const Complex g3 = (g(y + 2 * d) - 2.0 * g(y + d) + 2.0 * g(y - d) -
                        g(y - 2 * d)) /
                       (2.0 * d * d * d);
    const Complex g4 = (g(y + 2 * d) - 4.0 * g(y + d) + 6.0 * g0 -
                        4.0 * g(y - d) + g(y - 2 * d)) /
                       (d * d * d * d);
    const Complex s(0.0, deg2rad(5.0));
    // (y d/dy)^n chain for f(y e^s)
    const Complex t1 = y * g1;
    const Complex t2 = y * g1 + y * y * g2;
    const Complex t3 = y * g1 + 3.0 * y * y * g2 + y * y * y * g3;
    const Complex t4 = y * g1 + 7.0 * y * y * g2 + 6.0 * y * y * y * g3 +
                       y * y * y * y * g4;
    const Complex taylor =
        g0 + s * t1 + s * s / 2.0 * t2 + s * s * s / 6.0 * t3 +
        s * s * s * s / 24.0 * t4;
    CHECK(std::abs(wt.g(ch, y) - taylor) < 1e-6);
  }
}

TEST_CASE("free closed form equals the CS-solved free wave") {
  ThreeBodySystem sys = pPs();
  auto aux = single_channel(sys, [](Complex, Eigen::MatrixXcd& m) { m.setZero(); });
  auto auxfree = std::make_shared<AuxiliaryPotential>(AuxiliaryPotential::build(
      AuxiliaryPotential::Variant::Free, sys, 0, 1, 0));
  const double E = -0.12, th = deg2rad(7.0);
  CCOptions oc;
  oc.theta = th;
  DistortedWave ode = solve_coupled_channels(aux, E, 0, oc);
  DistortedWave closed = make_free_wave(auxfree, E, th);
  for (double y : {2.0, 11.0, 40.0, 90.0})
    CHECK(std::abs(ode.g(0, y) - closed.g(0, y)) <
          1e-6 * std::max(1.0, std::abs(closed.g(0, y))));
}

TEST_CASE("matching-radius diагnostic fires on slow tails") {
  // an artificial slowly decaying diagonal potential cannot be matched
  // against free solutions at a short radius
  ThreeBodySystem sys = pPs();
  auto aux = single_channel(sys, [](Complex y, Eigen::MatrixXcd& m) {
    m(0, 0) = -0.5 / (1.0 + y); // 1/y tail
  });
  CCOptions opt;
  opt.r_match = 60.0;
  CHECK_THROWS_AS(solve_coupled_channels(aux, -0.2, 0, opt), NumericError);
}

TEST_CASE("polarization variant adds an attractive entrance diagonal") {
  ThreeBodySystem sys = pPs();
  AuxiliaryPotential aux = AuxiliaryPotential::build(
      AuxiliaryPotential::Variant::DipolePolarization, sys, 0, 2, 0);
  Eigen::MatrixXcd lam(aux.size(), aux.size());
  const int e = aux.find_channel(1, 0, 0);
  for (double y : {8.0, 20.0, 40.0}) {
    aux.lambda(Complex(y), lam);
    CHECK(lam(e, e).real() < 0.0);
  }
  // far tail scales like 1/y^4
  Eigen::MatrixXcd l1(aux.size(), aux.size()), l2(aux.size(), aux.size());
  aux.lambda(Complex(200.0), l1);
  aux.lambda(Complex(400.0), l2);
  CHECK(l1(e, e).real() / l2(e, e).real() == doctest::Approx(16.0).epsilon(0.05));
}

TEST_CASE("reciprocity of the auxiliary amplitudes") {
  ThreeBodySystem sys = pPs();
  AuxiliaryPotential aux = AuxiliaryPotential::build(
      AuxiliaryPotential::Variant::Dipole, sys, 0, 2, 0);
  auto sp = std::make_shared<AuxiliaryPotential>(aux);
  const double E = -0.04; // all three channels open
  CCOptions opt;
  opt.r_match = 1500.0;
  opt.step = 0.02;
  opt.check_matching = false; // open degenerate 2s-2p pair converges slowly
  const int n = sp->size();
  Eigen::MatrixXcd At(n, n);
  for (int e = 0; e < n; ++e) {
    DistortedWave w = solve_coupled_channels(sp, E, e, opt);
    for (int b = 0; b < n; ++b) At(b, e) = w.Atilde(b);
  }
  CHECK((At - At.transpose()).cwiseAbs().maxCoeff() < 1e-8);
}

#include <doctest.h>

#include <cmath>

#include "fmscat/angular.hpp"
#include "fmscat/mesh.hpp"
#include "fmscat/special.hpp"

using namespace fmscat;

TEST_CASE("riccati j at the standard points") {
  CHECK(std::abs(riccati_j(0, Complex(PI / 2, 0)) - 1.0) < 1e-15);
  // small-z leading behavior j_l(z)/z^{l+1} -> 1/(2l+1)!!
  for (int l = 0; l <= 3; ++l) {
    double dfact = 1.0;
    for (int k = 3; k <= 2 * l + 1; k += 2) dfact *= k;
    const Complex z(2e-4, 0.0);
    const Complex r = riccati_j(l, z) / std::pow(z, l + 1) * dfact;
    // two-term series residual is z^2/(2(2l+3))
    CHECK(std::abs(r - (1.0 - z * z / (2.0 * (2.0 * l + 3.0)))) < 1e-12);
  }
}

TEST_CASE("riccati j against the standard library for real arguments") {
  for (int l = 0; l <= 12; ++l)
    for (double z : {0.4, 2.7, 9.0, 23.0, 50.0}) {
      const double ref = z * std::sph_bessel(l, z);
      CHECK(std::abs(riccati_j(l, Complex(z, 0)) - ref) <
            1e-10 * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("Wronskian identity of the riccati pair") {
  for (int l : {0, 2, 5}) {
    for (Complex z : {Complex(2.7, 0.0), Complex(1.3, 0.8), Complex(8.0, -0.5)}) {
      const Complex w = riccati_j(l, z) * riccati_h_plus_deriv(l, z) -
                        riccati_j_deriv(l, z) * riccati_h_plus(l, z);
      CHECK(std::abs(w - Complex(0, 1)) < 1e-12);
    }
  }
  CHECK(std::abs(riccati_h_plus(0, Complex(1.7, 0.3)) -
                 Complex(0, -1) * std::exp(Complex(0, 1) * Complex(1.7, 0.3))) <
        1e-15);
}

TEST_CASE("clebsch and 3j basics") {
  CHECK(clebsch(1, 0, 1, 0, 2, 0) == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(clebsch(1, 1, 1, -1, 0, 0) == doctest::Approx(std::sqrt(1.0 / 3.0)));
  CHECK(wigner3j(1, 1, 2, 0, 0, 0) == doctest::Approx(std::sqrt(2.0 / 15.0)));
  // orthogonality: sum_m (2J+1) 3j^2 = 1
  for (int J : {0, 1, 2, 3}) {
    double s = 0.0;
    for (int m = -2; m <= 2; ++m)
      s += (2.0 * J + 1.0) * std::pow(wigner3j(2, J, 2, m, 0, -m), 2);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("P_k bipolar element against an explicit magnetic sum") {
  // independent evaluation: P_k = 4pi/(2k+1) sum_q Y*_kq(x) Y_kq(y) and
  // Gaunt integrals written out with Clebsch-Gordan coefficients
  auto gaunt = [](int l1, int m1, int k, int q, int l3, int m3) {
    if (m1 != q + m3) return 0.0;
    return std::sqrt((2.0 * k + 1.0) * (2.0 * l3 + 1.0) /
                     (4.0 * PI * (2.0 * l1 + 1.0))) *
           clebsch(k, 0, l3, 0, l1, 0) * clebsch(k, q, l3, m3, l1, m1);
  };
  for (int k : {0, 1, 2})
    for (int L : {0, 1, 2})
      for (int l1 : {0, 1, 2})
        for (int l3 : {0, 1, 2}) {
          const int l2 = L, l4 = std::abs(L - (l3 - l1)) % 3 + std::abs(l3 - 1);
          for (int l2b = std::abs(L - l1); l2b <= L + l1 && l2b <= 3; ++l2b)
            for (int l4b = std::abs(L - l3); l4b <= L + l3 && l4b <= 3; ++l4b) {
              double direct = 0.0;
              for (int M = -L; M <= L; ++M)
                for (int m1 = -l1; m1 <= l1; ++m1)
                  for (int m3 = -l3; m3 <= l3; ++m3)
                    for (int q = -k; q <= k; ++q) {
                      const double c1 = clebsch(l1, m1, l2b, M - m1, L, M);
                      const double c2 = clebsch(l3, m3, l4b, M - m3, L, M);
                      if (c1 == 0.0 || c2 == 0.0) continue;
                      const double gx = gaunt(l1, m1, k, -q, l3, m3) *
                                        ((q % 2) ? -1.0 : 1.0);
                      const double gy = gaunt(l2b, M - m1, k, q, l4b, M - m3);
                      direct += c1 * c2 * gx * gy * 4.0 * PI / (2.0 * k + 1.0);
                    }
              direct /= (2.0 * L + 1.0);
              CHECK(std::abs(pk_bipolar_element(k, l1, l2b, l3, l4b, L) -
                             direct) < 1e-12);
            }
          (void)l2;
          (void)l4;
        }
}

TEST_CASE("bipolar kernel closes the orthonormality and P_k reductions") {
  for (int L : {0, 1, 2}) {
    BipolarContractor bc(L, 4);
    AngularGrid g = gauss_legendre(28);
    DirTables t;
    double maxid = 0.0, maxpk = 0.0;
    for (int l1 = 0; l1 <= 3; ++l1)
      for (int l2 = std::abs(L - l1); l2 <= std::min(3, L + l1); ++l2)
        for (int l3 = 0; l3 <= 3; ++l3)
          for (int l4 = std::abs(L - l3); l4 <= std::min(3, L + l3); ++l4) {
            double sid = 0.0, spk = 0.0;
            for (int k = 0; k < g.order(); ++k) {
              const double u = g.abscissas[k];
              bc.prepare(u, InPlaneDir{1.0, 1.0}, InPlaneDir{u, 1.0}, t);
              const double kv = bc.contract(l1, l2, l3, l4, t);
              sid += g.weights[k] * kv;
              spk += g.weights[k] * legendre_p(2, u) * kv;
            }
            const double norm = 8.0 * PI * PI / (2.0 * L + 1.0);
            const double expect = (l1 == l3 && l2 == l4) ? 1.0 : 0.0;
            maxid = std::max(maxid, std::abs(norm * sid - expect));
            maxpk = std::max(maxpk, std::abs(norm * spk -
                                             pk_bipolar_element(2, l1, l2, l3,
                                                                l4, L)));
          }
    CHECK(maxid < 1e-12);
    CHECK(maxpk < 1e-12);
  }
}

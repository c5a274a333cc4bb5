#include "fmscat/angular.hpp"

#include <array>
#include <cmath>

#include "fmscat/special.hpp"

namespace fmscat {

namespace {

constexpr int kMaxFact = 200;

const std::array<double, kMaxFact>& factorials() {
  static const std::array<double, kMaxFact> table = [] {
    std::array<double, kMaxFact> t{};
    t[0] = 1.0;
    for (int i = 1; i < kMaxFact; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  return table;
}

double fact(int n) { return factorials()[n]; }

bool triangle_ok(int a, int b, int c) {
  return c >= std::abs(a - b) && c <= a + b;
}

double triangle_coeff(int a, int b, int c) {
  return fact(a + b - c) * fact(a - b + c) * fact(-a + b + c) /
         fact(a + b + c + 1);
}

} // namespace

double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  if (m1 + m2 + m3 != 0) return 0.0;
  if (!triangle_ok(j1, j2, j3)) return 0.0;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return 0.0;
  const int kmin = std::max({0, j2 - j3 - m1, j1 - j3 + m2});
  const int kmax = std::min({j1 + j2 - j3, j1 - m1, j2 + m2});
  double sum = 0.0;
  for (int k = kmin; k <= kmax; ++k) {
    const double term = fact(k) * fact(j1 + j2 - j3 - k) * fact(j1 - m1 - k) *
                        fact(j2 + m2 - k) * fact(j3 - j2 + m1 + k) *
                        fact(j3 - j1 - m2 + k);
    sum += ((k % 2) ? -1.0 : 1.0) / term;
  }
  const double norm =
      std::sqrt(triangle_coeff(j1, j2, j3) * fact(j1 + m1) * fact(j1 - m1) *
                fact(j2 + m2) * fact(j2 - m2) * fact(j3 + m3) * fact(j3 - m3));
  const int phase = j1 - j2 - m3;
  return (phase % 2 ? -1.0 : 1.0) * norm * sum;
}

double clebsch(int j1, int m1, int j2, int m2, int J, int M) {
  if (m1 + m2 != M) return 0.0;
  const int phase = j1 - j2 + M;
  return (phase % 2 ? -1.0 : 1.0) * std::sqrt(2.0 * J + 1.0) *
         wigner3j(j1, j2, J, m1, m2, -M);
}

double wigner6j(int j1, int j2, int j3, int j4, int j5, int j6) {
  if (!triangle_ok(j1, j2, j3) || !triangle_ok(j1, j5, j6) ||
      !triangle_ok(j4, j2, j6) || !triangle_ok(j4, j5, j3))
    return 0.0;
  const double norm = std::sqrt(triangle_coeff(j1, j2, j3) *
                                triangle_coeff(j1, j5, j6) *
                                triangle_coeff(j4, j2, j6) *
                                triangle_coeff(j4, j5, j3));
  const int kmin = std::max({j1 + j2 + j3, j1 + j5 + j6, j4 + j2 + j6, j4 + j5 + j3});
  const int kmax = std::min({j1 + j2 + j4 + j5, j2 + j3 + j5 + j6, j3 + j1 + j6 + j4});
  double sum = 0.0;
  for (int k = kmin; k <= kmax; ++k) {
    const double denom = fact(k - j1 - j2 - j3) * fact(k - j1 - j5 - j6) *
                         fact(k - j4 - j2 - j6) * fact(k - j4 - j5 - j3) *
                         fact(j1 + j2 + j4 + j5 - k) *
                         fact(j2 + j3 + j5 + j6 - k) *
                         fact(j3 + j1 + j6 + j4 - k);
    sum += ((k % 2) ? -1.0 : 1.0) * fact(k + 1) / denom;
  }
  return norm * sum;
}

double pk_bipolar_element(int k, int l1, int l2, int l3, int l4, int L) {
  const double c1 = clebsch(l3, 0, k, 0, l1, 0);
  if (c1 == 0.0) return 0.0;
  const double c2 = clebsch(l4, 0, k, 0, l2, 0);
  if (c2 == 0.0) return 0.0;
  const double sixj = wigner6j(l1, l2, L, l4, l3, k);
  const int phase = l2 + l3 + L;
  return (phase % 2 ? -1.0 : 1.0) * sixj *
         std::sqrt((2.0 * l3 + 1.0) * (2.0 * l4 + 1.0)) * c1 * c2;
}

BipolarContractor::BipolarContractor(int L, int lmax) : L_(L), lmax_(lmax) {
  nm_ = 2 * lmax + 1;
  const int nl = lmax + 1;
  cg_.assign(static_cast<std::size_t>(nl) * nl * nm_ * nm_, 0.0);
  for (int l1 = 0; l1 <= lmax; ++l1)
    for (int l2 = 0; l2 <= lmax; ++l2)
      for (int m1 = -l1; m1 <= l1; ++m1)
        for (int m2 = -l2; m2 <= l2; ++m2) {
          if (std::abs(m1 + m2) > L_) continue;
          const std::size_t idx =
              ((static_cast<std::size_t>(l1) * nl + l2) * nm_ + (m1 + lmax)) * nm_ +
              (m2 + lmax);
          cg_[idx] = clebsch(l1, m1, l2, m2, L_, m1 + m2);
        }
  ynorm_.assign(static_cast<std::size_t>(nl) * nl, 0.0);
  for (int l = 0; l <= lmax; ++l)
    for (int m = 0; m <= l; ++m)
      ynorm_[static_cast<std::size_t>(l) * nl + m] =
          std::sqrt((2.0 * l + 1.0) / (4.0 * PI) * fact(l - m) / fact(l + m));
}

double BipolarContractor::cg(int l1, int m1, int l2, int m2) const {
  const int nl = lmax_ + 1;
  const std::size_t idx =
      ((static_cast<std::size_t>(l1) * nl + l2) * nm_ + (m1 + lmax_)) * nm_ +
      (m2 + lmax_);
  return cg_[idx];
}

double BipolarContractor::ylm(int l, int m, const std::vector<double>& plm,
                              double sgn) const {
  const int am = std::abs(m);
  if (am > l) return 0.0;
  double v = ynorm_[static_cast<std::size_t>(l) * (lmax_ + 1) + am] *
             plm[l * (l + 1) / 2 + am];
  if (sgn < 0.0 && (am % 2)) v = -v;
  if (m < 0 && (am % 2)) v = -v;
  return v;
}

void BipolarContractor::prepare(double u_a, InPlaneDir xb, InPlaneDir yb,
                                DirTables& t) const {
  assoc_legendre_table(lmax_, u_a, t.ya);
  assoc_legendre_table(lmax_, xb.cos, t.xb);
  assoc_legendre_table(lmax_, yb.cos, t.yb);
  t.sgn_xb = xb.sgn;
  t.sgn_yb = yb.sgn;
}

double BipolarContractor::contract(int l1, int l2, int l3, int l4,
                                   const DirTables& t) const {
  const double pref = std::sqrt((2.0 * l1 + 1.0) / (4.0 * PI));
  double sum = 0.0;
  for (int M = -L_; M <= L_; ++M) {
    const double a = cg(l1, 0, l2, M);
    if (a == 0.0) continue;
    const double ya = ylm(l2, M, t.ya, 1.0);
    if (ya == 0.0) continue;
    double inner = 0.0;
    const int mlo = std::max(-l3, M - l4), mhi = std::min(l3, M + l4);
    for (int m = mlo; m <= mhi; ++m) {
      const double b = cg(l3, m, l4, M - m);
      if (b == 0.0) continue;
      inner += b * ylm(l3, m, t.xb, t.sgn_xb) * ylm(l4, M - m, t.yb, t.sgn_yb);
    }
    sum += a * ya * inner;
  }
  return pref * sum;
}

} // namespace fmscat

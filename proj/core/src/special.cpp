#include "fmscat/special.hpp"

#include <cmath>

namespace fmscat {

namespace {

void check_im(Complex z) {
  if (std::abs(z.imag()) > 650.0)
    throw NumericError("riccati: |Im z| too large for unscaled representation");
}

// (2l+1)!! as double
double double_factorial_odd(int l) {
  double v = 1.0;
  for (int k = 3; k <= 2 * l + 1; k += 2) v *= k;
  return v;
}

} // namespace

void riccati_j_array(int lmax, Complex z, Complex* out) {
  check_im(z);
  const double az = std::abs(z);
  if (az < 1e-8) {
    // two-term power series; adequate below the recurrence switch-over
    for (int l = 0; l <= lmax; ++l) {
      const Complex zp = std::pow(z, l + 1);
      out[l] = zp / double_factorial_odd(l) *
               (1.0 - z * z / (2.0 * (2.0 * l + 3.0)));
    }
    return;
  }
  if (az > lmax + 0.5) {
    Complex jm = std::cos(z);
    Complex j = std::sin(z);
    out[0] = j;
    for (int l = 0; l < lmax; ++l) {
      const Complex jp = ((2.0 * l + 1.0) / z) * j - jm;
      jm = j;
      j = jp;
      out[l + 1] = j;
    }
    return;
  }
  // Miller's downward recurrence with rescaling
  const int start = lmax + 20 + static_cast<int>(std::sqrt(40.0 * lmax) + az);
  Complex fp = 0.0, f = 1e-30; // values at l+1 and l, unnormalized
  std::vector<Complex> tmp(lmax + 1);
  int filled = lmax + 1;
  for (int l = start; l >= 0; --l) {
    if (l <= lmax) {
      tmp[l] = f;
      filled = l;
    }
    const Complex fm = ((2.0 * l + 1.0) / z) * f - fp;
    fp = f;
    f = fm; // f now holds the value at l-1
    if (std::abs(f) > 1e250) {
      f *= 1e-250;
      fp *= 1e-250;
      for (int k = filled; k <= lmax; ++k) tmp[k] *= 1e-250;
    }
  }
  // after the loop: fp ~ jhat_0, f ~ jhat_{-1} = cos z (unnormalized)
  const Complex s = std::sin(z);
  const Complex scale = (std::abs(s) > 0.1) ? s / fp : std::cos(z) / f;
  for (int l = 0; l <= lmax; ++l) out[l] = tmp[l] * scale;
}

Complex riccati_j(int l, Complex z) {
  std::vector<Complex> buf(l + 1);
  riccati_j_array(l, z, buf.data());
  return buf[l];
}

void riccati_h_plus_array(int lmax, Complex z, Complex* out) {
  check_im(z);
  if (std::abs(z) == 0.0)
    throw NumericError("riccati_h_plus: z must be nonzero");
  const Complex e = std::exp(Complex(0, 1) * z);
  out[0] = Complex(0, -1) * e;
  if (lmax == 0) return;
  out[1] = -e * (1.0 + Complex(0, 1) / z);
  for (int l = 1; l < lmax; ++l)
    out[l + 1] = ((2.0 * l + 1.0) / z) * out[l] - out[l - 1];
}

Complex riccati_h_plus(int l, Complex z) {
  std::vector<Complex> buf(l + 1);
  riccati_h_plus_array(l, z, buf.data());
  return buf[l];
}

Complex riccati_j_deriv(int l, Complex z) {
  if (l == 0) return std::cos(z);
  std::vector<Complex> buf(l + 1);
  riccati_j_array(l, z, buf.data());
  return buf[l - 1] - (static_cast<double>(l) / z) * buf[l];
}

Complex riccati_h_plus_deriv(int l, Complex z) {
  const Complex e = std::exp(Complex(0, 1) * z);
  if (l == 0) return e;
  std::vector<Complex> buf(l + 1);
  riccati_h_plus_array(l, z, buf.data());
  return buf[l - 1] - (static_cast<double>(l) / z) * buf[l];
}

double legendre_p(int l, double x) {
  if (l == 0) return 1.0;
  double pm = 1.0, p = x;
  for (int n = 1; n < l; ++n) {
    const double pp = ((2.0 * n + 1.0) * x * p - n * pm) / (n + 1.0);
    pm = p;
    p = pp;
  }
  return p;
}

void assoc_legendre_table(int lmax, double x, std::vector<double>& table) {
  table.assign((lmax + 1) * (lmax + 2) / 2, 0.0);
  const double sx = std::sqrt(std::max(0.0, 1.0 - x * x));
  auto idx = [](int l, int m) { return l * (l + 1) / 2 + m; };
  table[0] = 1.0;
  for (int m = 1; m <= lmax; ++m)
    table[idx(m, m)] = -table[idx(m - 1, m - 1)] * (2.0 * m - 1.0) * sx;
  for (int m = 0; m < lmax; ++m)
    table[idx(m + 1, m)] = x * (2.0 * m + 1.0) * table[idx(m, m)];
  for (int m = 0; m <= lmax; ++m)
    for (int l = m + 2; l <= lmax; ++l)
      table[idx(l, m)] = ((2.0 * l - 1.0) * x * table[idx(l - 1, m)] -
                          (l + m - 1.0) * table[idx(l - 2, m)]) /
                         (l - m);
}

double ylm_inplane(int l, int m, const std::vector<double>& plm_table,
                   double transverse_sign) {
  const int am = std::abs(m);
  if (am > l) return 0.0;
  double lognum = 0.0;
  for (int k = l - am + 1; k <= l + am; ++k) lognum += std::log(static_cast<double>(k));
  const double norm =
      std::sqrt((2.0 * l + 1.0) / (4.0 * PI) * std::exp(-lognum));
  double v = norm * plm_table[l * (l + 1) / 2 + am];
  // e^{i m phi} at phi in {0, pi} and the (-1)^m of Y_{l,-m} = (-1)^m Y*_{lm}
  if (transverse_sign < 0.0 && (am % 2)) v = -v;
  if (m < 0 && (am % 2)) v = -v;
  return v;
}

} // namespace fmscat

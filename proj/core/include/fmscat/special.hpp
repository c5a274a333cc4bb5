#ifndef FMSCAT_SPECIAL_HPP
#define FMSCAT_SPECIAL_HPP

#include <vector>

#include "fmscat/common.hpp"

namespace fmscat {

/// Riccati-Bessel functions, normalized so that
///   jhat_0(z) = sin z,   hhat_0(z) = -i exp(iz)   (outgoing),
/// with Wronskian jhat hhat' - jhat' hhat = i for every l.
/// Regular values use Miller's downward recurrence for |z| < l, upward
/// otherwise; outgoing values always recur upward (stable direction).
Complex riccati_j(int l, Complex z);
Complex riccati_h_plus(int l, Complex z);

/// Both families for l = 0..lmax in one pass.
void riccati_j_array(int lmax, Complex z, Complex* out);
void riccati_h_plus_array(int lmax, Complex z, Complex* out);

/// d/dz of the same functions (from the recurrence relation).
Complex riccati_j_deriv(int l, Complex z);
Complex riccati_h_plus_deriv(int l, Complex z);

/// Legendre polynomial P_l(x).
double legendre_p(int l, double x);

/// Associated Legendre table P_l^m(x) for 0 <= m <= l <= lmax
/// (Condon-Shortley phase), packed as table[l*(l+1)/2 + m].
void assoc_legendre_table(int lmax, double x, std::vector<double>& table);

/// Real value of Y_{l m}(theta, phi) for directions in the xz-plane:
/// phi = 0 when the transverse sign is +1, phi = pi when -1.
/// Requires a precomputed assoc_legendre_table at cos(theta).
double ylm_inplane(int l, int m, const std::vector<double>& plm_table,
                   double transverse_sign);

} // namespace fmscat

#endif

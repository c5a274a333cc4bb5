#ifndef FMSCAT_ANGULAR_HPP
#define FMSCAT_ANGULAR_HPP

#include <vector>

#include "fmscat/common.hpp"

namespace fmscat {

/// Wigner symbols and Clebsch-Gordan coefficients for integer momenta
/// (double-precision Racah formulas, fine up to l ~ 40).
double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3);
double wigner6j(int j1, int j2, int j3, int j4, int j5, int j6);
double clebsch(int j1, int m1, int j2, int m2, int J, int M);

/// <(l1 l2) L | P_k(xhat . yhat) | (l3 l4) L>, closed 6j form. Independent
/// cross-check of the contracted kernels and the angular factor of separable
/// multipole couplings.
double pk_bipolar_element(int k, int l1, int l2, int l3, int l4, int L);

/// An in-plane direction: polar cosine plus the sign of the transverse
/// component. All rotated Jacobi vectors stay in the plane spanned by the
/// source pair, so azimuths are 0 or pi and spherical harmonics are real.
struct InPlaneDir {
  double cos = 1.0;
  double sgn = 1.0;
};

/// Associated-Legendre tables for one angular configuration: the source
/// yhat at polar cosine u (xhat_a = zhat), and the rotated directions.
struct DirTables {
  std::vector<double> ya, xb, yb;
  double sgn_xb = 1.0, sgn_yb = 1.0;
};

/// Contraction  sum_M {Y_l1(zhat) x Y_l2(ya)}*_LM {Y_l3(xb) x Y_l4(yb)}_LM
/// for coplanar directions. The angular integral of a rotationally invariant
/// pairing reduces to
///   int dxhat dyhat {Y_c}*_LM g {Y_c'}_LM = 8 pi^2/(2L+1) int du K(u) g(u).
class BipolarContractor {
public:
  BipolarContractor(int L, int lmax);

  void prepare(double u_a, InPlaneDir xb, InPlaneDir yb, DirTables& t) const;
  double contract(int l1, int l2, int l3, int l4, const DirTables& t) const;

  int L() const { return L_; }
  int lmax() const { return lmax_; }

private:
  int L_;
  int lmax_;
  std::vector<double> cg_; // CG(l m, l' m' | L, m+m') cache
  int nm_;
  double cg(int l1, int m1, int l2, int m2) const;
  double ylm(int l, int m, const std::vector<double>& plm, double sgn) const;
  std::vector<double> ynorm_; // sqrt((2l+1)/(4pi) (l-m)!/(l+m)!)
};

} // namespace fmscat

#endif

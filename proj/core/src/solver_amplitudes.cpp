#define LAPACK_COMPLEX_CPP
#include "fmscat/solver_amplitudes.hpp"

#include <cmath>
#include <complex>
#include <lapacke.h>

namespace fmscat {

namespace {

lapack_complex_double* lp(Eigen::MatrixXcd& m) {
  return reinterpret_cast<lapack_complex_double*>(m.data());
}
lapack_complex_double* lp(Eigen::VectorXcd& v) {
  return reinterpret_cast<lapack_complex_double*>(v.data());
}

} // namespace

FMSolution solve(const CSLinearSystem& sys) {
  const long n = sys.A.rows();
  if (sys.b.size() != n)
    throw ConfigError("solve: right-hand side size mismatch");

  Eigen::MatrixXcd lu = sys.A;
  std::vector<lapack_int> piv(n);
  const double anorm = lu.cwiseAbs().rowwise().sum().maxCoeff(); // inf-norm

  lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, lp(lu), n, piv.data());
  if (info > 0)
    throw NumericError("solve: exactly singular LU at pivot " + std::to_string(info));
  if (info < 0) throw NumericError("solve: zgetrf illegal argument");

  double rcond = 0.0;
  LAPACKE_zgecon(LAPACK_COL_MAJOR, 'I', n, lp(lu), n, anorm, &rcond);

  FMSolution out;
  out.E = sys.E;
  out.L = sys.L;
  out.theta = sys.theta;
  out.rcond = rcond;

  if (rcond < 1e-14) {
    // inverse iteration on the factorized (H - E) locates the eigenvalue
    // closest to the requested energy
    Eigen::VectorXcd v = Eigen::VectorXcd::Random(n);
    v.normalize();
    Complex mu = 0.0;
    for (int it = 0; it < 8; ++it) {
      Eigen::VectorXcd w = v;
      LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n, 1, lp(lu), n, piv.data(), lp(w), n);
      mu = v.dot(w) / w.squaredNorm(); // Rayleigh-like estimate of (H-E)^-1
      v = w.normalized();
    }
    const Complex nearest = sys.E + mu;
    throw NumericError("solve: (H - E) numerically singular (rcond " +
                       std::to_string(rcond) + "); nearest CS eigenvalue ~ (" +
                       std::to_string(nearest.real()) + ", " +
                       std::to_string(nearest.imag()) + ")");
  }

  Eigen::VectorXcd x = sys.b;
  LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n, 1, lp(lu), n, piv.data(), lp(x), n);
  // one refinement pass tightens the residual to near round-off
  Eigen::VectorXcd r = sys.b - sys.A * x;
  Eigen::VectorXcd dx = r;
  LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n, 1, lp(lu), n, piv.data(), lp(dx), n);
  x += dx;
  r = sys.b - sys.A * x;

  const double bnorm = sys.b.norm();
  out.residual_rel = bnorm > 0.0 ? r.norm() / bnorm : r.norm();
  out.C = std::move(x);
  return out;
}

Eigen::VectorXcd cs_spectrum(const Eigen::MatrixXcd& H) {
  const long n = H.rows();
  Eigen::MatrixXcd work = H;
  Eigen::VectorXcd evals(n);
  lapack_int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, lp(work), n, lp(evals),
                    nullptr, 1, nullptr, 1);
  if (info != 0)
    throw NumericError("cs_spectrum: zgeev failed, info " + std::to_string(info));
  return evals;
}

Complex extract_amplitude(const FMContext& ctx, const Eigen::VectorXcd& C,
                          const DistortedWave& in0, const DistortedWave& exit0,
                          const DistortedWave& exit_theta) {
  const int b = exit0.entrance();
  const double qa = in0.q(in0.entrance()).real();
  const double qb = exit0.q(b).real();
  if (qa <= 0.0 || qb <= 0.0)
    throw ConfigError("extract_amplitude: entrance and exit channels must be open");
  const Complex body = ctx.body_integral(C, exit_theta, exit_theta.entrance());
  const Complex bnd = ctx.boundary_term(in0, exit0, b);
  const Complex rot = std::exp(Complex(0.0, 2.0 * ctx.theta()));
  return (rot * body + bnd) * std::sqrt(qa) / (qb * std::sqrt(qb));
}

void AmplitudeMatrix::finalize() {
  const long n = static_cast<long>(channels.size());
  if (Abar.rows() != n || Atilde.rows() != n)
    throw ConfigError("AmplitudeMatrix: channel-list mismatch");
  A = Abar + Atilde;
  S = Eigen::MatrixXcd::Identity(n, n) + Complex(0.0, 2.0) * A;
}

CrossSectionRecord cross_sections(const AmplitudeMatrix& amp, double E, int L,
                                  const ThreeBodySystem& sys, int entrance) {
  CrossSectionRecord rec;
  rec.E = E;
  rec.L = L;
  rec.entrance = entrance;
  const OpenChannel& a = amp.channels[entrance];
  if (a.q <= 0.0)
    throw ConfigError("cross_sections: entrance channel at threshold, q = 0");
  const double cmf = sys.channel_mass_factor(a.chan.partition);
  const double denom = cmf * a.q * a.q;
  for (std::size_t b = 0; b < amp.channels.size(); ++b) {
    const Complex Aab = amp.A(b, entrance);
    rec.sigma.push_back(2.0 * (2 * L + 1) * std::norm(Aab) / denom);
    rec.labels.push_back(amp.channels[b].chan.label);
  }
  const Complex Saa = amp.S(entrance, entrance);
  rec.sigma_inel = (2 * L + 1) * (1.0 - std::norm(Saa)) / (2.0 * denom);
  return rec;
}

UnitarityReport unitarity_report(const AmplitudeMatrix& amp) {
  UnitarityReport rep;
  const long n = amp.S.rows();
  Eigen::MatrixXcd dev =
      amp.S.adjoint() * amp.S - Eigen::MatrixXcd::Identity(n, n);
  rep.defect_norm = dev.norm();
  for (long c = 0; c < n; ++c) rep.column_defect.push_back(dev.col(c).norm());
  // unitarity-derived inelastic flux vs the explicitly computed channels
  double worst = 0.0;
  for (long a = 0; a < n; ++a) {
    const double lhs = 1.0 - std::norm(amp.S(a, a));
    double rhs = 0.0;
    for (long b = 0; b < n; ++b)
      if (b != a) rhs += std::norm(amp.S(b, a));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  rep.inel_vs_sum = worst;
  return rep;
}

} // namespace fmscat

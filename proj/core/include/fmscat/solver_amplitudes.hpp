#ifndef FMSCAT_SOLVER_AMPLITUDES_HPP
#define FMSCAT_SOLVER_AMPLITUDES_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fmscat/fm_assembler.hpp"

namespace fmscat {

/// Solution of the CS linear system with its quality indicators.
struct FMSolution {
  Eigen::VectorXcd C;
  double residual_rel = 0.0; ///< ||A C - b|| / ||b||
  double rcond = 0.0;        ///< LAPACK reciprocal condition estimate
  double E = 0.0;
  int L = 0;
  double theta = 0.0;
};

/// Dense LU with one step of iterative refinement. Throws NumericError for a
/// numerically singular matrix, naming the nearest spectral point (inverse
/// iteration on the factorization).
FMSolution solve(const CSLinearSystem& sys);

/// Eigenvalues of the (non-symmetric) CS FM Hamiltonian.
Eigen::VectorXcd cs_spectrum(const Eigen::MatrixXcd& H);

/// Rearrangement amplitude Abar_{b,a} from the rotated Green's integral plus
/// the unrotated boundary term:
///   (e^{2 i theta} I_body + B) * sqrt(q_a) / q_b^{3/2},
/// the rotation factor being e^{i theta} per reduced radial direction.
/// `in0`/`exit0` are theta = 0 waves, `exit_theta` matches the context angle.
Complex extract_amplitude(const FMContext& ctx, const Eigen::VectorXcd& C,
                          const DistortedWave& in0, const DistortedWave& exit0,
                          const DistortedWave& exit_theta);

/// One open two-body channel at fixed energy.
struct OpenChannel {
  BinaryChannel chan;
  int ly = 0;
  double q = 0.0;
};

/// Total amplitudes A = Abar + Atilde over the open channels, with the
/// S-matrix on the S = 1 + 2iA convention.
struct AmplitudeMatrix {
  std::vector<OpenChannel> channels;
  Eigen::MatrixXcd Abar, Atilde, A, S;

  void finalize(); ///< A = Abar + Atilde, S = 1 + 2iA (checks shapes)
};

struct CrossSectionRecord {
  double E = 0.0;
  int L = 0;
  int entrance = 0;                ///< index into channels
  std::vector<double> sigma;       ///< per exit channel, units of pi a0^2
  double sigma_inel = 0.0;         ///< unitarity-derived, units of pi a0^2
  std::vector<std::string> labels;
};

/// sigma^L_ab = 2 (2L+1) |A_ab|^2 / (cmf_a q_a^2)   [pi a0^2]
/// sigma^L_inel = (2L+1) (1 - |1+2iA_aa|^2) / (2 cmf_a q_a^2)
CrossSectionRecord cross_sections(const AmplitudeMatrix& amp, double E, int L,
                                  const ThreeBodySystem& sys, int entrance);

struct UnitarityReport {
  double defect_norm = 0.0;              ///< ||S^+ S - 1||
  std::vector<double> column_defect;     ///< per entrance channel
  double inel_vs_sum = 0.0;              ///< |sigma_inel - sum explicit| rel.
};

UnitarityReport unitarity_report(const AmplitudeMatrix& amp);

} // namespace fmscat

#endif

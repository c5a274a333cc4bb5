#ifndef FMSCAT_FM_ASSEMBLER_HPP
#define FMSCAT_FM_ASSEMBLER_HPP

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <vector>

#include "fmscat/angular.hpp"
#include "fmscat/distorted_waves.hpp"
#include "fmscat/mesh.hpp"
#include "fmscat/potentials.hpp"

namespace fmscat {

/// Partial-wave channel of one Faddeev component.
struct PartialWaveChannel {
  int component = 0; ///< partition index the component lives in
  int lx = 0;
  int ly = 0;
};

struct ChannelTruncation {
  int lmax = 4;
  int Lmax = 5;
};

/// (lx, ly) pairs allowed by the triangle rule, parity (+1/-1) and lmax.
std::vector<std::pair<int, int>> enumerate_lxly(int L, int parity, int lmax);

/// Channel list per component; throws on an empty set.
std::vector<PartialWaveChannel>
enumerate_channels(const ChannelTruncation& trunc, int L, int parity,
                   const std::vector<int>& components);

struct BasisSpec {
  int nx = 30;
  int ny = 30;
  double hx = 0.4;
  double hy = 0.5;
};

/// Exchange reduction for a pair of identical particles: the component of
/// `image_partition` is the exchange image of the first stored component,
/// with partial-wave amplitudes  f_img,c = (-1)^(S + lx_c) f_c.
struct ExchangeReduction {
  int image_partition = 1;
  int spin_S = 0;
};

struct FMOptions {
  double theta = 0.0;        ///< complex-scaling angle (radians)
  int angular_order = 0;     ///< GL points for rotation kernels; 0 = 2 lmax + 6
  int amplitude_order = 0;   ///< GL points in extraction integrals; 0 = doubled
  bool couple_components = true;
  bool screen_lhs_w = true;  ///< screen W_alpha on the component diagonal
  long max_unknowns = 20000;
  double boundary_ymax = 120.0; ///< y-extent of the boundary-term quadrature
  int extraction_lmax = 0;   ///< channel space for extraction operands; 0 = lmax+4
};

/// Assembled linear system (H^theta - E) C = b with its run labels.
struct CSLinearSystem {
  Eigen::MatrixXcd A;
  Eigen::VectorXcd b;
  double E = 0.0;
  int L = 0;
  double theta = 0.0;
  std::vector<int> block_offsets;
};

/// Discretization context for one (L, parity, theta, spin sector): holds the
/// component bases, channel list, rotation-kernel tables and screening, and
/// produces the CS linear system, the inhomogeneous term, and the rotated
/// Green's-integral pairings used for amplitude extraction.
class FMContext {
public:
  FMContext(const PotentialModel& model, std::vector<int> stored_partitions,
            std::optional<ExchangeReduction> exchange, int L, int parity,
            int lmax, const std::array<BasisSpec, 3>& basis, FMOptions opt);
  ~FMContext();
  FMContext(FMContext&&) noexcept;

  int L() const { return L_; }
  int parity() const { return parity_; }
  double theta() const { return opt_.theta; }
  const PotentialModel& model() const { return *model_; }
  const std::vector<std::pair<int, int>>& lxly() const { return lxly_; }
  std::vector<PartialWaveChannel> channels() const;
  int n_components() const { return static_cast<int>(parts_.size()); }
  int component_partition(int i) const { return parts_[i]; }
  bool has_exchange() const { return exchange_.has_value(); }
  int dim() const { return dim_; }
  long index(int comp, int chan, int ix, int iy) const;
  const LagrangeLaguerreBasis& basis_x(int comp) const { return *bx_[comp]; }
  const LagrangeLaguerreBasis& basis_y(int comp) const { return *by_[comp]; }

  /// Replace the three-body W term by a separable potential (decoupled-limit
  /// and oracle modes). Applies to every stored component's diagonal.
  void override_w_separable(std::shared_ptr<const AuxiliaryPotential> w);
  bool w_overridden() const { return static_cast<bool>(w_override_); }

  /// (H^theta - E) with the V^s couplings moved to the left-hand side.
  CSLinearSystem assemble(double E) const;
  /// H^theta alone (spectrum mode).
  Eigen::MatrixXcd hamiltonian() const;

  /// Inhomogeneous term for the given complex-scaled incoming wave.
  Eigen::VectorXcd rhs(double E, const DistortedWave& incoming) const;

  /// Rotated-contour Green's integral of the solved coefficients against the
  /// exit-channel incoming wave (without the e^{6 i theta} prefactor).
  Complex body_integral(const Eigen::VectorXcd& C, const DistortedWave& exit_wave,
                        int exit_channel) const;

  /// Unrotated boundary term < Psi_in,a | P_b | Psi_in,b > with theta = 0 waves.
  Complex boundary_term(const DistortedWave& in_wave, const DistortedWave& exit_wave,
                        int exit_channel) const;

  /// Exchange sign (-1)^(S+lx) for image amplitudes (1 when no exchange).
  double exchange_sign(int chan) const;
  double exchange_sign_op(int chan) const;

private:
  struct RotationTable; // per (observer component, source partition)

  const PotentialModel* model_;
  std::vector<int> parts_;
  std::optional<ExchangeReduction> exchange_;
  int L_, parity_, lmax_;
  FMOptions opt_;
  std::vector<std::pair<int, int>> lxly_;
  std::vector<std::pair<int, int>> lxly_op_; // extraction space, prefix = lxly_
  std::vector<std::shared_ptr<LagrangeLaguerreBasis>> bx_, by_;
  std::array<BasisSpec, 3> basis_spec_;
  int dim_ = 0;
  std::vector<int> offsets_;
  BipolarContractor contractor_;
  AngularGrid ugrid_, ugrid_amp_;
  std::vector<double> kid_;          // same-frame kernels [k][c][c']
  std::vector<double> kid_amp_;      // extraction space, amplitude grid
  std::vector<std::unique_ptr<RotationTable>> tables_;
  std::shared_ptr<const AuxiliaryPotential> w_override_;

  const RotationTable& table(int obs_partition, int src_partition) const;
  void build_tables();
  int chan_of(int lx, int ly) const;
  int chan_of_op(int lx, int ly) const;

  // channel amplitudes of the incoming wave at a point of its own frame
  void incoming_values(const DistortedWave& w, double x, double y,
                       std::vector<Complex>& f) const;
  void incoming_values_op(const DistortedWave& w, double x, double y,
                          std::vector<Complex>& f) const;
  // channel matrix of sum_{d != p} V_d at a point of frame p (u-quadrature)
  void vother_matrix(int p, double x, double y, double theta,
                     Eigen::MatrixXcd& out) const;
  // channel matrix of W_p (u-quadrature on the assembly grid)
  void w_matrix(int p, double x, double y, double theta,
                Eigen::MatrixXcd& out) const;
  // exit-side integrand components H_c(x,y) (see extraction notes)
  void extraction_function(const DistortedWave& exit_wave, double x, double y,
                           double theta, std::vector<Complex>& H) const;
  // project a pb-frame channel function onto observer channels at (x, y)
  void project_cross(int obs_partition, int src_partition, double x, double y,
                     int n_obs,
                     const std::function<void(double, double, std::vector<Complex>&)>& src_fn,
                     std::vector<Complex>& out) const;
};

} // namespace fmscat

#endif

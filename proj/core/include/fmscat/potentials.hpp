#ifndef FMSCAT_POTENTIALS_HPP
#define FMSCAT_POTENTIALS_HPP

#include <array>
#include <optional>

#include "fmscat/kinematics.hpp"

namespace fmscat {

/// Merkuriev cut-off  chi(x, y) = 2 / (1 + exp[(x/x0)^mu / (1 + y/y0)]).
/// mu > 2 keeps the kernels compact; x0 tracks the pair bound-state size,
/// y0 the three-body region.
struct MerkurievCutoff {
  double x0 = 1.0;
  double y0 = 10.0;
  double mu = 2.1;

  double chi(double x, double y) const;
  /// chi(x e^{i theta}, y e^{i theta}) on the principal branch; requires
  /// theta < pi/(2 mu) so the power never crosses the negative real axis.
  Complex chi_scaled(double x, double y, double theta) const;

  void validate() const;
};

/// Exponential suppression of the screened residual beyond y_cut.
struct ScreeningProfile {
  double y_cut = 32.0;
  double y_sc = 5.5;
  double n_exp = 2.0;

  double factor(double y) const;
  void validate() const;
};

/// Pairwise Coulomb data for one partition. Pairs without bound states keep
/// no cut-off: their full potential is long-range (chi = 0, V^s = 0) and the
/// partition carries no Faddeev component.
struct PairInteraction {
  double strength = 0.0; ///< z_b z_c * jacobi_scale, the coefficient of 1/x
  std::optional<MerkurievCutoff> cutoff;
};

/// All pairwise splittings plus the three-body long-range terms, evaluated at
/// real or complex-scaled arguments. Complex scaling of a radius is the
/// global dilation, so rotated-frame radii scale by the same phase and only
/// magnitudes need continuation.
class PotentialModel {
public:
  PotentialModel(const ThreeBodySystem& sys,
                 std::array<PairInteraction, 3> pairs, ScreeningProfile screen);

  const ThreeBodySystem& system() const { return *sys_; }
  const PairInteraction& pair(int a) const { return pairs_[a]; }
  const ScreeningProfile& screening() const { return screen_; }

  bool has_component(int a) const { return pairs_[a].cutoff.has_value(); }

  double V(int a, double x) const { return pairs_[a].strength / x; }
  Complex V_scaled(int a, double x, double theta) const;

  double chi(int a, double x, double y) const;
  Complex chi_scaled(int a, double x, double y, double theta) const;

  double Vs(int a, double x, double y) const;
  double Vl(int a, double x, double y) const;
  Complex Vs_scaled(int a, double x, double y, double theta) const;
  Complex Vl_scaled(int a, double x, double y, double theta) const;

  /// W_a = V_b^l + V_c^l at the point of set a given by (x, y, u).
  double W(int a, double x, double y, double u) const;
  Complex W_scaled(int a, double x, double y, double u, double theta) const;

private:
  const ThreeBodySystem* sys_;
  std::array<PairInteraction, 3> pairs_;
  ScreeningProfile screen_;
};

/// Model with the spec defaults: mu = 2.1, x0 = <x> of the pair ground state,
/// y0 = 10 a.u. for every bound pair; repulsive pairs unsplit.
PotentialModel default_potential_model(const ThreeBodySystem& sys,
                                       ScreeningProfile screen = {});

/// Fixed-angle view of a PotentialModel (asserts the branch condition once).
class ScaledPotentialEvaluator {
public:
  ScaledPotentialEvaluator(const PotentialModel& model, double theta);

  double theta() const { return theta_; }
  Complex V(int a, double x) const { return model_->V_scaled(a, x, theta_); }
  Complex chi(int a, double x, double y) const {
    return model_->chi_scaled(a, x, y, theta_);
  }
  Complex Vs(int a, double x, double y) const {
    return model_->Vs_scaled(a, x, y, theta_);
  }
  Complex Vl(int a, double x, double y) const {
    return model_->Vl_scaled(a, x, y, theta_);
  }
  Complex W(int a, double x, double y, double u) const {
    return model_->W_scaled(a, x, y, u, theta_);
  }

private:
  const PotentialModel* model_;
  double theta_;
};

} // namespace fmscat

#endif

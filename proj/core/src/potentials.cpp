#include "fmscat/potentials.hpp"

#include <cmath>

#include "fmscat/twobody.hpp"

namespace fmscat {

void MerkurievCutoff::validate() const {
  if (!(mu > 2.0))
    throw ConfigError("MerkurievCutoff: mu must exceed 2, got " + std::to_string(mu));
  if (!(x0 > 0.0) || !(y0 > 0.0))
    throw ConfigError("MerkurievCutoff: x0, y0 must be positive");
}

double MerkurievCutoff::chi(double x, double y) const {
  const double w = std::pow(x / x0, mu) / (1.0 + y / y0);
  if (w > 40.0) return 2.0 * std::exp(-w); // avoid exp overflow; same value
  return 2.0 / (1.0 + std::exp(w));
}

Complex MerkurievCutoff::chi_scaled(double x, double y, double theta) const {
  if (!(theta < PI / (2.0 * mu)))
    throw NumericError("MerkurievCutoff: theta too large for the principal branch");
  const Complex phase(std::cos(mu * theta), std::sin(mu * theta));
  const Complex eith(std::cos(theta), std::sin(theta));
  const Complex w = std::pow(x / x0, mu) * phase / (1.0 + y * eith / y0);
  if (w.real() > 40.0) return 2.0 * std::exp(-w);
  return 2.0 / (1.0 + std::exp(w));
}

double ScreeningProfile::factor(double y) const {
  if (y <= y_cut) return 1.0;
  return std::exp(-std::pow((y - y_cut) / y_sc, n_exp));
}

void ScreeningProfile::validate() const {
  if (!(n_exp > 1.0))
    throw ConfigError("ScreeningProfile: n must exceed 1, got " + std::to_string(n_exp));
  if (!(y_cut > 0.0) || !(y_sc > 0.0))
    throw ConfigError("ScreeningProfile: y_cut, y_sc must be positive");
}

PotentialModel::PotentialModel(const ThreeBodySystem& sys,
                               std::array<PairInteraction, 3> pairs,
                               ScreeningProfile screen)
    : sys_(&sys), pairs_(pairs), screen_(screen) {
  for (const auto& p : pairs_)
    if (p.cutoff) p.cutoff->validate();
  screen_.validate();
}

Complex PotentialModel::V_scaled(int a, double x, double theta) const {
  const Complex phase(std::cos(theta), -std::sin(theta));
  return pairs_[a].strength * phase / x;
}

double PotentialModel::chi(int a, double x, double y) const {
  if (!pairs_[a].cutoff) return 0.0;
  return pairs_[a].cutoff->chi(x, y);
}

Complex PotentialModel::chi_scaled(int a, double x, double y, double theta) const {
  if (!pairs_[a].cutoff) return 0.0;
  return pairs_[a].cutoff->chi_scaled(x, y, theta);
}

double PotentialModel::Vs(int a, double x, double y) const {
  if (!pairs_[a].cutoff) return 0.0;
  return V(a, x) * pairs_[a].cutoff->chi(x, y);
}

double PotentialModel::Vl(int a, double x, double y) const {
  return V(a, x) * (1.0 - chi(a, x, y));
}

Complex PotentialModel::Vs_scaled(int a, double x, double y, double theta) const {
  if (!pairs_[a].cutoff) return 0.0;
  return V_scaled(a, x, theta) * pairs_[a].cutoff->chi_scaled(x, y, theta);
}

Complex PotentialModel::Vl_scaled(int a, double x, double y, double theta) const {
  return V_scaled(a, x, theta) * (1.0 - chi_scaled(a, x, y, theta));
}

double PotentialModel::W(int a, double x, double y, double u) const {
  double w = 0.0;
  for (int d = 0; d < 3; ++d) {
    if (d == a) continue;
    const RotatedFrame f = sys_->rotate(a, d, x, y, u);
    w += Vl(d, f.x, f.y);
  }
  return w;
}

Complex PotentialModel::W_scaled(int a, double x, double y, double u,
                                 double theta) const {
  Complex w = 0.0;
  for (int d = 0; d < 3; ++d) {
    if (d == a) continue;
    const RotatedFrame f = sys_->rotate(a, d, x, y, u);
    w += Vl_scaled(d, f.x, f.y, theta);
  }
  return w;
}

PotentialModel default_potential_model(const ThreeBodySystem& sys,
                                       ScreeningProfile screen) {
  std::array<PairInteraction, 3> pairs;
  for (int a = 0; a < 3; ++a) {
    pairs[a].strength = sys.coulomb_strength(a);
    if (pairs[a].strength < 0.0) {
      MerkurievCutoff cut;
      HydrogenicState ground(-pairs[a].strength, 1, 0);
      cut.x0 = ground.mean_x();
      cut.y0 = 10.0;
      cut.mu = 2.1;
      pairs[a].cutoff = cut;
    }
  }
  return PotentialModel(sys, pairs, screen);
}

ScaledPotentialEvaluator::ScaledPotentialEvaluator(const PotentialModel& model,
                                                   double theta)
    : model_(&model), theta_(theta) {
  if (!(theta >= 0.0) || !(theta < PI / 4.0))
    throw ConfigError("ScaledPotentialEvaluator: need 0 <= theta < pi/4");
  for (int a = 0; a < 3; ++a)
    if (model.pair(a).cutoff && !(theta < PI / (2.0 * model.pair(a).cutoff->mu)))
      throw ConfigError("ScaledPotentialEvaluator: theta exceeds branch bound");
}

} // namespace fmscat

#ifndef FMSCAT_CONFIG_HPP
#define FMSCAT_CONFIG_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fmscat/distorted_waves.hpp"
#include "fmscat/fm_assembler.hpp"

namespace fmscat {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kConfigSchemaVersion = 1;

struct EntranceSpec {
  int partition = 0;
  int n = 1;
  int lx = 0;
};

/// Validated run configuration. Parsed from a JSON file (see README for the
/// schema); named presets expand deterministically into full specs.
struct RunConfig {
  std::string system_name; // preset name or "custom"
  std::array<Particle, 3> particles{};
  double reference_mass = 1.0;
  std::vector<int> stored_partitions;
  std::optional<ExchangeReduction> exchange;

  std::vector<EntranceSpec> entrances;
  std::vector<double> energies_total; // Hartree, CM
  bool energies_were_impact = false;
  std::vector<int> Ls{0};
  std::vector<int> spin_sectors{0};
  double theta_deg = 7.5;

  std::array<BasisSpec, 3> basis{};
  ChannelTruncation truncation{4, 5};

  // per-partition Merkuriev overrides; absent entries keep model defaults
  std::array<std::optional<MerkurievCutoff>, 3> merkuriev{};
  ScreeningProfile screening{};

  AuxiliaryPotential::Variant dw_variant = AuxiliaryPotential::Variant::Free;
  int dw_nmax = 2;
  double dw_match_radius = 150.0;
  double dw_step = 0.01;

  int angular_order = 0;
  int amplitude_order = 0;
  long max_unknowns = 20000;
  bool screen_lhs_w = true;
  double boundary_ymax = 120.0;
  int exit_nmax = 2;

  std::string output_dir = ".";
  std::string output_prefix = "fmscat";
  int workers = 0; // 0: FMSCAT_WORKERS env or 1

  std::vector<std::string> warnings; // filled by validation

  ThreeBodySystem make_system() const;
  PotentialModel make_model(const ThreeBodySystem& sys) const;
  std::uint64_t hash() const;
  nlohmann::json normalized() const;
};

RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
/// Hard validation: throws ConfigError on violations (mu <= 2, n_exp <= 1,
/// theta >= 45 deg, empty grids); appends warnings (e.g. theta > 10 deg).
void validate_config(RunConfig& cfg);

/// Preset expansion ("e-H", "e-Ps", "e+-H").
nlohmann::json preset_json(const std::string& name);

} // namespace fmscat

#endif

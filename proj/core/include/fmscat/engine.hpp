#ifndef FMSCAT_ENGINE_HPP
#define FMSCAT_ENGINE_HPP

#include <iosfwd>
#include <nlohmann/json_fwd.hpp>

#include "fmscat/config.hpp"
#include "fmscat/solver_amplitudes.hpp"

namespace fmscat {

/// One scattering solve: fixed (E, L, spin sector, entrance channel).
struct ScatterRecord {
  double E_total = 0.0;
  double E_impact = 0.0;
  int L = 0;
  int spin_S = 0;
  std::string entrance_label;
  std::vector<std::string> exit_labels;
  std::vector<Complex> A;             ///< amplitudes entrance -> exit
  std::vector<double> sigma_pia02;    ///< partial cross sections, pi a0^2
  double sigma_inel_pia02 = 0.0;      ///< unitarity-derived
  Complex S_elastic;                  ///< 1 + 2i A_aa
  double phase_elastic = 0.0;
  double flux_defect = 0.0;           ///< |sum_b |S_ba|^2 - 1|
  double rcond = 0.0;
  double residual = 0.0;
  double matching_stability = 0.0;
  bool convergence_flag = false;
  std::string flag_reason;
};

struct ResultSet {
  std::vector<ScatterRecord> records;
  std::uint64_t config_hash = 0;
  std::string version;
  std::vector<std::string> warnings;
};

ResultSet run_scattering(const RunConfig& cfg);

/// Observable-vs-axis table for convergence studies.
struct SweepResult {
  std::string axis;
  std::vector<double> values;
  std::vector<ResultSet> runs;
};

SweepResult run_convergence_sweep(const RunConfig& cfg, const std::string& axis,
                                  const std::vector<double>& values);

struct SpectrumEntry {
  int L = 0;
  int spin_S = 0;
  Complex eigenvalue;
  std::string label; ///< "bound", "ray(E_t)", "other"
};

struct SpectrumResult {
  std::vector<SpectrumEntry> entries;
  std::vector<double> thresholds;
  std::uint64_t config_hash = 0;
};

SpectrumResult run_spectrum(const RunConfig& cfg);

void write_records_csv(const ResultSet& rs, std::ostream& os);
void write_records_json(const ResultSet& rs, const RunConfig& cfg, std::ostream& os);
void write_sweep_csv(const SweepResult& sw, std::ostream& os);
void write_spectrum_csv(const SpectrumResult& sp, std::ostream& os);

/// Write the standard output files under cfg.output_dir; returns the paths.
std::vector<std::string> persist_results(const ResultSet& rs, const RunConfig& cfg);

} // namespace fmscat

#endif

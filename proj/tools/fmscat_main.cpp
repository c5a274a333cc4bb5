// fmscat command-line driver: run / sweep / spectrum / validate-config.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fmscat/engine.hpp"

using namespace fmscat;
using nlohmann::json;

namespace {

// apply --set dotted.path=value overrides onto the raw JSON config
void apply_override(json& j, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos)
    throw ConfigError("--set expects key.path=value, got '" + kv + "'");
  const std::string path = kv.substr(0, eq);
  const std::string val = kv.substr(eq + 1);
  json* node = &j;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
  json parsed;
  try {
    parsed = json::parse(val);
  } catch (...) {
    parsed = val; // plain string
  }
  (*node)[parts.back()] = parsed;
}

RunConfig load_with_overrides(const std::string& path,
                              const std::vector<std::string>& sets) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  in >> j;
  for (const auto& kv : sets) apply_override(j, kv);
  return config_from_json(j);
}

void print_warnings(const RunConfig& cfg) {
  for (const auto& w : cfg.warnings)
    std::cerr << "warning: " << w << "\n";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"three-body Coulomb scattering with complex-scaled "
               "Faddeev-Merkuriev equations"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "JSON config file")->required();
    sub->add_option("--set", sets,
                    "override a config key, e.g. --set theta_deg=8.0");
    sub->add_option("--output-dir", out_dir, "override output directory");
  };

  CLI::App* cmd_run = app.add_subcommand("run", "full scattering pipeline");
  add_common(cmd_run);

  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "convergence sweep over one axis");
  add_common(cmd_sweep);
  std::string axis = "N";
  std::vector<double> values;
  cmd_sweep->add_option("--axis", axis, "N | theta | lmax | y_cut")->required();
  cmd_sweep->add_option("--values", values, "axis values")->required();

  CLI::App* cmd_spec =
      app.add_subcommand("spectrum", "eigenvalues of the CS FM Hamiltonian");
  add_common(cmd_spec);

  CLI::App* cmd_val =
      app.add_subcommand("validate-config", "parse, validate and echo config");
  add_common(cmd_val);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = load_with_overrides(config_path, sets);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    print_warnings(cfg);

    if (cmd_val->parsed()) {
      std::cout << cfg.normalized().dump(2) << "\n";
      std::printf("config hash: %016llx\n",
                  static_cast<unsigned long long>(cfg.hash()));
      return 0;
    }
    if (cmd_run->parsed()) {
      ResultSet rs = run_scattering(cfg);
      for (const auto& p : persist_results(rs, cfg))
        std::cout << "wrote " << p << "\n";
      int flagged = 0;
      for (const auto& r : rs.records) flagged += r.convergence_flag ? 1 : 0;
      std::printf("%zu records (%d flagged), config %016llx\n",
                  rs.records.size(), flagged,
                  static_cast<unsigned long long>(rs.config_hash));
      return 0;
    }
    if (cmd_sweep->parsed()) {
      SweepResult sw = run_convergence_sweep(cfg, axis, values);
      std::filesystem::create_directories(cfg.output_dir);
      const std::string path =
          cfg.output_dir + "/" + cfg.output_prefix + "_sweep.csv";
      std::ofstream os(path);
      write_sweep_csv(sw, os);
      std::cout << "wrote " << path << "\n";
      return 0;
    }
    if (cmd_spec->parsed()) {
      SpectrumResult sp = run_spectrum(cfg);
      std::filesystem::create_directories(cfg.output_dir);
      const std::string path =
          cfg.output_dir + "/" + cfg.output_prefix + "_spectrum.csv";
      std::ofstream os(path);
      write_spectrum_csv(sp, os);
      std::cout << "wrote " << path << " (" << sp.entries.size()
                << " eigenvalues)\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

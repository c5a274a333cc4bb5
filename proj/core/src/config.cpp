#include "fmscat/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fmscat {

using nlohmann::json;

namespace {

constexpr double kProtonMass = 1836.152673; // m_p / m_e

json base_defaults() {
  return json{{"schema_version", kConfigSchemaVersion},
              {"energy", {{"kind", "impact"}, {"values", {0.1}}}},
              {"L", {0}},
              {"theta_deg", 7.5},
              {"basis", json::object()},
              {"truncation", {{"lmax", 4}, {"Lmax", 5}}},
              {"screening", {{"y_cut", 32.0}, {"y_sc", 5.5}, {"n_exp", 2.0}}},
              {"distorted_wave",
               {{"variant", "free"}, {"n_max", 2}, {"match_radius", 150.0},
                {"step", 0.01}}},
              {"output", {{"dir", "."}, {"prefix", "fmscat"}}}};
}

void merge_defaults(json& j, const json& def) {
  for (auto it = def.begin(); it != def.end(); ++it) {
    if (!j.contains(it.key()))
      j[it.key()] = it.value();
    else if (it.value().is_object() && j[it.key()].is_object())
      merge_defaults(j[it.key()], it.value());
  }
}

AuxiliaryPotential::Variant parse_variant(const std::string& s) {
  if (s == "free") return AuxiliaryPotential::Variant::Free;
  if (s == "dipole") return AuxiliaryPotential::Variant::Dipole;
  if (s == "dipole+polarization")
    return AuxiliaryPotential::Variant::DipolePolarization;
  throw ConfigError("unknown distorted-wave variant '" + s + "'");
}

std::string variant_name(AuxiliaryPotential::Variant v) {
  switch (v) {
    case AuxiliaryPotential::Variant::Free: return "free";
    case AuxiliaryPotential::Variant::Dipole: return "dipole";
    case AuxiliaryPotential::Variant::DipolePolarization:
      return "dipole+polarization";
    default: return "custom";
  }
}

} // namespace

json preset_json(const std::string& name) {
  json j;
  if (name == "e-H") {
    j["particles"] = {{{"mass", 1.0}, {"charge", -1.0}},
                      {{"mass", 1.0}, {"charge", -1.0}},
                      {{"mass", kProtonMass}, {"charge", 1.0}}};
    j["stored_partitions"] = {0};
    j["exchange"] = {{"image_partition", 1}, {"spin_S", 0}};
    j["entrance"] = {{{"partition", 0}, {"n", 1}, {"lx", 0}}};
    j["spin_sectors"] = {0};
  } else if (name == "e-Ps") {
    j["particles"] = {{{"mass", 1.0}, {"charge", -1.0}},
                      {{"mass", 1.0}, {"charge", 1.0}},
                      {{"mass", 1.0}, {"charge", -1.0}}};
    j["stored_partitions"] = {0};
    j["exchange"] = {{"image_partition", 2}, {"spin_S", 0}};
    j["entrance"] = {{{"partition", 0}, {"n", 1}, {"lx", 0}}};
    j["spin_sectors"] = {0};
  } else if (name == "e+-H") {
    j["particles"] = {{{"mass", 1.0}, {"charge", 1.0}},
                      {{"mass", 1.0}, {"charge", -1.0}},
                      {{"mass", kProtonMass}, {"charge", 1.0}}};
    j["stored_partitions"] = {0, 2};
    j["entrance"] = {{{"partition", 0}, {"n", 1}, {"lx", 0}}};
  } else {
    throw ConfigError("unknown system preset '" + name + "'");
  }
  j["system_name"] = name;
  return j;
}

RunConfig config_from_json(const json& jin) {
  json j = jin;
  if (j.contains("system") && j["system"].is_string()) {
    json pre = preset_json(j["system"].get<std::string>());
    merge_defaults(j, pre);
    j.erase("system");
  } else if (j.contains("system")) {
    json sys = j["system"];
    for (auto& k : {"particles", "stored_partitions", "exchange"})
      if (sys.contains(k)) j[k] = sys[k];
    if (sys.contains("reference_mass")) j["reference_mass"] = sys["reference_mass"];
    j["system_name"] = "custom";
    j.erase("system");
  }
  merge_defaults(j, base_defaults());

  if (j.value("schema_version", kConfigSchemaVersion) != kConfigSchemaVersion)
    throw ConfigError("unsupported config schema_version");

  RunConfig c;
  c.system_name = j.value("system_name", "custom");
  if (!j.contains("particles"))
    throw ConfigError("config: missing system/particles");
  for (int i = 0; i < 3; ++i) {
    c.particles[i].mass = j["particles"][i].value("mass", 1.0);
    c.particles[i].charge = j["particles"][i].value("charge", 0.0);
  }
  c.reference_mass = j.value("reference_mass", 1.0);
  for (const auto& p : j.value("stored_partitions", json::array({0})))
    c.stored_partitions.push_back(p.get<int>());
  if (j.contains("exchange") && !j["exchange"].is_null())
    c.exchange = ExchangeReduction{j["exchange"].value("image_partition", 1),
                                   j["exchange"].value("spin_S", 0)};

  for (const auto& e : j["entrance"]) {
    EntranceSpec es;
    es.partition = e.value("partition", 0);
    es.n = e.value("n", 1);
    es.lx = e.value("lx", 0);
    c.entrances.push_back(es);
  }

  const json& en = j["energy"];
  const std::string kind = en.value("kind", "impact");
  std::vector<double> vals;
  if (en.contains("values"))
    for (const auto& v : en["values"]) vals.push_back(v.get<double>());
  else if (en.contains("from")) {
    const double a = en["from"].get<double>(), b = en["to"].get<double>();
    const int n = en.value("count", 2);
    for (int i = 0; i < n; ++i)
      vals.push_back(n == 1 ? a : a + (b - a) * i / (n - 1.0));
  }
  c.energies_total = vals; // impact converted after the system is known
  c.energies_were_impact = (kind == "impact");
  if (kind != "impact" && kind != "total")
    throw ConfigError("config: energy.kind must be 'impact' or 'total'");

  c.Ls.clear();
  for (const auto& l : j["L"]) c.Ls.push_back(l.get<int>());
  if (j.contains("spin_sectors")) {
    c.spin_sectors.clear();
    for (const auto& s : j["spin_sectors"]) c.spin_sectors.push_back(s.get<int>());
  }
  c.theta_deg = j["theta_deg"].get<double>();

  const json& jb = j["basis"];
  const int nx = jb.value("nx", 35), ny = jb.value("ny", nx);
  for (int p = 0; p < 3; ++p) {
    c.basis[p].nx = nx;
    c.basis[p].ny = ny;
    c.basis[p].hx = 0.0; // resolved per pair strength in validate
    c.basis[p].hy = jb.value("hy", 0.5);
    if (jb.contains("hx")) {
      if (jb["hx"].is_number())
        c.basis[p].hx = jb["hx"].get<double>();
      else if (jb["hx"].contains(std::to_string(p)))
        c.basis[p].hx = jb["hx"][std::to_string(p)].get<double>();
    }
    if (jb.contains("hy") && jb["hy"].is_object() &&
        jb["hy"].contains(std::to_string(p)))
      c.basis[p].hy = jb["hy"][std::to_string(p)].get<double>();
  }

  c.truncation.lmax = j["truncation"].value("lmax", 4);
  c.truncation.Lmax = j["truncation"].value("Lmax", 5);

  if (j.contains("merkuriev"))
    for (int p = 0; p < 3; ++p) {
      const std::string key = std::to_string(p);
      if (j["merkuriev"].contains(key)) {
        MerkurievCutoff cut;
        cut.x0 = j["merkuriev"][key].value("x0", 1.0);
        cut.y0 = j["merkuriev"][key].value("y0", 10.0);
        cut.mu = j["merkuriev"][key].value("mu", 2.1);
        c.merkuriev[p] = cut;
      }
    }

  c.screening.y_cut = j["screening"].value("y_cut", 32.0);
  c.screening.y_sc = j["screening"].value("y_sc", 5.5);
  c.screening.n_exp = j["screening"].value("n_exp", 2.0);

  c.dw_variant = parse_variant(j["distorted_wave"].value("variant", "free"));
  c.dw_nmax = j["distorted_wave"].value("n_max", 2);
  c.dw_match_radius = j["distorted_wave"].value("match_radius", 150.0);
  c.dw_step = j["distorted_wave"].value("step", 0.01);

  if (j.contains("angular")) {
    c.angular_order = j["angular"].value("order", 0);
    c.amplitude_order = j["angular"].value("amplitude_order", 0);
  }
  if (j.contains("solver")) {
    c.max_unknowns = j["solver"].value("max_unknowns", 20000L);
    c.screen_lhs_w = j["solver"].value("screen_lhs_w", true);
    c.boundary_ymax = j["solver"].value("boundary_ymax", 120.0);
    c.exit_nmax = j["solver"].value("exit_nmax", 2);
  }
  c.output_dir = j["output"].value("dir", ".");
  c.output_prefix = j["output"].value("prefix", "fmscat");
  c.workers = j.value("workers", 0);

  validate_config(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  return config_from_json(j);
}

ThreeBodySystem RunConfig::make_system() const {
  return build_system(particles, reference_mass);
}

PotentialModel RunConfig::make_model(const ThreeBodySystem& sys) const {
  std::array<PairInteraction, 3> pairs;
  for (int p = 0; p < 3; ++p) {
    pairs[p].strength = sys.coulomb_strength(p);
    if (pairs[p].strength < 0.0) {
      if (merkuriev[p]) {
        pairs[p].cutoff = *merkuriev[p];
      } else {
        MerkurievCutoff cut;
        cut.x0 = HydrogenicState(-pairs[p].strength, 1, 0).mean_x();
        cut.y0 = 10.0;
        cut.mu = 2.1;
        pairs[p].cutoff = cut;
      }
    }
  }
  return PotentialModel(sys, pairs, screening);
}

void validate_config(RunConfig& c) {
  if (c.energies_total.empty()) throw ConfigError("config: empty energy grid");
  if (c.Ls.empty()) throw ConfigError("config: empty L list");
  if (c.entrances.empty()) throw ConfigError("config: no entrance channel");
  if (c.theta_deg >= 45.0)
    throw ConfigError("config: theta >= 45 deg is outside the CS domain");
  if (c.theta_deg > 10.0)
    c.warnings.push_back("theta above 10 deg: large CS angles degrade "
                         "scattering accuracy");
  if (c.theta_deg <= 0.0)
    throw ConfigError("config: theta must be positive for scattering runs");
  c.screening.validate();
  for (const auto& m : c.merkuriev)
    if (m) m->validate();
  for (const auto& e : c.entrances)
    if (e.lx != 0)
      throw ConfigError("config: entrance targets are ground-state-like "
                        "(lx = 0); excited degenerate targets are out of scope");
  // resolve default radial scales from the pair strengths
  ThreeBodySystem sys = c.make_system();
  for (int p = 0; p < 3; ++p) {
    const double s = sys.coulomb_strength(p);
    if (c.basis[p].hx <= 0.0) c.basis[p].hx = s < 0.0 ? 0.6 / (-s) : 0.5;
  }
  for (int ptn : c.stored_partitions)
    if (sys.coulomb_strength(ptn) >= 0.0)
      throw ConfigError("config: stored partition " + std::to_string(ptn) +
                        " has no bound pair");
  if (c.energies_were_impact) {
    // impact energies are relative to the first entrance threshold
    const auto& e0 = c.entrances.front();
    auto [st, ch] = hydrogenic_bound_state(sys, e0.partition, e0.n, e0.lx);
    for (double& E : c.energies_total) {
      if (E <= 0.0) throw ConfigError("config: impact energies must be positive");
      E = ch.E_a + E;
    }
    c.energies_were_impact = false; // stored as total now
  }
}

json RunConfig::normalized() const {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["system_name"] = system_name;
  for (int i = 0; i < 3; ++i)
    j["particles"].push_back(
        {{"mass", particles[i].mass}, {"charge", particles[i].charge}});
  j["reference_mass"] = reference_mass;
  j["stored_partitions"] = stored_partitions;
  if (exchange)
    j["exchange"] = {{"image_partition", exchange->image_partition},
                     {"spin_S", exchange->spin_S}};
  for (const auto& e : entrances)
    j["entrance"].push_back(
        {{"partition", e.partition}, {"n", e.n}, {"lx", e.lx}});
  j["energies_total"] = energies_total;
  j["L"] = Ls;
  j["spin_sectors"] = spin_sectors;
  j["theta_deg"] = theta_deg;
  for (int p = 0; p < 3; ++p)
    j["basis"].push_back({{"nx", basis[p].nx},
                          {"ny", basis[p].ny},
                          {"hx", basis[p].hx},
                          {"hy", basis[p].hy}});
  j["truncation"] = {{"lmax", truncation.lmax}, {"Lmax", truncation.Lmax}};
  j["screening"] = {{"y_cut", screening.y_cut},
                    {"y_sc", screening.y_sc},
                    {"n_exp", screening.n_exp}};
  j["distorted_wave"] = {{"variant", variant_name(dw_variant)},
                         {"n_max", dw_nmax},
                         {"match_radius", dw_match_radius},
                         {"step", dw_step}};
  j["angular"] = {{"order", angular_order}, {"amplitude_order", amplitude_order}};
  j["solver"] = {{"max_unknowns", max_unknowns},
                 {"screen_lhs_w", screen_lhs_w},
                 {"boundary_ymax", boundary_ymax},
                 {"exit_nmax", exit_nmax}};
  j["version"] = kVersion;
  return j;
}

std::uint64_t RunConfig::hash() const { return fnv1a64(normalized().dump()); }

} // namespace fmscat

#include "fmscat/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace fmscat {

using nlohmann::json;

namespace {

struct ExitChannel {
  int partition;
  BinaryChannel chan;
  int ly;
  double q;
  std::shared_ptr<DistortedWave> wave0, wave_th;
  int aux_index = -1; // index in the partition's auxiliary set, -1 if outside
};

int worker_count(const RunConfig& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  if (const char* env = std::getenv("FMSCAT_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Everything fixed for one (L, spin sector): context plus auxiliary sets.
struct Block {
  int L, S, parity;
  std::shared_ptr<FMContext> ctx;
  std::array<std::shared_ptr<const AuxiliaryPotential>, 3> aux; // per partition
  double wave_range = 0.0; // required coupled-channel solve extent
};

Block make_block(const RunConfig& cfg, const PotentialModel& model, int L, int S) {
  Block blk;
  blk.L = L;
  blk.S = S;
  blk.parity = (L % 2 == 0) ? 1 : -1;
  FMOptions opt;
  opt.theta = deg2rad(cfg.theta_deg);
  opt.angular_order = cfg.angular_order;
  opt.amplitude_order = cfg.amplitude_order;
  opt.max_unknowns = cfg.max_unknowns;
  opt.screen_lhs_w = cfg.screen_lhs_w;
  opt.boundary_ymax = cfg.boundary_ymax;
  auto exch = cfg.exchange;
  if (exch) exch->spin_S = S;
  blk.ctx = std::make_shared<FMContext>(model, cfg.stored_partitions, exch, L,
                                        blk.parity, cfg.truncation.lmax,
                                        cfg.basis, opt);
  const ThreeBodySystem& sys = model.system();
  if (cfg.dw_variant != AuxiliaryPotential::Variant::Free) {
    // the distortion lives on the entrance partitions
    for (const auto& e : cfg.entrances)
      if (!blk.aux[e.partition])
        blk.aux[e.partition] = std::make_shared<AuxiliaryPotential>(
            AuxiliaryPotential::build(cfg.dw_variant, sys, e.partition,
                                      cfg.dw_nmax, L, e.n, e.lx));
  }
  // solve range must cover the extraction quadratures and the mesh diagonal
  double need = std::hypot(110.0, cfg.boundary_ymax) * 1.02;
  for (int i = 0; i < blk.ctx->n_components(); ++i) {
    const auto& bx = blk.ctx->basis_x(i);
    const auto& by = blk.ctx->basis_y(i);
    need = std::max(need, 1.05 * std::hypot(bx.node(bx.size() - 1),
                                            by.node(by.size() - 1)));
  }
  blk.wave_range = std::max(cfg.dw_match_radius, need);
  return blk;
}

std::shared_ptr<DistortedWave> make_wave(const RunConfig& cfg, const Block& blk,
                                         const ThreeBodySystem& sys, double E,
                                         int partition, int n, int lx, int ly,
                                         double theta) {
  if (blk.aux[partition]) {
    const int idx = blk.aux[partition]->find_channel(n, lx, ly);
    if (idx >= 0) {
      CCOptions co;
      co.r_match = blk.wave_range;
      co.step = cfg.dw_step;
      co.theta = theta;
      return std::make_shared<DistortedWave>(
          solve_coupled_channels(blk.aux[partition], E, idx, co));
    }
  }
  auto freeaux = std::make_shared<AuxiliaryPotential>(AuxiliaryPotential::build(
      AuxiliaryPotential::Variant::Free, sys, partition, 1, blk.L, n, lx, ly));
  return std::make_shared<DistortedWave>(make_free_wave(freeaux, E, theta));
}

ScatterRecord solve_one(const RunConfig& cfg, const PotentialModel& model,
                        const Block& blk, double E, const EntranceSpec& ent) {
  const ThreeBodySystem& sys = model.system();
  const double theta = deg2rad(cfg.theta_deg);

  auto [est, ech] = hydrogenic_bound_state(sys, ent.partition, ent.n, ent.lx);
  if (E <= ech.E_a)
    throw ConfigError("entrance channel closed at E = " + fmt(E));

  ScatterRecord rec;
  rec.E_total = E;
  rec.E_impact = E - ech.E_a;
  rec.L = blk.L;
  rec.spin_S = blk.S;
  rec.entrance_label = ech.label;

  auto in0 = make_wave(cfg, blk, sys, E, ent.partition, ent.n, ent.lx, blk.L, 0.0);
  auto in_th =
      make_wave(cfg, blk, sys, E, ent.partition, ent.n, ent.lx, blk.L, theta);
  rec.matching_stability = std::max(in0->matching_stability(),
                                    in_th->matching_stability());

  CSLinearSystem lin = blk.ctx->assemble(E);
  lin.b = blk.ctx->rhs(E, *in_th);
  FMSolution sol = solve(lin);
  rec.rcond = sol.rcond;
  rec.residual = sol.residual_rel;

  // open exit channels across the active partitions
  std::vector<ExitChannel> exits;
  for (int p : cfg.stored_partitions)
    for (int n = 1; n <= cfg.exit_nmax; ++n)
      for (int lx = 0; lx < n; ++lx) {
        auto [st, ch] = hydrogenic_bound_state(sys, p, n, lx);
        if (E <= ch.E_a) continue;
        for (int ly = std::abs(blk.L - lx); ly <= blk.L + lx; ++ly) {
          if (((lx + ly) % 2 == 0 ? 1 : -1) != blk.parity) continue;
          if (ly > cfg.truncation.lmax || lx > cfg.truncation.lmax) continue;
          ExitChannel ex;
          ex.partition = p;
          ex.chan = ch;
          ex.ly = ly;
          ex.q = std::sqrt(E - ch.E_a);
          exits.push_back(std::move(ex));
        }
      }

  const double qa = std::sqrt(E - ech.E_a);
  const double cmf = sys.channel_mass_factor(ent.partition);
  const double denom = cmf * qa * qa;

  double flux_sum = 0.0;
  Complex S_aa = 0.0;
  for (auto& ex : exits) {
    ex.wave0 = (ex.partition == ent.partition && ex.chan.n == ent.n &&
                ex.chan.lx == ent.lx && ex.ly == blk.L)
                   ? in0
                   : make_wave(cfg, blk, sys, E, ex.partition, ex.chan.n,
                               ex.chan.lx, ex.ly, 0.0);
    ex.wave_th = (ex.partition == ent.partition && ex.chan.n == ent.n &&
                  ex.chan.lx == ent.lx && ex.ly == blk.L)
                     ? in_th
                     : make_wave(cfg, blk, sys, E, ex.partition, ex.chan.n,
                                 ex.chan.lx, ex.ly, theta);
    Complex Abar = extract_amplitude(*blk.ctx, sol.C, *in0, *ex.wave0, *ex.wave_th);
    Complex Atil = 0.0;
    if (ex.partition == ent.partition) {
      const int bi = in0->aux().find_channel(ex.chan.n, ex.chan.lx, ex.ly);
      if (bi >= 0) Atil = in0->Atilde(bi);
    }
    const Complex A = Abar + Atil;
    rec.A.push_back(A);
    rec.exit_labels.push_back(ex.chan.label + ",ly=" + std::to_string(ex.ly));
    rec.sigma_pia02.push_back(2.0 * (2 * blk.L + 1) * std::norm(A) / denom);

    const bool elastic = (ex.partition == ent.partition && ex.chan.n == ent.n &&
                          ex.chan.lx == ent.lx && ex.ly == blk.L);
    const Complex Sba = (elastic ? 1.0 : 0.0) + Complex(0, 2) * A;
    flux_sum += std::norm(Sba);
    if (elastic) S_aa = Sba;
  }
  rec.S_elastic = S_aa;
  rec.phase_elastic = 0.5 * std::arg(S_aa);
  rec.sigma_inel_pia02 = (2 * blk.L + 1) * (1.0 - std::norm(S_aa)) / (2.0 * denom);
  rec.flux_defect = std::abs(flux_sum - 1.0);
  if (rec.flux_defect > 1e-3) {
    rec.convergence_flag = true;
    rec.flag_reason = "unitarity defect above 1e-3 (near-threshold or basis)";
  }
  if (rec.rcond < 1e-12) {
    rec.convergence_flag = true;
    rec.flag_reason += (rec.flag_reason.empty() ? "" : "; ") +
                       std::string("ill-conditioned linear system");
  }
  return rec;
}

} // namespace

ResultSet run_scattering(const RunConfig& cfg) {
  ResultSet out;
  out.config_hash = cfg.hash();
  out.version = kVersion;
  out.warnings = cfg.warnings;

  ThreeBodySystem sys = cfg.make_system();
  PotentialModel model = cfg.make_model(sys);

  for (int L : cfg.Ls) {
    const std::vector<int> sectors =
        cfg.exchange ? cfg.spin_sectors : std::vector<int>{0};
    for (int S : sectors) {
      Block blk = make_block(cfg, model, L, S);
      struct Job {
        double E;
        EntranceSpec ent;
      };
      std::vector<Job> jobs;
      for (double E : cfg.energies_total)
        for (const auto& ent : cfg.entrances) jobs.push_back(Job{E, ent});

      std::vector<ScatterRecord> recs(jobs.size());
      std::vector<std::string> errors(jobs.size());
      std::atomic<std::size_t> next{0};
      const int nw = std::min<int>(worker_count(cfg), static_cast<int>(jobs.size()));
      auto work = [&]() {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= jobs.size()) break;
          try {
            recs[i] = solve_one(cfg, model, blk, jobs[i].E, jobs[i].ent);
          } catch (const std::exception& e) {
            errors[i] = "at E = " + fmt(jobs[i].E) + ", L = " +
                        std::to_string(L) + ": " + e.what();
          }
        }
      };
      if (nw <= 1) {
        work();
      } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nw; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
      }
      for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!errors[i].empty()) throw NumericError(errors[i]);
        out.records.push_back(std::move(recs[i]));
      }
    }
  }

  std::stable_sort(out.records.begin(), out.records.end(),
                   [](const ScatterRecord& a, const ScatterRecord& b) {
                     return std::tie(a.E_total, a.L, a.spin_S, a.entrance_label) <
                            std::tie(b.E_total, b.L, b.spin_S, b.entrance_label);
                   });
  return out;
}

SweepResult run_convergence_sweep(const RunConfig& cfg, const std::string& axis,
                                  const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("sweep: no axis values");
  SweepResult sw;
  sw.axis = axis;
  sw.values = values;
  for (double v : values) {
    RunConfig c = cfg;
    if (axis == "N") {
      for (auto& b : c.basis) b.nx = b.ny = static_cast<int>(v);
    } else if (axis == "theta") {
      c.theta_deg = v;
    } else if (axis == "lmax") {
      c.truncation.lmax = static_cast<int>(v);
    } else if (axis == "y_cut") {
      c.screening.y_cut = v;
    } else {
      throw ConfigError("sweep: unknown axis '" + axis +
                        "' (use N, theta, lmax, y_cut)");
    }
    c.warnings.clear();
    validate_config(c);
    sw.runs.push_back(run_scattering(c));
  }
  return sw;
}

SpectrumResult run_spectrum(const RunConfig& cfg) {
  SpectrumResult sp;
  sp.config_hash = cfg.hash();
  ThreeBodySystem sys = cfg.make_system();
  PotentialModel model = cfg.make_model(sys);
  const double theta = deg2rad(cfg.theta_deg);

  for (int p : cfg.stored_partitions) {
    const double Zs = -sys.coulomb_strength(p);
    for (int n = 1; n <= 3; ++n)
      sp.thresholds.push_back(-Zs * Zs / (4.0 * n * n));
  }
  std::sort(sp.thresholds.begin(), sp.thresholds.end());
  sp.thresholds.erase(std::unique(sp.thresholds.begin(), sp.thresholds.end(),
                                  [](double a, double b) {
                                    return std::abs(a - b) < 1e-12;
                                  }),
                      sp.thresholds.end());

  for (int L : cfg.Ls) {
    const std::vector<int> sectors =
        cfg.exchange ? cfg.spin_sectors : std::vector<int>{0};
    for (int S : sectors) {
      Block blk = make_block(cfg, model, L, S);
      Eigen::VectorXcd ev = cs_spectrum(blk.ctx->hamiltonian());
      for (long i = 0; i < ev.size(); ++i) {
        SpectrumEntry e;
        e.L = L;
        e.spin_S = S;
        e.eigenvalue = ev(i);
        const double re = ev(i).real(), im = ev(i).imag();
        if (re < sp.thresholds.front() - 1e-8 && std::abs(im) < 1e-3) {
          e.label = "bound";
        } else {
          double best = 1e30;
          double best_t = 0;
          for (double t : sp.thresholds) {
            if (re < t - 1e-10) continue;
            const double want = -2.0 * theta;
            const double got = std::atan2(im, re - t);
            const double d = std::abs(got - want);
            if (d < best) {
              best = d;
              best_t = t;
            }
          }
          if (best < deg2rad(10.0))
            e.label = "ray(" + fmt(best_t) + ")";
          else
            e.label = "other";
        }
        sp.entries.push_back(std::move(e));
      }
    }
  }
  return sp;
}

void write_records_csv(const ResultSet& rs, std::ostream& os) {
  os << "E_total,E_impact,L,S,entrance,exit,re_A,im_A,sigma_pia02,sigma_a02,"
        "sigma_inel_pia02,phase_elastic,abs_S_elastic,flux_defect,rcond,"
        "residual,flag,flag_reason\n";
  for (const auto& r : rs.records)
    for (std::size_t b = 0; b < r.exit_labels.size(); ++b)
      os << fmt(r.E_total) << ',' << fmt(r.E_impact) << ',' << r.L << ','
         << r.spin_S << ',' << r.entrance_label << ',' << r.exit_labels[b]
         << ',' << fmt(r.A[b].real()) << ',' << fmt(r.A[b].imag()) << ','
         << fmt(r.sigma_pia02[b]) << ',' << fmt(r.sigma_pia02[b] * PI) << ','
         << fmt(r.sigma_inel_pia02) << ',' << fmt(r.phase_elastic) << ','
         << fmt(std::abs(r.S_elastic)) << ',' << fmt(r.flux_defect) << ','
         << fmt(r.rcond) << ',' << fmt(r.residual) << ','
         << (r.convergence_flag ? 1 : 0) << ',' << r.flag_reason << '\n';
}

void write_records_json(const ResultSet& rs, const RunConfig& cfg,
                        std::ostream& os) {
  json j;
  j["config_hash"] = rs.config_hash;
  j["version"] = rs.version;
  j["config"] = cfg.normalized();
  j["warnings"] = rs.warnings;
  for (const auto& r : rs.records) {
    json rec;
    rec["E_total"] = r.E_total;
    rec["E_impact"] = r.E_impact;
    rec["L"] = r.L;
    rec["S"] = r.spin_S;
    rec["entrance"] = r.entrance_label;
    for (std::size_t b = 0; b < r.exit_labels.size(); ++b) {
      rec["exits"].push_back({{"label", r.exit_labels[b]},
                              {"A", {r.A[b].real(), r.A[b].imag()}},
                              {"sigma_pia02", r.sigma_pia02[b]}});
    }
    rec["sigma_inel_pia02"] = r.sigma_inel_pia02;
    rec["S_elastic"] = {r.S_elastic.real(), r.S_elastic.imag()};
    rec["phase_elastic"] = r.phase_elastic;
    rec["flux_defect"] = r.flux_defect;
    rec["rcond"] = r.rcond;
    rec["residual"] = r.residual;
    rec["matching_stability"] = r.matching_stability;
    rec["convergence_flag"] = r.convergence_flag;
    rec["flag_reason"] = r.flag_reason;
    j["records"].push_back(std::move(rec));
  }
  os << j.dump(2) << '\n';
}

void write_sweep_csv(const SweepResult& sw, std::ostream& os) {
  os << "axis,value,E_total,L,S,entrance,phase_elastic,sigma_el_pia02,"
        "sigma_inel_pia02,flux_defect,d_phase_vs_prev\n";
  for (std::size_t i = 0; i < sw.runs.size(); ++i) {
    const auto& rs = sw.runs[i];
    for (std::size_t k = 0; k < rs.records.size(); ++k) {
      const auto& r = rs.records[k];
      double dphase = 0.0;
      if (i > 0 && k < sw.runs[i - 1].records.size())
        dphase = r.phase_elastic - sw.runs[i - 1].records[k].phase_elastic;
      double sig_el = 0.0;
      const std::string el_label =
          r.entrance_label + ",ly=" + std::to_string(r.L);
      for (std::size_t b = 0; b < r.exit_labels.size(); ++b)
        if (r.exit_labels[b] == el_label) sig_el = r.sigma_pia02[b];
      os << sw.axis << ',' << fmt(sw.values[i]) << ',' << fmt(r.E_total) << ','
         << r.L << ',' << r.spin_S << ',' << r.entrance_label << ','
         << fmt(r.phase_elastic) << ',' << fmt(sig_el) << ','
         << fmt(r.sigma_inel_pia02) << ',' << fmt(r.flux_defect) << ','
         << fmt(dphase) << '\n';
    }
  }
}

void write_spectrum_csv(const SpectrumResult& sp, std::ostream& os) {
  os << "L,S,re_E,im_E,label\n";
  for (const auto& e : sp.entries)
    os << e.L << ',' << e.spin_S << ',' << fmt(e.eigenvalue.real()) << ','
       << fmt(e.eigenvalue.imag()) << ',' << e.label << '\n';
}

std::vector<std::string> persist_results(const ResultSet& rs, const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  const std::string base = cfg.output_dir + "/" + cfg.output_prefix;
  std::vector<std::string> paths;
  {
    std::ofstream os(base + "_sigma.csv");
    write_records_csv(rs, os);
    paths.push_back(base + "_sigma.csv");
  }
  {
    std::ofstream os(base + "_records.json");
    write_records_json(rs, cfg, os);
    paths.push_back(base + "_records.json");
  }
  return paths;
}

} // namespace fmscat

#include "fmscat/fm_assembler.hpp"

#include <cmath>
#include <string>

namespace fmscat {

namespace {
constexpr double kVsCut = 1e-15; // skip coupling rows where V^s is nil
}

std::vector<std::pair<int, int>> enumerate_lxly(int L, int parity, int lmax) {
  std::vector<std::pair<int, int>> out;
  for (int lx = 0; lx <= lmax; ++lx)
    for (int ly = std::abs(L - lx); ly <= std::min(lmax, L + lx); ++ly) {
      if (((lx + ly) % 2 == 0 ? 1 : -1) != parity) continue;
      out.emplace_back(lx, ly);
    }
  return out;
}

std::vector<PartialWaveChannel>
enumerate_channels(const ChannelTruncation& trunc, int L, int parity,
                   const std::vector<int>& components) {
  if (trunc.lmax < L)
    throw ConfigError("enumerate_channels: lmax < L leaves no (lx, ly) pairs "
                      "for target ground states");
  const auto pairs = enumerate_lxly(L, parity, trunc.lmax);
  if (pairs.empty() || components.empty())
    throw ConfigError("enumerate_channels: empty channel set");
  std::vector<PartialWaveChannel> out;
  for (int comp : components)
    for (const auto& [lx, ly] : pairs)
      out.push_back(PartialWaveChannel{comp, lx, ly});
  return out;
}

struct FMContext::RotationTable {
  int obs_partition = -1, src_partition = -1;
  int nx = 0, ny = 0, nu = 0, nch = 0, nxs = 0, nys = 0;
  std::vector<double> xs, ys, invxy; // [(ix*ny+iy)*nu + k]
  std::vector<double> K;             // [point * nch*nch + c*nch + c']
  std::vector<double> fx;            // [point * nxs + jx]
  std::vector<double> fy;            // [point * nys + jy]
};

FMContext::FMContext(const PotentialModel& model,
                     std::vector<int> stored_partitions,
                     std::optional<ExchangeReduction> exchange, int L,
                     int parity, int lmax,
                     const std::array<BasisSpec, 3>& basis, FMOptions opt)
    : model_(&model), parts_(std::move(stored_partitions)), exchange_(exchange),
      L_(L), parity_(parity), lmax_(lmax), opt_(opt), basis_spec_(basis),
      contractor_(L, std::max(lmax, opt.extraction_lmax > 0 ? opt.extraction_lmax
                                                            : lmax + 4)) {
  if (parts_.empty()) throw ConfigError("FMContext: no stored components");
  for (int p : parts_)
    if (!model_->has_component(p))
      throw ConfigError("FMContext: partition " + std::to_string(p) +
                        " has no short-range split (no component)");
  lxly_ = enumerate_lxly(L, parity, lmax);
  if (lxly_.empty()) throw ConfigError("FMContext: empty channel list");
  const int lmax_op = opt.extraction_lmax > 0 ? opt.extraction_lmax : lmax + 4;
  lxly_op_ = lxly_; // keep the model channels as a prefix
  for (const auto& p : enumerate_lxly(L, parity, lmax_op))
    if (std::find(lxly_op_.begin(), lxly_op_.end(), p) == lxly_op_.end())
      lxly_op_.push_back(p);

  for (int p : parts_) {
    bx_.push_back(std::make_shared<LagrangeLaguerreBasis>(basis[p].nx, basis[p].hx));
    by_.push_back(std::make_shared<LagrangeLaguerreBasis>(basis[p].ny, basis[p].hy));
  }
  offsets_.assign(parts_.size() + 1, 0);
  for (std::size_t i = 0; i < parts_.size(); ++i)
    offsets_[i + 1] = offsets_[i] + static_cast<int>(lxly_.size()) *
                                        bx_[i]->size() * by_[i]->size();
  dim_ = offsets_.back();
  if (dim_ > opt_.max_unknowns)
    throw ResourceError("FMContext: " + std::to_string(dim_) +
                        " unknowns exceed the configured limit " +
                        std::to_string(opt_.max_unknowns));

  // the unsplit repulsive pair keeps a bare Coulomb in the rotation kernels,
  // whose endpoint behavior needs well above the polynomial-degree estimate
  const int order =
      opt_.angular_order > 0 ? opt_.angular_order : std::max(2 * lmax + 6, 32);
  const int order_amp = opt_.amplitude_order > 0 ? opt_.amplitude_order : 2 * order;
  ugrid_ = gauss_legendre(order);
  ugrid_amp_ = gauss_legendre(order_amp);

  // same-frame kernels: assembly grid on the model space, amplitude grid on
  // the extraction space
  auto fill_id = [&](const AngularGrid& g, const std::vector<std::pair<int, int>>& ch,
                     std::vector<double>& store) {
    const int n = static_cast<int>(ch.size());
    store.assign(static_cast<std::size_t>(g.order()) * n * n, 0.0);
    DirTables t;
    for (int k = 0; k < g.order(); ++k) {
      const double u = g.abscissas[k];
      contractor_.prepare(u, InPlaneDir{1.0, 1.0}, InPlaneDir{u, 1.0}, t);
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          store[(static_cast<std::size_t>(k) * n + c) * n + d] =
              contractor_.contract(ch[c].first, ch[c].second, ch[d].first,
                                   ch[d].second, t);
    }
  };
  fill_id(ugrid_, lxly_, kid_);
  fill_id(ugrid_amp_, lxly_op_, kid_amp_);

  build_tables();
}

FMContext::~FMContext() = default;
FMContext::FMContext(FMContext&&) noexcept = default;

int FMContext::chan_of(int lx, int ly) const {
  for (std::size_t i = 0; i < lxly_.size(); ++i)
    if (lxly_[i].first == lx && lxly_[i].second == ly) return static_cast<int>(i);
  return -1;
}

int FMContext::chan_of_op(int lx, int ly) const {
  for (std::size_t i = 0; i < lxly_op_.size(); ++i)
    if (lxly_op_[i].first == lx && lxly_op_[i].second == ly)
      return static_cast<int>(i);
  return -1;
}

long FMContext::index(int comp, int chan, int ix, int iy) const {
  return offsets_[comp] +
         (static_cast<long>(chan) * bx_[comp]->size() + ix) * by_[comp]->size() +
         iy;
}

std::vector<PartialWaveChannel> FMContext::channels() const {
  std::vector<PartialWaveChannel> out;
  for (std::size_t i = 0; i < parts_.size(); ++i)
    for (const auto& [lx, ly] : lxly_)
      out.push_back(PartialWaveChannel{parts_[i], lx, ly});
  return out;
}

double FMContext::exchange_sign(int chan) const {
  if (!exchange_) return 1.0;
  const int s = exchange_->spin_S + lxly_[chan].first;
  return (s % 2) ? -1.0 : 1.0;
}

double FMContext::exchange_sign_op(int chan) const {
  if (!exchange_) return 1.0;
  const int s = exchange_->spin_S + lxly_op_[chan].first;
  return (s % 2) ? -1.0 : 1.0;
}

void FMContext::build_tables() {
  // partitions appearing as observers/sources: stored components plus the
  // exchange image (which reuses the first stored component's basis)
  std::vector<std::pair<int, int>> part_basis; // (partition, basis comp index)
  for (std::size_t i = 0; i < parts_.size(); ++i)
    part_basis.emplace_back(parts_[i], static_cast<int>(i));
  if (exchange_) part_basis.emplace_back(exchange_->image_partition, 0);

  const ThreeBodySystem& sys = model_->system();
  const int nch = static_cast<int>(lxly_.size());
  const int nu = ugrid_.order();

  for (const auto& [po, bo] : part_basis)
    for (const auto& [ps, bs] : part_basis) {
      if (po == ps) continue;
      auto tab = std::make_unique<RotationTable>();
      tab->obs_partition = po;
      tab->src_partition = ps;
      const LagrangeLaguerreBasis& obx = *bx_[bo];
      const LagrangeLaguerreBasis& oby = *by_[bo];
      const LagrangeLaguerreBasis& sbx = *bx_[bs];
      const LagrangeLaguerreBasis& sby = *by_[bs];
      tab->nx = obx.size();
      tab->ny = oby.size();
      tab->nu = nu;
      tab->nch = nch;
      tab->nxs = sbx.size();
      tab->nys = sby.size();
      const std::size_t npts = static_cast<std::size_t>(tab->nx) * tab->ny * nu;
      tab->xs.resize(npts);
      tab->ys.resize(npts);
      tab->invxy.resize(npts);
      tab->K.resize(npts * nch * nch);
      tab->fx.resize(npts * tab->nxs);
      tab->fy.resize(npts * tab->nys);
      DirTables dt;
      for (int ix = 0; ix < tab->nx; ++ix)
        for (int iy = 0; iy < tab->ny; ++iy) {
          const double X = obx.node(ix), Y = oby.node(iy);
          for (int k = 0; k < nu; ++k) {
            const std::size_t pt =
                (static_cast<std::size_t>(ix) * tab->ny + iy) * nu + k;
            const RotatedFrame f = sys.rotate(po, ps, X, Y, ugrid_.abscissas[k]);
            tab->xs[pt] = f.x;
            tab->ys[pt] = f.y;
            tab->invxy[pt] = 1.0 / (f.x * f.y);
            contractor_.prepare(ugrid_.abscissas[k], InPlaneDir{f.cos_x, f.sgn_x},
                                InPlaneDir{f.cos_y, f.sgn_y}, dt);
            for (int c = 0; c < nch; ++c)
              for (int d = 0; d < nch; ++d)
                tab->K[pt * nch * nch + static_cast<std::size_t>(c) * nch + d] =
                    contractor_.contract(lxly_[c].first, lxly_[c].second,
                                         lxly_[d].first, lxly_[d].second, dt);
            sbx.eval_all(f.x, &tab->fx[pt * tab->nxs]);
            sby.eval_all(f.y, &tab->fy[pt * tab->nys]);
          }
        }
      tables_.push_back(std::move(tab));
    }
}

const FMContext::RotationTable& FMContext::table(int obs_partition,
                                                 int src_partition) const {
  for (const auto& t : tables_)
    if (t->obs_partition == obs_partition && t->src_partition == src_partition)
      return *t;
  throw NumericError("FMContext: missing rotation table " +
                     std::to_string(obs_partition) + " <- " +
                     std::to_string(src_partition));
}

void FMContext::override_w_separable(std::shared_ptr<const AuxiliaryPotential> w) {
  w_override_ = std::move(w);
}

void FMContext::w_matrix(int p, double x, double y, double theta,
                         Eigen::MatrixXcd& out) const {
  const int nch = static_cast<int>(lxly_.size());
  out.setZero(nch, nch);
  const double ang = 8.0 * PI * PI / (2.0 * L_ + 1.0);
  for (int k = 0; k < ugrid_.order(); ++k) {
    const Complex w = model_->W_scaled(p, x, y, ugrid_.abscissas[k], theta);
    const Complex f = ang * ugrid_.weights[k] * w;
    const double* kk = &kid_[static_cast<std::size_t>(k) * nch * nch];
    for (int c = 0; c < nch; ++c)
      for (int d = 0; d < nch; ++d) out(c, d) += f * kk[c * nch + d];
  }
}

void FMContext::vother_matrix(int p, double x, double y, double theta,
                              Eigen::MatrixXcd& out) const {
  const int nop = static_cast<int>(lxly_op_.size());
  out.setZero(nop, nop);
  const ThreeBodySystem& sys = model_->system();
  const double ang = 8.0 * PI * PI / (2.0 * L_ + 1.0);
  for (int k = 0; k < ugrid_amp_.order(); ++k) {
    Complex v = 0.0;
    for (int d = 0; d < 3; ++d) {
      if (d == p) continue;
      const RotatedFrame f = sys.rotate(p, d, x, y, ugrid_amp_.abscissas[k]);
      v += model_->V_scaled(d, f.x, theta);
    }
    const Complex fct = ang * ugrid_amp_.weights[k] * v;
    const double* kk = &kid_amp_[static_cast<std::size_t>(k) * nop * nop];
    for (int c = 0; c < nop; ++c)
      for (int m = 0; m < nop; ++m) out(c, m) += fct * kk[c * nop + m];
  }
}

CSLinearSystem FMContext::assemble(double E) const {
  const int nch = static_cast<int>(lxly_.size());
  const double theta = opt_.theta;
  const Complex rot2 = std::exp(Complex(0.0, -2.0 * theta));
  const Complex eith = std::exp(Complex(0.0, theta));

  CSLinearSystem sys;
  sys.E = E;
  sys.L = L_;
  sys.theta = theta;
  sys.block_offsets = offsets_;
  sys.A = Eigen::MatrixXcd::Zero(dim_, dim_);
  Eigen::MatrixXcd& A = sys.A;

  for (std::size_t ci = 0; ci < parts_.size(); ++ci) {
    const int p = parts_[ci];
    const LagrangeLaguerreBasis& bx = *bx_[ci];
    const LagrangeLaguerreBasis& by = *by_[ci];
    const int Nx = bx.size(), Ny = by.size();

    // kinetic blocks e^{-2 i theta} (T_x + T_y + centrifugal) and the pair
    // Coulomb diagonal
    for (int c = 0; c < nch; ++c) {
      const Eigen::MatrixXd Tx = bx.kinetic_matrix(lxly_[c].first);
      const Eigen::MatrixXd Ty = by.kinetic_matrix(lxly_[c].second);
      for (int ix = 0; ix < Nx; ++ix)
        for (int jx = 0; jx < Nx; ++jx) {
          const Complex t = rot2 * Tx(ix, jx);
          if (t == 0.0) continue;
          for (int iy = 0; iy < Ny; ++iy)
            A(index(ci, c, ix, iy), index(ci, c, jx, iy)) += t;
        }
      for (int iy = 0; iy < Ny; ++iy)
        for (int jy = 0; jy < Ny; ++jy) {
          const Complex t = rot2 * Ty(iy, jy);
          if (t == 0.0) continue;
          for (int ix = 0; ix < Nx; ++ix)
            A(index(ci, c, ix, iy), index(ci, c, ix, jy)) += t;
        }
      for (int ix = 0; ix < Nx; ++ix) {
        const Complex v = model_->V_scaled(p, bx.node(ix), theta);
        for (int iy = 0; iy < Ny; ++iy) {
          const long r = index(ci, c, ix, iy);
          A(r, r) += v;
        }
      }
    }

    // three-body long-range term on the component diagonal
    if (!w_override_) {
      Eigen::MatrixXcd wm(nch, nch);
      for (int ix = 0; ix < Nx; ++ix)
        for (int iy = 0; iy < Ny; ++iy) {
          const double X = bx.node(ix), Y = by.node(iy);
          w_matrix(p, X, Y, theta, wm);
          const double scr =
              opt_.screen_lhs_w ? model_->screening().factor(Y) : 1.0;
          for (int c = 0; c < nch; ++c)
            for (int d = 0; d < nch; ++d) {
              const Complex v = scr * wm(c, d);
              if (v != 0.0) A(index(ci, c, ix, iy), index(ci, d, ix, iy)) += v;
            }
        }
    } else {
      // separable replacement: sum_ss' |phi_s> lambda_ss'(y) <phi_s'|
      const AuxiliaryPotential& wo = *w_override_;
      Eigen::MatrixXcd lam(wo.size(), wo.size());
      std::vector<int> cmap(wo.size());
      for (int s = 0; s < wo.size(); ++s)
        cmap[s] = chan_of(wo.channel(s).chan.lx, wo.channel(s).ly);
      std::vector<std::vector<Complex>> proj(
          wo.size(), std::vector<Complex>(Nx)); // sqrt(w) phi_s(X e^{i theta})
      for (int s = 0; s < wo.size(); ++s)
        for (int ix = 0; ix < Nx; ++ix)
          proj[s][ix] = bx.sqrt_weight(ix) *
                        wo.channel(s).state.eval(bx.node(ix) * eith);
      for (int iy = 0; iy < Ny; ++iy) {
        const double Y = by.node(iy);
        wo.lambda(Y * eith, lam);
        const double scr = model_->screening().factor(Y);
        for (int s = 0; s < wo.size(); ++s) {
          if (cmap[s] < 0) continue;
          for (int sp = 0; sp < wo.size(); ++sp) {
            if (cmap[sp] < 0 || lam(s, sp) == 0.0) continue;
            const Complex f = scr * lam(s, sp) * eith;
            for (int ix = 0; ix < Nx; ++ix)
              for (int jx = 0; jx < Nx; ++jx)
                A(index(ci, cmap[s], ix, iy), index(ci, cmap[sp], jx, iy)) +=
                    f * proj[s][ix] * proj[sp][jx];
          }
        }
      }
    }
  }

  // V^s coupling blocks (moved to the left-hand side with +V^s)
  if (opt_.couple_components) {
    const double ang = 8.0 * PI * PI / (2.0 * L_ + 1.0);
    std::vector<Complex> buf; // per observer point: [(c*nch+c') * nxs*nys]
    for (std::size_t ci = 0; ci < parts_.size(); ++ci) {
      const int p = parts_[ci];
      const LagrangeLaguerreBasis& bx = *bx_[ci];
      const LagrangeLaguerreBasis& by = *by_[ci];
      const int Nx = bx.size(), Ny = by.size();

      struct Source {
        const RotationTable* tab;
        int src_comp;   // component whose coefficients are referenced
        bool image;     // apply exchange signs
      };
      std::vector<Source> sources;
      for (std::size_t cj = 0; cj < parts_.size(); ++cj)
        if (cj != ci)
          sources.push_back(Source{&table(p, parts_[cj]), static_cast<int>(cj), false});
      if (exchange_)
        sources.push_back(Source{&table(p, exchange_->image_partition), 0, true});

      for (const Source& src : sources) {
        const RotationTable& T = *src.tab;
        const long slab = static_cast<long>(T.nxs) * T.nys;
        buf.assign(static_cast<std::size_t>(nch) * nch * slab, Complex(0.0));
        for (int ix = 0; ix < Nx; ++ix)
          for (int iy = 0; iy < Ny; ++iy) {
            const double X = bx.node(ix), Y = by.node(iy);
            const Complex vs = model_->Vs_scaled(p, X, Y, theta);
            if (std::abs(vs) < kVsCut) continue;
            const Complex pref = vs * bx.sqrt_weight(ix) * by.sqrt_weight(iy) *
                                 ang * X * Y;
            std::fill(buf.begin(), buf.end(), Complex(0.0));
            for (int k = 0; k < T.nu; ++k) {
              const std::size_t pt =
                  (static_cast<std::size_t>(ix) * Ny + iy) * T.nu + k;
              const Complex g = pref * ugrid_.weights[k] * T.invxy[pt];
              const double* kk = &T.K[pt * nch * nch];
              const double* fx = &T.fx[pt * T.nxs];
              const double* fy = &T.fy[pt * T.nys];
              for (int c = 0; c < nch; ++c)
                for (int d = 0; d < nch; ++d) {
                  const double kv = kk[c * nch + d];
                  if (kv == 0.0) continue;
                  const Complex s = g * kv;
                  Complex* row = &buf[static_cast<std::size_t>(c * nch + d) * slab];
                  for (int jx = 0; jx < T.nxs; ++jx) {
                    const Complex sx = s * fx[jx];
                    Complex* out = row + static_cast<long>(jx) * T.nys;
                    for (int jy = 0; jy < T.nys; ++jy) out[jy] += sx * fy[jy];
                  }
                }
            }
            for (int c = 0; c < nch; ++c)
              for (int d = 0; d < nch; ++d) {
                const double sgn = src.image ? exchange_sign(d) : 1.0;
                const Complex* vals = &buf[static_cast<std::size_t>(c * nch + d) * slab];
                const long r = index(ci, c, ix, iy);
                for (int jx = 0; jx < T.nxs; ++jx)
                  for (int jy = 0; jy < T.nys; ++jy) {
                    const Complex v = vals[static_cast<long>(jx) * T.nys + jy];
                    if (v != 0.0)
                      A(r, index(src.src_comp, d, jx, jy)) += sgn * v;
                  }
              }
          }
      }
    }
  }

  A.diagonal().array() -= E;
  return sys;
}

Eigen::MatrixXcd FMContext::hamiltonian() const { return assemble(0.0).A; }

void FMContext::incoming_values(const DistortedWave& w, double x, double y,
                                std::vector<Complex>& f) const {
  f.assign(lxly_.size(), Complex(0.0));
  for (int s = 0; s < w.n_channels(); ++s) {
    const int c = chan_of(w.channel(s).chan.lx, w.channel(s).ly);
    if (c < 0) continue;
    f[c] += w.phi(s, x) * w.g(s, y);
  }
}

void FMContext::incoming_values_op(const DistortedWave& w, double x, double y,
                                   std::vector<Complex>& f) const {
  f.assign(lxly_op_.size(), Complex(0.0));
  for (int s = 0; s < w.n_channels(); ++s) {
    const int c = chan_of_op(w.channel(s).chan.lx, w.channel(s).ly);
    if (c < 0) continue;
    f[c] += w.phi(s, x) * w.g(s, y);
  }
}

Eigen::VectorXcd FMContext::rhs(double E, const DistortedWave& incoming) const {
  (void)E;
  if (std::abs(incoming.theta() - opt_.theta) > 1e-14)
    throw ConfigError("FMContext::rhs: incoming wave solved at a different theta");
  const int pe = incoming.aux().partition();
  const int nch = static_cast<int>(lxly_.size());
  const double theta = opt_.theta;
  const Complex eith = std::exp(Complex(0.0, theta));
  const double ang = 8.0 * PI * PI / (2.0 * L_ + 1.0);

  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(dim_);
  std::vector<Complex> fin(nch);

  for (std::size_t ci = 0; ci < parts_.size(); ++ci) {
    const int p = parts_[ci];
    const LagrangeLaguerreBasis& bx = *bx_[ci];
    const LagrangeLaguerreBasis& by = *by_[ci];
    const int Nx = bx.size(), Ny = by.size();

    // coupling term V^s_p times the incoming wave of every other partition
    // carrying it: the entrance partition itself and, for identical systems,
    // its exchange image
    struct InSrc {
      int partition;
      bool image;
    };
    std::vector<InSrc> insrc;
    if (pe != p) insrc.push_back(InSrc{pe, false});
    if (exchange_ && exchange_->image_partition != p)
      insrc.push_back(InSrc{exchange_->image_partition, true});

    for (const InSrc& s : insrc) {
      if (s.image && pe != parts_[0])
        throw ConfigError("FMContext::rhs: exchange image requires entrance in "
                          "the stored partition");
      const RotationTable& T = table(p, s.partition);
      for (int ix = 0; ix < Nx; ++ix)
        for (int iy = 0; iy < Ny; ++iy) {
          const double X = bx.node(ix), Y = by.node(iy);
          const Complex vs = model_->Vs_scaled(p, X, Y, theta);
          if (std::abs(vs) < kVsCut) continue;
          const Complex pref = vs * bx.sqrt_weight(ix) * by.sqrt_weight(iy) *
                               ang * X * Y;
          std::vector<Complex> acc(nch, Complex(0.0));
          for (int k = 0; k < T.nu; ++k) {
            const std::size_t pt =
                (static_cast<std::size_t>(ix) * Ny + iy) * T.nu + k;
            const double* kk = &T.K[pt * nch * nch];
            const Complex g = ugrid_.weights[k] * T.invxy[pt];
            for (int sc = 0; sc < incoming.n_channels(); ++sc) {
              const int d = chan_of(incoming.channel(sc).chan.lx,
                                    incoming.channel(sc).ly);
              if (d < 0) continue;
              const double sgn = s.image ? exchange_sign(d) : 1.0;
              const Complex fv = incoming.phi(sc, T.xs[pt]) *
                                 incoming.g(sc, T.ys[pt]) * sgn;
              if (fv == 0.0) continue;
              for (int c = 0; c < nch; ++c)
                acc[c] += g * kk[c * nch + d] * fv;
            }
          }
          for (int c = 0; c < nch; ++c)
            b(index(ci, c, ix, iy)) -= pref * acc[c];
        }
    }

    // residual term on the entrance component: screened (W - W~) Phi_in
    if (pe == p) {
      Eigen::MatrixXcd wm(nch, nch);
      Eigen::MatrixXcd lam;
      for (int ix = 0; ix < Nx; ++ix)
        for (int iy = 0; iy < Ny; ++iy) {
          const double X = bx.node(ix), Y = by.node(iy);
          const double scr = model_->screening().factor(Y);
          if (scr < 1e-300) continue;
          incoming_values(incoming, X, Y, fin);

          std::vector<Complex> wphi(nch, Complex(0.0));
          if (!w_override_) {
            w_matrix(p, X, Y, theta, wm);
            for (int c = 0; c < nch; ++c)
              for (int d = 0; d < nch; ++d) wphi[c] += wm(c, d) * fin[d];
          } else {
            const AuxiliaryPotential& wo = *w_override_;
            lam.resize(wo.size(), wo.size());
            wo.lambda(Y * eith, lam);
            for (int s = 0; s < wo.size(); ++s) {
              const int c = chan_of(wo.channel(s).chan.lx, wo.channel(s).ly);
              if (c < 0) continue;
              Complex t = 0.0;
              for (int sp = 0; sp < wo.size(); ++sp) {
                if (lam(s, sp) == 0.0) continue;
                // bilinear overlap of the override state with the incoming
                // wave's states: orthonormal same-family states assumed
                for (int sc = 0; sc < incoming.n_channels(); ++sc) {
                  const auto& oc = wo.channel(sp);
                  const auto& icch = incoming.channel(sc);
                  if (oc.chan.n == icch.chan.n && oc.chan.lx == icch.chan.lx &&
                      oc.ly == icch.ly)
                    t += lam(s, sp) * incoming.g(sc, Y);
                }
              }
              wphi[c] += wo.channel(s).state.eval(X * eith) * t;
            }
          }

          // subtract the auxiliary potential applied to its own wave
          for (int sc = 0; sc < incoming.n_channels(); ++sc) {
            const int c = chan_of(incoming.channel(sc).chan.lx,
                                  incoming.channel(sc).ly);
            if (c < 0) continue;
            wphi[c] -= incoming.phi(sc, X) * incoming.wtilde_g(sc, Y);
          }

          const double wgt = bx.sqrt_weight(ix) * by.sqrt_weight(iy);
          for (int c = 0; c < nch; ++c)
            b(index(ci, c, ix, iy)) -= wgt * scr * wphi[c];
        }
    }
  }
  return b;
}

void FMContext::extraction_function(const DistortedWave& exit_wave, double x,
                                    double y, double theta,
                                    std::vector<Complex>& H) const {
  // components live in the extended extraction space: cross-frame pairings
  // probe operator content beyond the model truncation
  const int nop = static_cast<int>(lxly_op_.size());
  const int pb = exit_wave.aux().partition();
  const Complex eith = std::exp(Complex(0.0, theta));
  H.assign(nop, Complex(0.0));
  std::vector<Complex> fin(nop);
  incoming_values_op(exit_wave, x, y, fin);

  if (!w_overridden()) {
    // W~_b Phi  -  (V_beta + V_gamma) Phi
    for (int s = 0; s < exit_wave.n_channels(); ++s) {
      const int c = chan_of_op(exit_wave.channel(s).chan.lx, exit_wave.channel(s).ly);
      if (c < 0) continue;
      H[c] += exit_wave.phi(s, x) * exit_wave.wtilde_g(s, y);
    }
    Eigen::MatrixXcd vo(nop, nop);
    vother_matrix(pb, x, y, theta, vo);
    for (int c = 0; c < nop; ++c)
      for (int d = 0; d < nop; ++d) H[c] -= vo(c, d) * fin[d];
  } else {
    // overridden Hamiltonian: P_b = W~_b - screened W_override
    for (int s = 0; s < exit_wave.n_channels(); ++s) {
      const int c = chan_of_op(exit_wave.channel(s).chan.lx, exit_wave.channel(s).ly);
      if (c < 0) continue;
      H[c] += exit_wave.phi(s, x) * exit_wave.wtilde_g(s, y);
    }
    const AuxiliaryPotential& wo = *w_override_;
    Eigen::MatrixXcd lam(wo.size(), wo.size());
    wo.lambda(y * eith, lam);
    const double scr = model_->screening().factor(y);
    for (int s = 0; s < wo.size(); ++s) {
      const int c = chan_of_op(wo.channel(s).chan.lx, wo.channel(s).ly);
      if (c < 0) continue;
      Complex t = 0.0;
      for (int sp = 0; sp < wo.size(); ++sp) {
        if (lam(s, sp) == 0.0) continue;
        for (int sc = 0; sc < exit_wave.n_channels(); ++sc) {
          const auto& oc = wo.channel(sp);
          const auto& ec = exit_wave.channel(sc);
          if (oc.chan.n == ec.chan.n && oc.chan.lx == ec.chan.lx && oc.ly == ec.ly)
            t += lam(s, sp) * exit_wave.g(sc, y);
        }
      }
      H[c] -= scr * wo.channel(s).state.eval(x * eith) * t;
    }
  }
}

void FMContext::project_cross(
    int obs_partition, int src_partition, double x, double y, int n_obs,
    const std::function<void(double, double, std::vector<Complex>&)>& src_fn,
    std::vector<Complex>& out) const {
  // observer components up to n_obs (model or extraction space), the source
  // function always in the extraction space
  const int nop = static_cast<int>(lxly_op_.size());
  const ThreeBodySystem& sys = model_->system();
  const double ang = 8.0 * PI * PI / (2.0 * L_ + 1.0);
  out.assign(n_obs, Complex(0.0));
  DirTables dt;
  std::vector<Complex> src(nop);
  for (int k = 0; k < ugrid_amp_.order(); ++k) {
    const double u = ugrid_amp_.abscissas[k];
    const RotatedFrame f = sys.rotate(obs_partition, src_partition, x, y, u);
    src_fn(f.x, f.y, src);
    contractor_.prepare(u, InPlaneDir{f.cos_x, f.sgn_x},
                        InPlaneDir{f.cos_y, f.sgn_y}, dt);
    const double w = ugrid_amp_.weights[k] / (f.x * f.y);
    for (int c = 0; c < n_obs; ++c) {
      Complex acc = 0.0;
      for (int d = 0; d < nop; ++d) {
        if (src[d] == 0.0) continue;
        acc += contractor_.contract(lxly_op_[c].first, lxly_op_[c].second,
                                    lxly_op_[d].first, lxly_op_[d].second, dt) *
               src[d];
      }
      out[c] += w * acc;
    }
  }
  const double fct = ang * x * y;
  for (int c = 0; c < n_obs; ++c) out[c] *= fct;
}

Complex FMContext::body_integral(const Eigen::VectorXcd& C,
                                 const DistortedWave& exit_wave,
                                 int exit_channel) const {
  if (exit_channel != exit_wave.entrance())
    throw ConfigError("body_integral: exit wave must be solved for the exit channel");
  if (std::abs(exit_wave.theta() - opt_.theta) > 1e-14)
    throw ConfigError("body_integral: exit wave solved at a different theta");
  const int pb = exit_wave.aux().partition();
  const int nch = static_cast<int>(lxly_.size());
  const double theta = opt_.theta;

  auto Hfn = [&](double x, double y, std::vector<Complex>& H) {
    extraction_function(exit_wave, x, y, theta, H);
  };

  Complex total = 0.0;
  std::vector<Complex> H;

  struct Obs {
    int partition;
    int comp;  // which stored coefficients
    bool image;
  };
  std::vector<Obs> observers;
  for (std::size_t ci = 0; ci < parts_.size(); ++ci)
    observers.push_back(Obs{parts_[ci], static_cast<int>(ci), false});
  if (exchange_) observers.push_back(Obs{exchange_->image_partition, 0, true});

  for (const Obs& o : observers) {
    const LagrangeLaguerreBasis& bx = *bx_[o.comp];
    const LagrangeLaguerreBasis& by = *by_[o.comp];
    for (int ix = 0; ix < bx.size(); ++ix)
      for (int iy = 0; iy < by.size(); ++iy) {
        const double X = bx.node(ix), Y = by.node(iy);
        const double wgt = bx.sqrt_weight(ix) * by.sqrt_weight(iy);
        if (o.partition == pb) {
          Hfn(X, Y, H);
        } else {
          project_cross(o.partition, pb, X, Y, nch, Hfn, H);
        }
        for (int c = 0; c < nch; ++c) {
          if (H[c] == 0.0) continue;
          const double sgn = o.image ? exchange_sign(c) : 1.0;
          total += sgn * C(index(o.comp, c, ix, iy)) * wgt * H[c];
        }
      }
  }
  return total;
}

Complex FMContext::boundary_term(const DistortedWave& in_wave,
                                 const DistortedWave& exit_wave,
                                 int exit_channel) const {
  if (exit_channel != exit_wave.entrance())
    throw ConfigError("boundary_term: exit wave must be solved for the exit channel");
  if (in_wave.theta() != 0.0 || exit_wave.theta() != 0.0)
    throw ConfigError("boundary_term: needs unscaled (theta = 0) waves");
  const int pa = in_wave.aux().partition();
  const int pb = exit_wave.aux().partition();

  // quadrature: Gauss-Laguerre in x matched to the exit-state decay,
  // panel Gauss-Legendre in y
  double kmin = 1e30;
  for (int s = 0; s < exit_wave.n_channels(); ++s)
    kmin = std::min(kmin, exit_wave.channel(s).state.k());
  double kin = 1e30;
  for (int s = 0; s < in_wave.n_channels(); ++s)
    kin = std::min(kin, in_wave.channel(s).state.k());
  const double hx = (pa == pb && !exchange_) ? 1.0 / (kmin + kin) : 1.0 / kmin;
  LagrangeLaguerreBasis xq(48, hx);
  const double xcut = std::min(42.0 / kmin, 110.0);
  const double ymax = opt_.boundary_ymax;
  const AngularGrid yg = gauss_legendre(8);
  const double panel = 2.0;
  const int npanels = static_cast<int>(std::ceil(ymax / panel));

  const int nop = static_cast<int>(lxly_op_.size());
  std::vector<Complex> H, bra;

  struct Src {
    int partition;
    bool image;
  };
  std::vector<Src> sources;
  sources.push_back(Src{pa, false});
  if (exchange_) sources.push_back(Src{exchange_->image_partition, true});

  auto bra_fn = [&](bool image) {
    return [this, &in_wave, image](double x, double y, std::vector<Complex>& f) {
      incoming_values_op(in_wave, x, y, f);
      if (image)
        for (std::size_t c = 0; c < f.size(); ++c)
          f[c] *= exchange_sign_op(static_cast<int>(c));
    };
  };

  Complex total = 0.0;
  for (const Src& s : sources) {
    auto fn = bra_fn(s.image);
    for (int ip = 0; ip < npanels; ++ip) {
      const double y0 = ip * panel, y1 = std::min(ymax, y0 + panel);
      const double yc = 0.5 * (y0 + y1), yh = 0.5 * (y1 - y0);
      for (int ky = 0; ky < yg.order(); ++ky) {
        const double y = yc + yh * yg.abscissas[ky];
        const double wy = yh * yg.weights[ky];
        for (int jx = 0; jx < xq.size(); ++jx) {
          const double x = xq.node(jx);
          if (x > xcut) break;
          const double wx = xq.weight(jx);
          extraction_function(exit_wave, x, y, 0.0, H);
          if (s.partition == pb) {
            fn(x, y, bra);
          } else {
            project_cross(pb, s.partition, x, y, nop, fn, bra);
          }
          Complex acc = 0.0;
          for (int c = 0; c < nop; ++c) acc += bra[c] * H[c];
          total += wx * wy * acc;
        }
      }
    }
  }
  return total;
}

} // namespace fmscat

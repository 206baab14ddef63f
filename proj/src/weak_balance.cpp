#include "dissdim/weak_balance.hpp"

#include <algorithm>
#include <cmath>

#include "dissdim/errors.hpp"
#include "dissdim/numerics.hpp"

namespace dissdim::weak {

EntropyPair EntropyPair::burgers() {
  EntropyPair e;
  e.label = "burgers";
  e.eta = [](const State& s) { return 0.5 * s.u[0] * s.u[0]; };
  e.flux = [](const State& s, std::span<double> q) { q[0] = s.u[0] * s.u[0] * s.u[0] / 3.0; };
  return e;
}

EntropyPair EntropyPair::kinetic_energy() {
  EntropyPair e;
  e.label = "kinetic_energy";
  e.eta = [](const State& s) {
    double k = 0.0;
    for (double v : s.u) k += v * v;
    return 0.5 * k;
  };
  e.flux = [](const State& s, std::span<double> q) {
    double k = 0.0;
    for (double v : s.u) k += v * v;
    for (std::size_t a = 0; a < q.size(); ++a) q[a] = 0.5 * k * s.u[a];
  };
  return e;
}

EntropyPair EntropyPair::transported_scalar() {
  EntropyPair e;
  e.label = "transported_scalar";
  e.needs_theta = true;
  e.eta = [](const State& s) { return 0.5 * s.theta * s.theta; };
  e.flux = [](const State& s, std::span<double> q) {
    for (std::size_t a = 0; a < q.size(); ++a) q[a] = 0.5 * s.theta * s.theta * s.u[a];
  };
  return e;
}

namespace {

/// Index range of grid cells meeting [lo, hi] along one axis.
struct Range {
  long begin = 0;
  long end = 0;  // exclusive
};

Range cell_range(double lo, double hi, double origin, double step, long n_cells) {
  Range r;
  if (!(hi > lo)) return r;
  r.begin = std::max(0L, static_cast<long>(std::floor((lo - origin) / step)));
  r.end = std::min(n_cells, static_cast<long>(std::ceil((hi - origin) / step)));
  if (r.end < r.begin) r.end = r.begin;
  return r;
}

bool box_empty(const SupportBox& b) {
  if (!(b.t_hi > b.t_lo)) return true;
  for (std::size_t a = 0; a < b.lo.size(); ++a) {
    if (!(b.hi[a] > b.lo[a])) return true;
  }
  return false;
}

void check_margin(const SpatialGrid& g, double T, double dt, const SupportBox& b, bool allow_terminal,
                  bool allow_spatial_boundary) {
  const double h = g.h();
  const double eps = 1e-9;
  if (!allow_spatial_boundary) {
    for (std::size_t a = 0; a < b.lo.size(); ++a) {
      if (b.lo[a] < g.a + 2.0 * h - eps * h || b.hi[a] > g.b - 2.0 * h + eps * h) {
        throw MarginError("test function support is within 2 cells of the spatial boundary");
      }
    }
  }
  if (b.t_lo < 2.0 * dt - eps * dt) throw MarginError("test function support is within 2 time steps of t = 0");
  if (!allow_terminal && b.t_hi > T - 2.0 * dt + eps * dt) {
    throw MarginError("test function support is within 2 time steps of t = T");
  }
}

/// Visits grid cells meeting a space-time box, handing each cell's centre,
/// interpolated state and (optionally) velocity gradient to `body`. Work is
/// split over time cells; `body` must accumulate into the per-time-cell slot
/// it is given so the caller can reduce in order.
class CellWalker {
 public:
  CellWalker(const GriddedField& f, const SupportBox& box, bool want_grad) : f_(f), want_grad_(want_grad) {
    const int d = f.d();
    const long nc = f.nx() - 1;
    for (int a = 0; a < d; ++a) ranges_.push_back(cell_range(box.lo[a], box.hi[a], f.grid().a, f.h(), nc));
    const double t_hi = std::min(box.t_hi, f.T());
    trange_ = cell_range(std::max(box.t_lo, 0.0), t_hi, 0.0, f.dt(), f.nt() - 1);
    stride_.assign(d, 1);
    for (int a = d - 2; a >= 0; --a) stride_[a] = stride_[a + 1] * static_cast<std::size_t>(f.nx());
    for (unsigned c = 0; c < (1u << d); ++c) {
      std::size_t off = 0;
      for (int a = 0; a < d; ++a) {
        if ((c >> a) & 1u) off += stride_[a];
      }
      corner_off_.push_back(off);
    }
  }

  long time_begin() const { return trange_.begin; }
  long n_time_cells() const { return trange_.end - trange_.begin; }
  bool empty() const {
    if (n_time_cells() <= 0) return true;
    for (const auto& r : ranges_) {
      if (r.end <= r.begin) return true;
    }
    return false;
  }

  struct Cell {
    std::vector<double> x;
    double t = 0.0;
    std::vector<double> u;
    double p = 0.0;
    double theta = 0.0;
    /// grad[comp * d + axis]
    std::vector<double> grad;
  };

  template <class Body>
  void walk_time_cell(long k, Body&& body) const {
    const int d = f_.d();
    const double h = f_.h();
    const unsigned nc = 1u << d;
    const double inv_corners = 1.0 / (2.0 * nc);
    Cell cell;
    cell.x.resize(d);
    cell.u.resize(d);
    cell.grad.resize(static_cast<std::size_t>(d) * d);
    cell.t = (static_cast<double>(k) + 0.5) * f_.dt();
    std::vector<long> idx(d);
    for (int a = 0; a < d; ++a) idx[a] = ranges_[a].begin;
    const bool has_p = f_.has_pressure();
    const bool has_th = f_.has_theta();
    while (true) {
      std::size_t base = 0;
      for (int a = 0; a < d; ++a) {
        base += static_cast<std::size_t>(idx[a]) * stride_[a];
        cell.x[a] = f_.grid().a + (static_cast<double>(idx[a]) + 0.5) * h;
      }
      std::fill(cell.u.begin(), cell.u.end(), 0.0);
      std::fill(cell.grad.begin(), cell.grad.end(), 0.0);
      cell.p = cell.theta = 0.0;
      for (int tk = 0; tk < 2; ++tk) {
        for (unsigned c = 0; c < nc; ++c) {
          const std::size_t node = base + corner_off_[c];
          for (int comp = 0; comp < d; ++comp) {
            const double v = f_.u(static_cast<int>(k) + tk, node, comp);
            cell.u[comp] += v;
            if (want_grad_) {
              for (int a = 0; a < d; ++a) cell.grad[comp * d + a] += ((c >> a) & 1u) ? v : -v;
            }
          }
          if (has_p) cell.p += f_.p(static_cast<int>(k) + tk, node);
          if (has_th) cell.theta += f_.theta(static_cast<int>(k) + tk, node);
        }
      }
      for (double& v : cell.u) v *= inv_corners;
      cell.p *= inv_corners;
      cell.theta *= inv_corners;
      if (want_grad_) {
        for (double& g : cell.grad) g /= static_cast<double>(nc) * h;
      }
      body(cell);
      int a = d - 1;
      while (a >= 0 && idx[a] + 1 == ranges_[a].end) {
        idx[a] = ranges_[a].begin;
        --a;
      }
      if (a < 0) break;
      ++idx[a];
    }
  }

  /// State at the spatial cell centres of time level k (no time averaging).
  template <class Body>
  void walk_level(int k, Body&& body) const {
    const int d = f_.d();
    const double h = f_.h();
    const unsigned nc = 1u << d;
    Cell cell;
    cell.x.resize(d);
    cell.u.resize(d);
    cell.t = f_.time(k);
    std::vector<long> idx(d);
    for (int a = 0; a < d; ++a) idx[a] = ranges_[a].begin;
    for (const auto& r : ranges_) {
      if (r.end <= r.begin) return;
    }
    while (true) {
      std::size_t base = 0;
      for (int a = 0; a < d; ++a) {
        base += static_cast<std::size_t>(idx[a]) * stride_[a];
        cell.x[a] = f_.grid().a + (static_cast<double>(idx[a]) + 0.5) * h;
      }
      std::fill(cell.u.begin(), cell.u.end(), 0.0);
      cell.p = cell.theta = 0.0;
      for (unsigned c = 0; c < nc; ++c) {
        const std::size_t node = base + corner_off_[c];
        for (int comp = 0; comp < d; ++comp) cell.u[comp] += f_.u(k, node, comp) / nc;
        if (f_.has_pressure()) cell.p += f_.p(k, node) / nc;
        if (f_.has_theta()) cell.theta += f_.theta(k, node) / nc;
      }
      body(cell);
      int a = d - 1;
      while (a >= 0 && idx[a] + 1 == ranges_[a].end) {
        idx[a] = ranges_[a].begin;
        --a;
      }
      if (a < 0) break;
      ++idx[a];
    }
  }

 private:
  const GriddedField& f_;
  bool want_grad_;
  std::vector<Range> ranges_;
  Range trange_;
  std::vector<std::size_t> stride_;
  std::vector<std::size_t> corner_off_;
};

double grad_sq(const std::vector<double>& g) {
  double s = 0.0;
  for (double v : g) s += v * v;
  return s;
}

double speed(std::span<const double> u) {
  double s = 0.0;
  for (double v : u) s += v * v;
  return std::sqrt(s);
}

/// Runs `per_cell(cell, acc)` over all cells of the walker, parallel over
/// time cells, and reduces the per-time-cell accumulators in time order.
template <class Acc, class PerCell>
Acc reduce_cells(const CellWalker& w, PerCell per_cell) {
  Acc total{};
  if (w.empty()) return total;
  const auto n = static_cast<std::size_t>(w.n_time_cells());
  std::vector<Acc> slots(n);
  parallel_chunks(n, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Acc& acc = slots[i];
      w.walk_time_cell(w.time_begin() + static_cast<long>(i), [&](const CellWalker::Cell& c) { per_cell(c, acc); });
    }
  });
  for (const Acc& a : slots) total += a;
  return total;
}

struct IntegralAcc {
  WeakIntegrals v;
  IntegralAcc& operator+=(const IntegralAcc& o) {
    v.time += o.v.time;
    v.flux += o.v.flux;
    v.pressure += o.v.pressure;
    v.viscous += o.v.viscous;
    v.dissipation += o.v.dissipation;
    v.abs_scale += o.v.abs_scale;
    v.cells += o.v.cells;
    return *this;
  }
};

}  // namespace

WeakIntegrals weak_integrals(const GriddedField& field, const EntropyPair& pair, const TestFunction& phi,
                             const QuadratureOptions& opts) {
  require(phi.dim() == field.d(), "test function dimension does not match the field");
  require(opts.nu >= 0.0, "viscosity must be non-negative");
  if (opts.pressure) require(field.has_pressure(), "pressure samples are required");
  if (pair.needs_theta) require(field.has_theta(), "this entropy pair needs scalar samples");
  SupportBox box = phi.support();
  if (box_empty(box)) return {};
  if (opts.allow_terminal) box.t_hi = std::min(box.t_hi, field.T());
  check_margin(field.grid(), field.T(), field.dt(), box, opts.allow_terminal, opts.allow_spatial_boundary);

  const int d = field.d();
  const double w = std::pow(field.h(), d) * field.dt();
  const bool want_grad = opts.nu > 0.0;
  const CellWalker walker(field, box, want_grad);
  auto acc = reduce_cells<IntegralAcc>(walker, [&](const CellWalker::Cell& c, IntegralAcc& acc) {
    thread_local Jet jet;
    thread_local std::vector<double> q;
    phi.jet(c.x, c.t, jet);
    if (jet.value == 0.0 && jet.dt == 0.0 && jet.lap == 0.0 &&
        std::all_of(jet.grad.begin(), jet.grad.end(), [](double g) { return g == 0.0; })) {
      return;
    }
    q.assign(d, 0.0);
    const State s{c.u, c.p, c.theta};
    const double eta = pair.eta(s);
    pair.flux(s, q);
    double qg = 0.0;
    double ug = 0.0;
    for (int a = 0; a < d; ++a) {
      qg += q[a] * jet.grad[a];
      ug += c.u[a] * jet.grad[a];
    }
    const double t1 = eta * jet.dt;
    const double t3 = opts.pressure ? c.p * ug : 0.0;
    const double t4 = opts.nu * eta * jet.lap;
    acc.v.time += w * t1;
    acc.v.flux += w * qg;
    acc.v.pressure += w * t3;
    acc.v.viscous += w * t4;
    if (want_grad) acc.v.dissipation += w * opts.nu * grad_sq(c.grad) * jet.value;
    acc.v.abs_scale += w * (std::abs(t1) + std::abs(qg) + std::abs(t3) + std::abs(t4));
    acc.v.cells += 1;
  });
  return acc.v;
}

double entropy_production(const GriddedField& field, const EntropyPair& pair, const TestFunction& phi) {
  const auto wi = weak_integrals(field, pair, phi);
  return wi.time + wi.flux;
}

namespace {

void fill_common(BalanceReport& rep, const CutoffPair& cutoff, const std::string& mode, double nu) {
  rep.mode = mode;
  rep.center = cutoff.center();
  rep.delta = cutoff.delta();
  rep.alpha = cutoff.alpha();
  rep.nu = nu;
  rep.profile = cutoff.profile().name();
  rep.constants = {{"C_chi", cutoff.C_chi()}, {"C_eta", cutoff.C_eta()}};
  if (nu > 0.0) rep.constants.push_back({"C_lap", cutoff.C_lap()});
}

BalanceReport cylinder_balance(const GriddedField& field, const CutoffPair& cutoff, const EntropyPair* pair, double nu) {
  require(cutoff.dim() == field.d(), "cutoff dimension does not match the field");
  cutoff.validate_on(field.grid(), field.T(), field.nt());
  const bool kinetic = pair == nullptr;
  if (kinetic) require(field.has_pressure(), "missing pressure: the kinetic energy balance needs p");
  const EntropyPair ke = EntropyPair::kinetic_energy();
  const EntropyPair& used = kinetic ? ke : *pair;
  QuadratureOptions opts;
  opts.pressure = kinetic;
  opts.nu = nu;
  WeakIntegrals wi;
  try {
    wi = weak_integrals(field, used, cutoff, opts);
  } catch (const MarginError& e) {
    throw MarginError(std::string("cylinder C_{2 delta} leaves the domain: ") + e.what());
  }
  BalanceReport rep;
  std::string mode = nu > 0.0 ? "navier_stokes" : "euler";
  if (!kinetic) mode += ":" + used.label;
  fill_common(rep, cutoff, mode, nu);
  rep.terms = {{"I", wi.time}, {"II", wi.flux}};
  if (kinetic) rep.terms.push_back({"III", wi.pressure});
  if (nu > 0.0) {
    rep.terms.push_back({"IV", wi.viscous});
    rep.viscous_pairing = wi.dissipation;
  }
  rep.weak_mass = wi.total();
  rep.abs_scale = wi.abs_scale;
  return rep;
}

struct NormAcc {
  std::vector<double> u_space;  // per time cell: sum h^d |u|^r or max |u|
  std::vector<double> p_space;
  std::size_t n_space_cells = 0;
};

}  // namespace

BalanceReport euler_weak_mass(const GriddedField& field, const CutoffPair& cutoff) {
  return cylinder_balance(field, cutoff, nullptr, 0.0);
}

BalanceReport euler_weak_mass(const GriddedField& field, const CutoffPair& cutoff, const EntropyPair& pair) {
  return cylinder_balance(field, cutoff, &pair, 0.0);
}

BalanceReport ns_weak_mass(const GriddedField& field, const CutoffPair& cutoff, double nu, const EntropyPair* pair) {
  require(nu > 0.0, "viscosity must be positive");
  BalanceReport rep = cylinder_balance(field, cutoff, pair, nu);

  // Direct nu int |grad u|^2 over the cells centred in the open cylinder C_delta.
  const double delta = cutoff.delta();
  const double tau = std::pow(delta, cutoff.alpha());
  SupportBox box;
  for (double c : cutoff.center().x) {
    box.lo.push_back(c - delta);
    box.hi.push_back(c + delta);
  }
  box.t_lo = cutoff.center().t - tau;
  box.t_hi = cutoff.center().t + tau;
  const CellWalker walker(field, box, true);
  const double w = std::pow(field.h(), field.d()) * field.dt();
  struct Sum {
    double v = 0.0;
    Sum& operator+=(const Sum& o) {
      v += o.v;
      return *this;
    }
  };
  const Cylinder cyl(cutoff.center(), delta, cutoff.alpha());
  rep.morrey = reduce_cells<Sum>(walker, [&](const CellWalker::Cell& c, Sum& s) {
                 if (cyl.contains(c.x, c.t)) s.v += w * nu * grad_sq(c.grad);
               }).v;
  return rep;
}

BalanceReport holder_cylinder_bound(const GriddedField& field, const CutoffPair& cutoff, ExtendedReal q, ExtendedReal r,
                                    const EntropyPair* pair, double nu) {
  require(q >= 3.0 && r >= 3.0, "Hölder bound needs q, r >= 3");
  require(nu >= 0.0, "viscosity must be non-negative");
  const bool kinetic = pair == nullptr;
  BalanceReport rep;
  if (kinetic && !field.has_pressure()) {
    // No pressure: the kinetic-energy balance with p = 0.
    const EntropyPair ke = EntropyPair::kinetic_energy();
    rep = nu > 0.0 ? ns_weak_mass(field, cutoff, nu, &ke) : cylinder_balance(field, cutoff, &ke, 0.0);
    rep.mode = nu > 0.0 ? "navier_stokes" : "euler";
    rep.terms.insert(rep.terms.begin() + 2, Term{"III", 0.0});
  } else {
    rep = nu > 0.0 ? ns_weak_mass(field, cutoff, nu, pair) : cylinder_balance(field, cutoff, pair, 0.0);
  }

  // Local norms over the cells centred in C_{2 delta}.
  const int d = field.d();
  const double delta = cutoff.delta();
  const double tau2 = std::pow(2.0 * delta, cutoff.alpha());
  const auto& x0 = cutoff.center().x;
  const double t0 = cutoff.center().t;
  SupportBox box = cutoff.support();
  const CellWalker walker(field, box, false);
  const double hd = std::pow(field.h(), d);
  const double dt = field.dt();
  const bool r_inf = r.is_infinite();
  const bool q_inf = q.is_infinite();
  const double rv = r_inf ? 0.0 : r.value();
  const double qv = q_inf ? 0.0 : q.value();
  const bool has_p = kinetic && field.has_pressure();
  const EntropyPair* check_pair = pair;

  const auto n_t = static_cast<std::size_t>(std::max(0L, walker.n_time_cells()));
  std::vector<double> u_sp(n_t, 0.0);
  std::vector<double> p_sp(n_t, 0.0);
  std::vector<char> in_time(n_t, 0);
  std::vector<std::size_t> n_sp(n_t, 0);
  std::vector<char> dominated(n_t, 1);
  parallel_chunks(n_t, [&](std::size_t, std::size_t b, std::size_t e) {
    std::vector<double> qbuf(d);
    for (std::size_t i = b; i < e; ++i) {
      const long k = walker.time_begin() + static_cast<long>(i);
      const double tc = (static_cast<double>(k) + 0.5) * dt;
      if (!(std::abs(tc - t0) < tau2)) continue;
      in_time[i] = 1;
      walker.walk_time_cell(k, [&](const CellWalker::Cell& c) {
        double r2 = 0.0;
        for (int a = 0; a < d; ++a) r2 += (c.x[a] - x0[a]) * (c.x[a] - x0[a]);
        if (!(r2 < 4.0 * delta * delta)) return;
        n_sp[i] += 1;
        const double su = speed(c.u);
        const double sp = std::abs(c.p);
        if (r_inf) {
          u_sp[i] = std::max(u_sp[i], su);
          if (has_p) p_sp[i] = std::max(p_sp[i], sp);
        } else {
          u_sp[i] += hd * std::pow(su, rv);
          if (has_p) p_sp[i] += hd * std::pow(sp, rv / 2.0);
        }
        if (check_pair) {
          const State s{c.u, c.p, c.theta};
          check_pair->flux(s, qbuf);
          double qn = 0.0;
          for (double v : qbuf) qn += v * v;
          const double tol = 1e-12 * (su * su * su + 1e-300);
          if (std::sqrt(qn) > 0.5 * su * su * su + tol || std::abs(check_pair->eta(s)) > 0.5 * su * su + tol) {
            dominated[i] = 0;
          }
        }
      });
    }
  });
  if (std::find(dominated.begin(), dominated.end(), 0) != dominated.end()) {
    throw ValidationError("Hölder bound needs |eta| <= |u|^2/2 and |Q| <= |u|^3/2 for the entropy pair");
  }

  LocalNorms norms;
  norms.q = q;
  norms.r = r;
  std::size_t n_time = 0;
  std::size_t n_space = 0;
  double uq = 0.0;
  double pq = 0.0;
  for (std::size_t i = 0; i < n_t; ++i) {
    if (!in_time[i]) continue;
    ++n_time;
    n_space = std::max(n_space, n_sp[i]);
    const double u_slice = r_inf ? u_sp[i] : std::pow(u_sp[i], 1.0 / rv);
    const double p_slice = r_inf ? p_sp[i] : std::pow(p_sp[i], 2.0 / rv);
    if (q_inf) {
      uq = std::max(uq, u_slice);
      pq = std::max(pq, p_slice);
    } else {
      uq += dt * std::pow(u_slice, qv);
      pq += dt * std::pow(p_slice, qv / 2.0);
    }
  }
  norms.u = q_inf ? uq : std::pow(uq, 1.0 / qv);
  norms.p = q_inf ? pq : std::pow(pq, 2.0 / qv);
  norms.space_measure = static_cast<double>(n_space) * hd;
  norms.time_measure = static_cast<double>(n_time) * dt;

  const double B = norms.space_measure;
  const double J = norms.time_measure;
  auto vol = [&](double k) {
    // |B|^{1 - k/r} |J|^{1 - k/q}
    return std::pow(B, r.fraction_minus(k)) * std::pow(J, q.fraction_minus(k));
  };
  const double U = norms.u;
  const double tau = std::pow(delta, cutoff.alpha());
  const double bI = cutoff.C_eta() / tau * 0.5 * U * U * vol(2.0);
  const double bII = cutoff.C_chi() / delta * 0.5 * U * U * U * vol(3.0);
  const double bIII = cutoff.C_chi() / delta * norms.p * U * vol(3.0);
  rep.bound_terms = {{"I", bI}, {"II", bII}, {"III", bIII}};
  double bound = bI + bII + bIII;
  if (nu > 0.0) {
    const double bIV = nu * cutoff.C_lap() / (delta * delta) * 0.5 * U * U * vol(2.0);
    rep.bound_terms.push_back({"IV", bIV});
    bound += bIV;
  }
  rep.holder_bound = bound;
  rep.local_norms = norms;
  if (rep.weak_mass > bound * (1.0 + 1e-9) + 1e-12 * rep.abs_scale + 1e-300) {
    throw NumericalError("weak mass exceeds the Hölder bound");
  }
  return rep;
}

BoundaryBalance boundary_extended_mass(const GriddedField& field, const TestFunction& phi, const EntropyPair& pair,
                                       double nu, bool allow_spatial_boundary) {
  require(nu >= 0.0, "viscosity must be non-negative");
  QuadratureOptions opts;
  opts.nu = nu;
  opts.allow_terminal = true;
  opts.allow_spatial_boundary = allow_spatial_boundary;
  WeakIntegrals wi;
  try {
    wi = weak_integrals(field, pair, phi, opts);
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    if (what.find("t = 0") != std::string::npos) throw ValidationError("phi must vanish near t = 0");
    throw;
  }
  BoundaryBalance out;
  out.interior = wi.time + wi.flux + wi.viscous;
  out.viscous_pairing = wi.dissipation;

  SupportBox box = phi.support();
  if (!box_empty(box)) {
    box.t_lo = field.T() - field.dt();
    box.t_hi = field.T();
    const CellWalker walker(field, box, false);
    const int k = field.nt() - 1;
    const double hd = std::pow(field.h(), field.d());
    Jet jet;
    double terminal = 0.0;
    walker.walk_level(k, [&](const CellWalker::Cell& c) {
      phi.jet(c.x, field.T(), jet);
      if (jet.value == 0.0) return;
      const State s{c.u, c.p, c.theta};
      terminal += hd * pair.eta(s) * jet.value;
    });
    out.terminal = terminal;
  }
  const double scale = std::abs(out.terminal);
  const double resid = std::abs(out.interior - out.viscous_pairing - out.terminal);
  out.relative_residual = scale > 0.0 ? resid / scale : resid;
  return out;
}

SignedSupportResult signed_support_bound(const SpatialVectorField& V, std::span<const Ball> covering,
                                         const RadialPlateau& phi, ExtendedReal r, std::optional<double> threshold) {
  const int d = V.d();
  require(phi.dim() == d, "test function dimension does not match the field");
  if (d == 1) {
    require(r.is_infinite(), "r must be >= d/(d-1), i.e. infinite for d = 1");
  } else {
    require(r >= static_cast<double>(d) / (d - 1), "r must be >= d/(d-1)");
  }
  std::vector<RadialPlateau> bumps;
  for (const Ball& b : covering) {
    require(static_cast<int>(b.center.size()) == d, "covering ball dimension mismatch");
    require(b.radius > 0.0, "covering radii must be positive");
    bumps.emplace_back(b.center, b.radius, 2.0 * b.radius);
  }
  const SpatialGrid& g = V.grid();
  const double h = g.h();
  const long nc = g.nx - 1;
  std::vector<std::size_t> stride(d, 1);
  for (int a = d - 2; a >= 0; --a) stride[a] = stride[a + 1] * g.nx;
  const unsigned n_corners = 1u << d;
  std::vector<std::size_t> corner_off;
  for (unsigned c = 0; c < n_corners; ++c) {
    std::size_t off = 0;
    for (int a = 0; a < d; ++a) {
      if ((c >> a) & 1u) off += stride[a];
    }
    corner_off.push_back(off);
  }
  std::size_t n_cells = 1;
  for (int a = 0; a < d; ++a) n_cells *= static_cast<std::size_t>(nc);

  auto cell_state = [&](std::size_t cell, std::vector<double>& x, std::vector<double>& v, double& div) {
    std::size_t rest = cell;
    std::size_t base = 0;
    for (int a = d - 1; a >= 0; --a) {
      const long i = static_cast<long>(rest % nc);
      rest /= nc;
      base += static_cast<std::size_t>(i) * stride[a];
      x[a] = g.a + (static_cast<double>(i) + 0.5) * h;
    }
    std::fill(v.begin(), v.end(), 0.0);
    div = 0.0;
    for (unsigned c = 0; c < n_corners; ++c) {
      for (int a = 0; a < d; ++a) v[a] += V.v(base + corner_off[c], a) / n_corners;
    }
    // Paired differences along each axis, so a component constant along its
    // own axis contributes exactly zero.
    for (int a = 0; a < d; ++a) {
      double diff = 0.0;
      for (unsigned c = 0; c < n_corners; ++c) {
        if ((c >> a) & 1u) continue;
        diff += V.v(base + corner_off[c | (1u << a)], a) - V.v(base + corner_off[c], a);
      }
      div += diff / ((n_corners / 2) * h);
    }
  };

  // Divergence threshold over the whole grid.
  const std::size_t n_chunks = chunk_count(n_cells);
  std::vector<double> chunk_max(n_chunks, 0.0);
  parallel_chunks(n_cells, [&](std::size_t ch, std::size_t b, std::size_t e) {
    std::vector<double> x(d);
    std::vector<double> v(d);
    double div = 0.0;
    for (std::size_t i = b; i < e; ++i) {
      cell_state(i, x, v, div);
      chunk_max[ch] = std::max(chunk_max[ch], std::abs(div));
    }
  });
  const double max_div = n_chunks ? *std::max_element(chunk_max.begin(), chunk_max.end()) : 0.0;
  SignedSupportResult out;
  out.threshold = threshold.value_or(1e-8 * max_div);

  // Margin for phi.
  for (int a = 0; a < d; ++a) {
    if (phi.center[a] - phi.outer < g.a + 2.0 * h || phi.center[a] + phi.outer > g.b - 2.0 * h) {
      throw MarginError("test function support is within 2 cells of the boundary");
    }
  }

  struct Acc {
    double I = 0.0;
    double II = 0.0;
    double norm = 0.0;
    std::size_t flagged = 0;
    std::size_t uncovered = 0;
  };
  std::vector<Acc> accs(n_chunks);
  const double hd = std::pow(h, d);
  const bool r_inf = r.is_infinite();
  const double rv = r_inf ? 0.0 : r.value();
  parallel_chunks(n_cells, [&](std::size_t ch, std::size_t b, std::size_t e) {
    std::vector<double> x(d);
    std::vector<double> v(d);
    std::vector<double> gphi(d);
    std::vector<double> gchi(d);
    std::vector<double> gtmp(d);
    double div = 0.0;
    Acc& acc = accs[ch];
    for (std::size_t i = b; i < e; ++i) {
      cell_state(i, x, v, div);
      double chi = 0.0;
      std::fill(gchi.begin(), gchi.end(), 0.0);
      bool inside = false;
      for (const auto& bump : bumps) {
        const double val = bump.value(x);
        double r2 = 0.0;
        for (int a = 0; a < d; ++a) r2 += (x[a] - bump.center[a]) * (x[a] - bump.center[a]);
        if (r2 < bump.inner * bump.inner) inside = true;
        if (val > chi) {
          chi = val;
          bump.derivatives(x, gtmp);
          gchi = gtmp;
        }
      }
      if (std::abs(div) > out.threshold) {
        ++acc.flagged;
        if (!inside) ++acc.uncovered;
      }
      const double ph = phi.value(x);
      phi.derivatives(x, gphi);
      double vgphi = 0.0;
      double vgchi = 0.0;
      double gchi_n = 0.0;
      for (int a = 0; a < d; ++a) {
        vgphi += v[a] * gphi[a];
        vgchi += v[a] * gchi[a];
        gchi_n += gchi[a] * gchi[a];
      }
      acc.I += hd * vgphi * chi;
      acc.II += hd * vgchi * ph;
      if (gchi_n > 0.0 && ph != 0.0) {
        const double s = speed(v);
        acc.norm = r_inf ? std::max(acc.norm, s) : acc.norm + hd * std::pow(s, rv);
      }
    }
  });
  Acc total;
  for (const Acc& a : accs) {
    total.I += a.I;
    total.II += a.II;
    total.norm = r_inf ? std::max(total.norm, a.norm) : total.norm + a.norm;
    total.flagged += a.flagged;
    total.uncovered += a.uncovered;
  }
  if (total.uncovered > 0) {
    throw ValidationError("covering misses " + std::to_string(total.uncovered) + " above-threshold cells");
  }
  out.flagged_cells = total.flagged;
  out.bound_I = std::abs(total.I);
  out.bound_II = std::abs(total.II);
  out.pairing = std::abs(total.I + total.II);
  out.v_norm_on_collar = r_inf ? total.norm : std::pow(total.norm, 1.0 / rv);
  return out;
}

}  // namespace dissdim::weak

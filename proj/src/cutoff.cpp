#include "dissdim/cutoff.hpp"

#include <algorithm>
#include <cmath>

#include "dissdim/errors.hpp"

namespace dissdim {
namespace {

double norm_diff(std::span<const double> y, std::span<const double> c) {
  double r2 = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) r2 += (y[k] - c[k]) * (y[k] - c[k]);
  return std::sqrt(r2);
}

/// exp(w) / (1 + exp(w))^2 without overflow.
double logistic_bell(double w) {
  const double e = std::exp(-std::abs(w));
  return e / ((1.0 + e) * (1.0 + e));
}

}  // namespace

StepProfile::StepProfile(Kind kind) : kind_(kind) {
  if (kind_ == Kind::cubic) {
    max_d1_ = 1.5;
    max_d2_ = 6.0;
    max_d1_ratio_ = 6.0 * (3.0 - 2.0 * std::sqrt(2.0));
    return;
  }
  constexpr int n = 200000;
  for (int i = 1; i < n; ++i) {
    const double s = static_cast<double>(i) / n;
    max_d1_ = std::max(max_d1_, std::abs(d1(s)));
    max_d2_ = std::max(max_d2_, std::abs(d2(s)));
    max_d1_ratio_ = std::max(max_d1_ratio_, std::abs(d1(s)) / (1.0 + s));
  }
}

std::string StepProfile::name() const { return kind_ == Kind::cubic ? "cubic" : "mollified"; }

double StepProfile::value(double s) const {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  if (kind_ == Kind::cubic) return std::min(1.0, (1.0 - s) * (1.0 - s) * (1.0 + 2.0 * s));
  const double w = 1.0 / (1.0 - s) - 1.0 / s;
  if (w > 0.0) {
    const double e = std::exp(-w);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(w));
}

double StepProfile::d1(double s) const {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  if (kind_ == Kind::cubic) return 6.0 * s * (s - 1.0);
  const double w = 1.0 / (1.0 - s) - 1.0 / s;
  const double w1 = 1.0 / ((1.0 - s) * (1.0 - s)) + 1.0 / (s * s);
  return -logistic_bell(w) * w1;
}

double StepProfile::d2(double s) const {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  if (kind_ == Kind::cubic) return 12.0 * s - 6.0;
  const double w = 1.0 / (1.0 - s) - 1.0 / s;
  const double w1 = 1.0 / ((1.0 - s) * (1.0 - s)) + 1.0 / (s * s);
  const double w2 = 2.0 / ((1.0 - s) * (1.0 - s) * (1.0 - s)) - 2.0 / (s * s * s);
  const double S = value(s);
  const double bell = logistic_bell(w);
  const double S1 = -bell * w1;
  return -S1 * (1.0 - 2.0 * S) * w1 - bell * w2;
}

RadialPlateau::RadialPlateau(std::vector<double> c, double in, double out, StepProfile p)
    : center(std::move(c)), inner(in), outer(out), profile(p) {
  require(!center.empty(), "plateau needs a centre");
  require(inner > 0.0 && outer > inner, "plateau needs 0 < inner < outer");
}

double RadialPlateau::value(std::span<const double> y) const {
  const double rho = norm_diff(y, center);
  return profile.value((rho - inner) / (outer - inner));
}

double RadialPlateau::derivatives(std::span<const double> y, std::span<double> g) const {
  std::fill(g.begin(), g.end(), 0.0);
  const double rho = norm_diff(y, center);
  if (rho <= inner || rho >= outer) return 0.0;
  const double w = outer - inner;
  const double s = (rho - inner) / w;
  const double s1 = profile.d1(s);
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = s1 / w * (y[k] - center[k]) / rho;
  return profile.d2(s) / (w * w) + (dim() - 1) * s1 / (w * rho);
}

double TimeWindow::value(double t) const {
  if (t < lo) return ramp_lo > 0.0 ? profile.value((lo - t) / ramp_lo) : 0.0;
  if (!open_top && t > hi) return ramp_hi > 0.0 ? profile.value((t - hi) / ramp_hi) : 0.0;
  return 1.0;
}

double TimeWindow::d1(double t) const {
  if (t < lo) return ramp_lo > 0.0 ? -profile.d1((lo - t) / ramp_lo) / ramp_lo : 0.0;
  if (!open_top && t > hi) return ramp_hi > 0.0 ? profile.d1((t - hi) / ramp_hi) / ramp_hi : 0.0;
  return 0.0;
}

SeparableTestFunction::SeparableTestFunction(RadialPlateau space, TimeWindow time)
    : space_(std::move(space)), time_(time) {
  require(time_.hi >= time_.lo, "time window needs lo <= hi");
  require(time_.ramp_lo > 0.0 && (time_.open_top || time_.ramp_hi > 0.0), "time window ramps must be positive");
}

void SeparableTestFunction::jet(std::span<const double> x, double t, Jet& out) const {
  out.grad.resize(x.size());
  const double chi = space_.value(x);
  const double lap = space_.derivatives(x, out.grad);
  const double eta = time_.value(t);
  out.value = chi * eta;
  out.dt = chi * time_.d1(t);
  for (double& g : out.grad) g *= eta;
  out.lap = lap * eta;
}

SupportBox SeparableTestFunction::support() const {
  SupportBox b;
  for (double c : space_.center) {
    b.lo.push_back(c - space_.outer);
    b.hi.push_back(c + space_.outer);
  }
  b.t_lo = time_.support_lo();
  b.t_hi = time_.support_hi();
  return b;
}

SumTestFunction::SumTestFunction(std::shared_ptr<const TestFunction> a, std::shared_ptr<const TestFunction> b)
    : a_(std::move(a)), b_(std::move(b)) {
  require(a_ && b_, "sum needs two test functions");
  require(a_->dim() == b_->dim(), "summands differ in dimension");
}

void SumTestFunction::jet(std::span<const double> x, double t, Jet& out) const {
  Jet other;
  a_->jet(x, t, out);
  b_->jet(x, t, other);
  out.value += other.value;
  out.dt += other.dt;
  out.lap += other.lap;
  for (std::size_t k = 0; k < out.grad.size(); ++k) out.grad[k] += other.grad[k];
}

SupportBox SumTestFunction::support() const {
  SupportBox sa = a_->support();
  const SupportBox sb = b_->support();
  for (std::size_t k = 0; k < sa.lo.size(); ++k) {
    sa.lo[k] = std::min(sa.lo[k], sb.lo[k]);
    sa.hi[k] = std::max(sa.hi[k], sb.hi[k]);
  }
  sa.t_lo = std::min(sa.t_lo, sb.t_lo);
  sa.t_hi = std::max(sa.t_hi, sb.t_hi);
  return sa;
}

SampledTestFunction::SampledTestFunction(SpatialGrid grid, double T, int nt, std::vector<double> values)
    : grid_(grid), T_(T), nt_(nt), values_(std::move(values)) {
  grid_.validate();
  require(nt_ >= 2 && T_ > 0.0, "sampled test function needs nt >= 2 and T > 0");
  require(values_.size() == static_cast<std::size_t>(nt_) * grid_.n_nodes(), "test function sample count mismatch");
}

double SampledTestFunction::node(int k, std::span<const long> idx) const {
  return values_[k * grid_.n_nodes() + grid_.flat(idx)];
}

double SampledTestFunction::nodal_laplacian(int k, std::span<const long> idx) const {
  std::vector<long> j(idx.begin(), idx.end());
  const double h = grid_.h();
  const double c = node(k, idx);
  double lap = 0.0;
  for (int a = 0; a < grid_.d; ++a) {
    if (idx[a] == 0 || idx[a] == grid_.nx - 1) return 0.0;
    j[a] = idx[a] + 1;
    const double up = node(k, j);
    j[a] = idx[a] - 1;
    const double dn = node(k, j);
    j[a] = idx[a];
    lap += (up - 2.0 * c + dn) / (h * h);
  }
  return lap;
}

void SampledTestFunction::jet(std::span<const double> x, double t, Jet& out) const {
  const int d = grid_.d;
  const double h = grid_.h();
  const double dt = T_ / (nt_ - 1);
  std::vector<long> base(d);
  std::vector<double> frac(d);
  for (int a = 0; a < d; ++a) {
    const double q = (x[a] - grid_.a) / h;
    base[a] = std::clamp(static_cast<long>(std::floor(q)), 0L, static_cast<long>(grid_.nx - 2));
    frac[a] = q - static_cast<double>(base[a]);
  }
  const double qt = t / dt;
  const int k0 = std::clamp(static_cast<int>(std::floor(qt)), 0, nt_ - 2);
  const double ft = qt - k0;

  out.value = out.dt = out.lap = 0.0;
  out.grad.assign(d, 0.0);
  std::vector<long> idx(d);
  const unsigned n_corners = 1u << d;
  for (int tk = 0; tk < 2; ++tk) {
    const double wt = tk ? ft : 1.0 - ft;
    const double st = tk ? 1.0 : -1.0;
    for (unsigned c = 0; c < n_corners; ++c) {
      double w = 1.0;
      for (int a = 0; a < d; ++a) {
        const bool up = (c >> a) & 1u;
        idx[a] = base[a] + (up ? 1 : 0);
        w *= up ? frac[a] : 1.0 - frac[a];
      }
      const double v = node(k0 + tk, idx);
      out.value += wt * w * v;
      out.dt += st * w * v / dt;
      out.lap += wt * w * nodal_laplacian(k0 + tk, idx);
      for (int a = 0; a < d; ++a) {
        const bool up = (c >> a) & 1u;
        const double wa = up ? frac[a] : 1.0 - frac[a];
        const double w_other = wa > 0.0 ? w / wa : [&] {
          double p = 1.0;
          for (int b = 0; b < d; ++b) {
            if (b != a) p *= ((c >> b) & 1u) ? frac[b] : 1.0 - frac[b];
          }
          return p;
        }();
        out.grad[a] += wt * w_other * (up ? 1.0 : -1.0) * v / h;
      }
    }
  }
}

SupportBox SampledTestFunction::support() const {
  const int d = grid_.d;
  const std::size_t ns = grid_.n_nodes();
  std::vector<long> lo(d, grid_.nx);
  std::vector<long> hi(d, -1);
  int klo = nt_;
  int khi = -1;
  std::vector<long> idx(d);
  for (int k = 0; k < nt_; ++k) {
    for (std::size_t n = 0; n < ns; ++n) {
      if (values_[k * ns + n] == 0.0) continue;
      grid_.unflat(n, idx);
      for (int a = 0; a < d; ++a) {
        lo[a] = std::min(lo[a], idx[a]);
        hi[a] = std::max(hi[a], idx[a]);
      }
      klo = std::min(klo, k);
      khi = std::max(khi, k);
    }
  }
  SupportBox b;
  const double dt = T_ / (nt_ - 1);
  if (khi < 0) {
    b.lo.assign(d, 1.0);
    b.hi.assign(d, 0.0);
    b.t_lo = 1.0;
    b.t_hi = 0.0;
    return b;
  }
  for (int a = 0; a < d; ++a) {
    b.lo.push_back(grid_.coord(std::max(lo[a] - 1, 0L)));
    b.hi.push_back(grid_.coord(std::min(hi[a] + 1, static_cast<long>(grid_.nx - 1))));
  }
  b.t_lo = std::max(klo - 1, 0) * dt;
  b.t_hi = std::min(khi + 1, nt_ - 1) * dt;
  return b;
}

CutoffPair::CutoffPair(SpaceTimePoint center, double delta, double alpha, StepProfile profile)
    : center_(std::move(center)),
      delta_(delta),
      alpha_(alpha),
      space_(center_.x.empty() ? std::vector<double>{0.0} : center_.x, delta > 0.0 ? delta : 1.0,
             delta > 0.0 ? 2.0 * delta : 2.0, profile) {
  require(center_.dim() >= 1, "cutoff centre needs d >= 1");
  require(delta_ > 0.0 && std::isfinite(delta_), "cutoff radius must be positive");
  require(alpha_ > 0.0 && std::isfinite(alpha_), "cutoff alpha must be positive");
  tau_ = std::pow(delta_, alpha_);
  tau2_ = std::pow(2.0 * delta_, alpha_);
}

double CutoffPair::eta(double t) const {
  const double s = std::abs(t - center_.t);
  if (s < tau_) return 1.0;
  if (s >= tau2_) return 0.0;
  return space_.profile.value((s - tau_) / (tau2_ - tau_));
}

double CutoffPair::eta_d1(double t) const {
  const double s = std::abs(t - center_.t);
  if (s < tau_ || s >= tau2_) return 0.0;
  const double w = tau2_ - tau_;
  const double d = space_.profile.d1((s - tau_) / w) / w;
  return t < center_.t ? -d : d;
}

void CutoffPair::jet(std::span<const double> x, double t, Jet& out) const {
  out.grad.resize(x.size());
  const double chi = space_.value(x);
  const double lap = space_.derivatives(x, out.grad);
  const double eta = this->eta(t);
  out.value = chi * eta;
  out.dt = chi * eta_d1(t);
  for (double& g : out.grad) g *= eta;
  out.lap = lap * eta;
}

SupportBox CutoffPair::support() const {
  SupportBox b;
  for (double c : center_.x) {
    b.lo.push_back(c - 2.0 * delta_);
    b.hi.push_back(c + 2.0 * delta_);
  }
  b.t_lo = center_.t - tau2_;
  b.t_hi = center_.t + tau2_;
  return b;
}

double CutoffPair::C_chi() const { return space_.profile.max_d1(); }

double CutoffPair::C_eta() const { return space_.profile.max_d1() / (std::pow(2.0, alpha_) - 1.0); }

double CutoffPair::C_lap() const {
  return space_.profile.max_d2() + (dim() - 1) * space_.profile.max_d1_over_1ps();
}

void CutoffPair::validate_on(const SpatialGrid& grid, double T, int nt) const {
  require(grid.d == dim(), "cutoff dimension does not match the grid");
  constexpr double slack = 1e-9;
  const int d = grid.d;
  const double h = grid.h();
  std::vector<long> lo(d);
  std::vector<long> hi(d);
  for (int a = 0; a < d; ++a) {
    lo[a] = std::max(0L, static_cast<long>(std::floor((center_.x[a] - 2.0 * delta_ - grid.a) / h)));
    hi[a] = std::min(static_cast<long>(grid.nx - 1), static_cast<long>(std::ceil((center_.x[a] + 2.0 * delta_ - grid.a) / h)));
  }
  std::vector<long> idx(lo);
  std::vector<double> y(d);
  std::vector<double> g(d);
  auto fail = [](const std::string& what) { throw NumericalError("cutoff check failed: " + what); };
  while (true) {
    for (int a = 0; a < d; ++a) y[a] = grid.coord(idx[a]);
    const double rho = norm_diff(y, center_.x);
    const double chi = space_.value(y);
    const double lap = space_.derivatives(y, g);
    double gn = 0.0;
    for (double v : g) gn += v * v;
    gn = std::sqrt(gn);
    if (chi < 0.0 || chi > 1.0) fail("chi outside [0, 1]");
    if (rho < delta_ && chi != 1.0) fail("chi != 1 on B_delta");
    if (rho >= 2.0 * delta_ && chi != 0.0) fail("chi != 0 outside B_2delta");
    if (gn > C_chi() / delta_ * (1.0 + slack)) fail("|grad chi| above C_chi / delta");
    if (std::abs(lap) > C_lap() / (delta_ * delta_) * (1.0 + slack)) fail("|lap chi| above C_lap / delta^2");
    int a = d - 1;
    while (a >= 0 && idx[a] == hi[a]) {
      idx[a] = lo[a];
      --a;
    }
    if (a < 0) break;
    ++idx[a];
  }
  const double dt = T / (nt - 1);
  for (int k = 0; k < nt; ++k) {
    const double t = k * dt;
    const double s = std::abs(t - center_.t);
    if (s > tau2_ + dt) continue;
    const double e = eta(t);
    if (e < 0.0 || e > 1.0) fail("eta outside [0, 1]");
    if (s < tau_ && e != 1.0) fail("eta != 1 on the inner interval");
    if (s >= tau2_ && e != 0.0) fail("eta != 0 outside the outer interval");
    if (std::abs(eta_d1(t)) > C_eta() / tau_ * (1.0 + slack)) fail("|eta'| above C_eta / delta^alpha");
  }
}

}  // namespace dissdim

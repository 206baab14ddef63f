#include "dissdim/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "dissdim/errors.hpp"
#include "dissdim/numerics.hpp"

namespace dissdim::fixtures {

double sphere_area(int d) {
  require(d >= 1, "dimension must be >= 1");
  const double h = 0.5 * d;
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

PowerLawField::PowerLawField(int d_, double eps_) : d(d_), eps(eps_) {
  require(d >= 1, "dimension must be >= 1");
  require(eps > 0.0 && eps < d, "exponent eps must lie in (0, d)");
}

void PowerLawField::value(std::span<const double> x, std::span<double> v) const {
  double r2 = 0.0;
  for (double c : x) r2 += c * c;
  if (r2 == 0.0) {
    std::fill(v.begin(), v.end(), 0.0);
    return;
  }
  const double scale = std::pow(std::sqrt(r2), eps - d);
  for (std::size_t k = 0; k < x.size(); ++k) v[k] = x[k] * scale;
}

double PowerLawField::divergence(std::span<const double> x) const {
  double r2 = 0.0;
  for (double c : x) r2 += c * c;
  return eps * std::pow(std::sqrt(r2), eps - d);
}

double power_law_ball_mass(const PowerLawField& field, double delta) {
  require(delta > 0.0 && std::isfinite(delta), "ball radius must be positive");
  const double eps = field.eps;
  // In polar coordinates the divergence mass is c_d int_0^delta eps rho^{eps-1} d rho.
  auto radial = [eps](double rho) { return eps * std::pow(rho, eps - 1.0); };
  constexpr int kShells = 40;
  double sum = 0.0;
  double hi = delta;
  for (int k = 0; k < kShells; ++k) {
    const double lo = 0.5 * hi;
    sum += adaptive_simpson(radial, lo, hi, 1e-10);
    hi = lo;
  }
  sum += std::pow(hi, eps);
  return field.c_d() * sum;
}

namespace {

std::vector<std::vector<double>> unit_directions(int d, int n) {
  std::vector<std::vector<double>> dirs;
  if (d == 1) {
    for (int i = 0; i < n; ++i) dirs.push_back({i % 2 == 0 ? 1.0 : -1.0});
    return dirs;
  }
  if (d == 2) {
    for (int i = 0; i < n; ++i) {
      const double th = 2.0 * std::numbers::pi * (i + 0.5) / n;
      dirs.push_back({std::cos(th), std::sin(th)});
    }
    return dirs;
  }
  if (d == 3) {
    // Fibonacci sphere.
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / n;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      dirs.push_back({r * std::cos(golden * i), r * std::sin(golden * i), z});
    }
    return dirs;
  }
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> g;
  for (int i = 0; i < n; ++i) {
    std::vector<double> v(d);
    double s = 0.0;
    for (double& c : v) {
      c = g(rng);
      s += c * c;
    }
    for (double& c : v) c /= std::sqrt(s);
    dirs.push_back(std::move(v));
  }
  return dirs;
}

}  // namespace

AtomicMeasure power_law_measure(const PowerLawField& field, double r_min, double r_max, int shells, int directions) {
  require(r_min > 0.0 && r_max > r_min, "need 0 < r_min < r_max");
  require(shells >= 1 && directions >= 1, "need at least one shell and one direction");
  const int d = field.d;
  const double cd = field.c_d();
  const auto dirs = unit_directions(d, directions);
  std::vector<double> coords(d, 0.0);
  std::vector<double> times{0.0};
  std::vector<double> weights{cd * std::pow(r_min, field.eps)};
  const double q = std::pow(r_max / r_min, 1.0 / shells);
  for (int k = 0; k < shells; ++k) {
    const double lo = r_min * std::pow(q, k);
    const double hi = lo * q;
    const double mass = cd * (std::pow(hi, field.eps) - std::pow(lo, field.eps));
    const double rm = std::sqrt(lo * hi);
    for (const auto& dir : dirs) {
      for (int a = 0; a < d; ++a) coords.push_back(rm * dir[a]);
      times.push_back(0.0);
      weights.push_back(mass / directions);
    }
  }
  return AtomicMeasure(d, std::move(coords), std::move(times), std::move(weights));
}

SpatialVectorField sample_power_law(const PowerLawField& field, const SpatialGrid& grid) {
  require(grid.d == field.d, "grid dimension does not match the field");
  return SpatialVectorField::sample(grid, [&](std::span<const double> x, std::span<double> v) { field.value(x, v); });
}

double RiemannDatum::entropy_rate() const {
  if (!is_shock()) return 0.0;
  const double j = u_l - u_r;
  return j * j * j / 12.0;
}

void RiemannDatum::validate() const {
  require(std::isfinite(u_l) && std::isfinite(u_r) && std::isfinite(x0), "Riemann states must be finite");
  require(u_l != u_r, "degenerate Riemann datum: u_l == u_r");
}

double burgers_exact(const RiemannDatum& s, double x, double t) {
  if (t <= 0.0) return x < s.x0 ? s.u_l : s.u_r;
  if (s.is_shock()) return x < s.x0 + s.shock_speed() * t ? s.u_l : s.u_r;
  if (x <= s.x0 + s.u_l * t) return s.u_l;
  if (x >= s.x0 + s.u_r * t) return s.u_r;
  return (x - s.x0) / t;
}

double burgers_cell_average(const RiemannDatum& s, double lo, double hi, double t) {
  require(hi > lo, "cell needs lo < hi");
  auto constant_part = [](double a, double b, double v) { return b > a ? (b - a) * v : 0.0; };
  double integral = 0.0;
  if (t <= 0.0 || s.is_shock()) {
    const double xs = t <= 0.0 ? s.x0 : s.x0 + s.shock_speed() * t;
    integral += constant_part(lo, std::min(hi, xs), s.u_l);
    integral += constant_part(std::max(lo, xs), hi, s.u_r);
  } else {
    const double fl = s.x0 + s.u_l * t;
    const double fr = s.x0 + s.u_r * t;
    integral += constant_part(lo, std::min(hi, fl), s.u_l);
    integral += constant_part(std::max(lo, fr), hi, s.u_r);
    const double a = std::max(lo, fl);
    const double b = std::min(hi, fr);
    if (b > a) integral += ((b - s.x0) * (b - s.x0) - (a - s.x0) * (a - s.x0)) / (2.0 * t);
  }
  return integral / (hi - lo);
}

GriddedField burgers_entropy_solution(const RiemannDatum& datum, const GridSpec& g) {
  datum.validate();
  SpatialGrid grid{1, g.a, g.b, g.nx};
  grid.validate();
  require(g.nt >= 2 && g.T > 0.0, "need nt >= 2 and T > 0");
  const double h = grid.h();
  std::vector<double> u(static_cast<std::size_t>(g.nt) * g.nx);
  for (int k = 0; k < g.nt; ++k) {
    const double t = k * g.T / (g.nt - 1);
    for (int i = 0; i < g.nx; ++i) {
      const double x = grid.coord(i);
      const double lo = std::max(g.a, x - 0.5 * h);
      const double hi = std::min(g.b, x + 0.5 * h);
      u[static_cast<std::size_t>(k) * g.nx + i] = burgers_cell_average(datum, lo, hi, t);
    }
  }
  return GriddedField(grid, g.T, g.nt, std::move(u));
}

ShockMeasure burgers_dissipation_measure(const RiemannDatum& datum, double T, int n_atoms) {
  datum.validate();
  require(T > 0.0, "T must be positive");
  require(n_atoms >= 1, "need at least one atom");
  if (!datum.is_shock()) return {AtomicMeasure(1, {}, {}, {}), true};
  const double dt = T / n_atoms;
  const double w = datum.entropy_rate() * dt;
  std::vector<double> x(n_atoms);
  std::vector<double> t(n_atoms);
  std::vector<double> wt(n_atoms, w);
  for (int k = 0; k < n_atoms; ++k) {
    t[k] = (k + 0.5) * dt;
    x[k] = datum.x0 + datum.shock_speed() * t[k];
  }
  return {AtomicMeasure(1, std::move(x), std::move(t), std::move(wt)), false};
}

ViscousRun viscous_burgers_run(const RiemannDatum& datum, double nu, const ViscousConfig& cfg) {
  require(nu > 0.0 && std::isfinite(nu), "viscosity must be positive");
  require(cfg.b > cfg.a, "domain needs a < b");
  require(cfg.T > 0.0, "T must be positive");
  require(cfg.n_frames >= 2, "need at least 2 frames");
  require(cfg.cfl > 0.0 && cfg.cfl <= 0.9, "cfl must lie in (0, 0.9]");
  require(cfg.h >= 0.0, "cell width must be non-negative");
  const bool periodic = cfg.boundary == Boundary::periodic;
  const double h_target = cfg.h > 0.0 ? cfg.h : nu / 20.0;
  const double L = cfg.b - cfg.a;
  long n = periodic ? std::lround(L / h_target) : std::lround(L / h_target) + 1;
  require(n >= 3, "grid too coarse");
  require(n <= 50'000'000, "grid too fine");
  const double h = periodic ? L / n : L / (n - 1);

  std::vector<double> u(n);
  for (long i = 0; i < n; ++i) {
    const double x = cfg.a + i * h;
    if (cfg.initial) {
      u[i] = cfg.initial(x);
    } else if (x == datum.x0) {
      u[i] = 0.5 * (datum.u_l + datum.u_r);
    } else {
      u[i] = x < datum.x0 ? datum.u_l : datum.u_r;
    }
  }
  if (!periodic) {
    u.front() = datum.u_l;
    u.back() = datum.u_r;
  }
  double amax = 0.0;
  for (double v : u) {
    if (!std::isfinite(v)) throw NumericalError("non-finite initial data");
    amax = std::max(amax, std::abs(v));
  }

  const double frame_dt = cfg.T / (cfg.n_frames - 1);
  const double dt_max = cfg.cfl / (amax / h + 2.0 * nu / (h * h));
  const long sub = std::max(1L, static_cast<long>(std::ceil(frame_dt / dt_max - 1e-12)));
  const double dt = frame_dt / sub;
  const double explicit_limit = std::min(amax > 0.0 ? h / amax : INFINITY, h * h / (2.0 * nu));
  const double margin = dt / explicit_limit;
  if (margin > 0.9 + 1e-12) throw NumericalError("stability condition violated");

  const long nx_out = periodic ? n + 1 : n;
  std::vector<double> frames(static_cast<std::size_t>(cfg.n_frames) * nx_out);
  auto store = [&](int k) {
    std::copy(u.begin(), u.end(), frames.begin() + static_cast<std::ptrdiff_t>(k) * nx_out);
    if (periodic) frames[static_cast<std::size_t>(k) * nx_out + n] = u[0];
  };
  auto energy = [&]() {
    double e = 0.0;
    for (long i = 0; i < n; ++i) {
      const double w = (!periodic && (i == 0 || i == n - 1)) ? 0.5 : 1.0;
      e += w * 0.5 * u[i] * u[i] * h;
    }
    return e;
  };
  store(0);
  const double e0 = energy();

  std::vector<double> next(n);
  std::vector<double> diss(n);
  std::vector<double> ax;
  std::vector<double> at;
  std::vector<double> aw;
  const double lam = dt / h;
  const double mu = nu * dt / (h * h);
  const double dw = nu * h * dt / (4.0 * h * h);
  // Local Lax-Friedrichs flux through the face between states ul and ur.
  auto face = [](double ul, double ur) {
    const double a = std::max(std::abs(ul), std::abs(ur));
    return 0.25 * (ul * ul + ur * ur) - 0.5 * a * (ur - ul);
  };
  std::vector<double> flux(n);
  double total = 0.0;
  long steps = 0;

  for (int k = 1; k < cfg.n_frames; ++k) {
    std::fill(diss.begin(), diss.end(), 0.0);
    for (long s = 0; s < sub; ++s) {
      // flux[i] crosses the face between cells i and i + 1.
      const double* uu = u.data();
      double* fl = flux.data();
      for (long i = 0; i + 1 < n; ++i) fl[i] = face(uu[i], uu[i + 1]);
      if (periodic) fl[n - 1] = face(uu[n - 1], uu[0]);
      double* nx_ = next.data();
      double* dd = diss.data();
      for (long i = 1; i < n - 1; ++i) {
        const double g = uu[i + 1] - uu[i - 1];
        dd[i] += dw * g * g;
        nx_[i] = uu[i] - lam * (fl[i] - fl[i - 1]) + mu * (uu[i + 1] - 2.0 * uu[i] + uu[i - 1]);
      }
      if (periodic) {
        for (long i : {0L, n - 1}) {
          const long im = i == 0 ? n - 1 : i - 1;
          const long ip = i == n - 1 ? 0 : i + 1;
          const double g = uu[ip] - uu[im];
          dd[i] += dw * g * g;
          nx_[i] = uu[i] - lam * (fl[i] - fl[im]) + mu * (uu[ip] - 2.0 * uu[i] + uu[im]);
        }
      } else {
        nx_[0] = uu[0];
        nx_[n - 1] = uu[n - 1];
      }
      u.swap(next);
      ++steps;
    }
    for (double v : u) {
      if (!std::isfinite(v)) throw NumericalError("non-finite state in viscous run");
    }
    store(k);
    const double tm = (k - 0.5) * frame_dt;
    for (long i = 0; i < n; ++i) {
      if (diss[i] <= 0.0) continue;
      ax.push_back(cfg.a + i * h);
      at.push_back(tm);
      aw.push_back(diss[i]);
      total += diss[i];
    }
  }

  SpatialGrid grid{1, cfg.a, periodic ? cfg.b : cfg.a + (n - 1) * h, static_cast<int>(nx_out)};
  GriddedField field(grid, cfg.T, cfg.n_frames, std::move(frames));
  AtomicMeasure measure(1, std::move(ax), std::move(at), std::move(aw));
  ViscousRun run{nu, cfg, h, dt, steps, margin, std::move(field), std::move(measure), total, e0, energy()};
  run.config.initial = nullptr;
  return run;
}

double richardson_limit(double d_nu, double d_2nu) { return 2.0 * d_nu - d_2nu; }

AtomicMeasure time_singular_measure_fixture(int d, int n_atoms, std::uint64_t seed) {
  require(d >= 1, "dimension must be >= 1");
  require(n_atoms >= 1, "need at least one atom");
  // Additive recurrence x_n = frac(x_0 + n g) with g_k = phi_d^{-k}, where
  // phi_d solves x^{d+1} = x + 1: evenly spread for every n, unlike i.i.d.
  // uniform points whose clustering inflates sup-densities.
  double phi = 2.0;
  for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (d + 1));
  std::vector<double> g(d);
  for (int a = 0; a < d; ++a) g[a] = std::pow(1.0 / phi, a + 1);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> x0(d);
  for (double& v : x0) v = U(rng);
  std::vector<double> coords(static_cast<std::size_t>(n_atoms) * d);
  for (int n = 0; n < n_atoms; ++n) {
    for (int a = 0; a < d; ++a) {
      const double v = x0[a] + static_cast<double>(n) * g[a];
      coords[static_cast<std::size_t>(n) * d + a] = v - std::floor(v);
    }
  }
  std::vector<double> times(n_atoms, 0.5);
  std::vector<double> weights(n_atoms, 1.0 / n_atoms);
  return AtomicMeasure(d, std::move(coords), std::move(times), std::move(weights));
}

AtomicMeasure uniform_grid_measure(int d, int n) {
  require(d >= 1 && n >= 1, "need d >= 1 and n >= 1");
  std::size_t total = 1;
  for (int k = 0; k <= d; ++k) total *= static_cast<std::size_t>(n);
  std::vector<double> coords(total * d);
  std::vector<double> times(total);
  std::vector<double> weights(total, 1.0 / static_cast<double>(total));
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rest = i;
    times[i] = (static_cast<double>(rest % n) + 0.5) / n;
    rest /= n;
    for (int a = 0; a < d; ++a) {
      coords[i * d + a] = (static_cast<double>(rest % n) + 0.5) / n;
      rest /= n;
    }
  }
  return AtomicMeasure(d, std::move(coords), std::move(times), std::move(weights));
}

AtomicMeasure dirac_measure(const SpaceTimePoint& at, double weight) {
  require(weight >= 0.0, "weight must be non-negative");
  return AtomicMeasure(at.dim(), at.x, {at.t}, {weight});
}

}  // namespace dissdim::fixtures

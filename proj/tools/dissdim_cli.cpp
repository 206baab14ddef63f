#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dissdim/aniso_measure.hpp"
#include "dissdim/errors.hpp"
#include "dissdim/exponents.hpp"
#include "dissdim/field.hpp"
#include "dissdim/fixtures.hpp"
#include "dissdim/json_io.hpp"
#include "dissdim/measure.hpp"
#include "dissdim/weak_balance.hpp"

using namespace dissdim;
using json_io::ordered_json;
using detail::format_double;

namespace {

/// Writes to a file, or to stdout / stderr for "-" / "".
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw ValidationError("cannot open '" + path + "' for writing");
      os_ = file_.get();
    }
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

void emit(const ordered_json& j, const std::string& path, std::ostream& fallback) {
  Sink s(path, fallback);
  *s << j.dump(2) << '\n';
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || end == tok.c_str() || *end != '\0' || !std::isfinite(v)) {
      throw ValidationError("bad " + what + " component '" + tok + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<double> ladder(double delta_max, double ratio, int count) {
  require(delta_max > 0.0 && std::isfinite(delta_max), "ladder delta_max must be positive");
  require(ratio > 0.0 && ratio < 1.0, "ladder ratio must lie in (0, 1)");
  require(count >= 3, "ladder count must be >= 3");
  return aniso::geometric_scales(delta_max, ratio, static_cast<std::size_t>(count));
}

/// Least-squares slope of log y against log x over the positive entries.
std::optional<double> log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] > 0.0 && x[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2) return std::nullopt;
  const double n = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

// ---------------------------------------------------------------- exponents

struct ExponentsOpts {
  std::string regime;
  int d = 3;
  std::string q = "inf";
  std::string r = "inf";
  std::optional<double> alpha;
  bool unbounded_pressure = false;
  std::string case_tag;
  double param = 0.0;
  std::string out;
};

int run_exponents(const ExponentsOpts& o) {
  using namespace exponents;
  const IntegrabilityClass cls{o.d, ExtendedReal::parse(o.q), ExtendedReal::parse(o.r)};
  ExponentReport rep;
  if (o.regime == "euler") {
    if (o.unbounded_pressure) {
      rep = euler_unbounded_pressure(cls);
    } else {
      rep = o.alpha ? euler_exponent(cls, *o.alpha) : euler_optimal(cls);
    }
  } else if (o.regime == "ns" || o.regime == "navier_stokes") {
    rep = navier_stokes_exponent(cls, o.alpha.value_or(2.0));
  } else if (o.regime == "claw" || o.regime == "conservation_law") {
    rep = conservation_law_exponent(o.d, cls.r);
  } else if (o.regime == "numerology") {
    require(!o.case_tag.empty(), "numerology needs --case");
    rep = case_numerology(o.d, parse_case(o.case_tag), o.param);
  } else {
    throw ValidationError("unknown regime '" + o.regime + "'");
  }
  emit(json_io::document(json_io::to_json(rep)), o.out, std::cout);
  return 0;
}

// ---------------------------------------------------------------- dimension

struct DimensionOpts {
  std::string measure;
  double alpha = 1.0;
  std::optional<double> s;
  std::optional<double> delta_max;
  double ratio = 0.5;
  int count = 6;
  std::size_t centers = 1000;
  std::string csv = "-";
  std::string json;
};

double measure_width(const AtomicMeasure& mu) {
  double w = 0.0;
  for (int a = 0; a < mu.dim(); ++a) {
    double lo = INFINITY;
    double hi = -INFINITY;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      lo = std::min(lo, mu.x(i)[a]);
      hi = std::max(hi, mu.x(i)[a]);
    }
    w = std::max(w, hi - lo);
  }
  return w > 0.0 ? w : 1.0;
}

int run_dimension(const DimensionOpts& o) {
  require(o.alpha > 0.0 && std::isfinite(o.alpha), "alpha must be positive");
  const AtomicMeasure mu = measure_io::read_file(o.measure);
  if (mu.size() == 0 || !(mu.total_mass() > 0.0)) throw ValidationError("empty support");
  const std::vector<double> scales = ladder(o.delta_max.value_or(measure_width(mu) / 8.0), o.ratio, o.count);
  const double s = o.s.value_or(static_cast<double>(mu.dim()));
  require(s >= 0.0 && std::isfinite(s), "s must be non-negative");

  const auto bc = aniso::box_counting_dimension(mu, o.alpha, scales);
  const auto policy = o.centers == 0 ? aniso::CenterPolicy::support_atoms() : aniso::CenterPolicy::strided(o.centers);
  const auto lad = aniso::density_ladder(mu, o.alpha, s, scales, policy);
  const auto cert = aniso::certify_lower_bound(lad);

  {
    Sink csv(o.csv, std::cout);
    *csv << "delta,count,density\n";
    for (std::size_t i = 0; i < scales.size(); ++i) {
      *csv << format_double(scales[i]) << ',' << bc.counts[i] << ',' << format_double(lad.densities[i]) << '\n';
    }
  }
  ordered_json j;
  j["kind"] = "dimension";
  j["d"] = mu.dim();
  j["n_atoms"] = mu.size();
  j["total_mass"] = mu.total_mass();
  j["alpha"] = o.alpha;
  j["s"] = s;
  j["dim_estimate"] = bc.dim_estimate;
  j["fit_residual"] = bc.fit_residual;
  j["certified_s"] = cert.certified_s;
  j["verdict"] = aniso::to_string(cert.verdict);
  j["box_count"] = json_io::to_json(bc);
  j["ladder"] = json_io::to_json(lad);
  j["certification"] = json_io::to_json(cert);
  emit(json_io::document(j), o.json, std::cerr);
  return 0;
}

// ---------------------------------------------------------------- verify

struct VerifyOpts {
  std::string field;
  double alpha = 1.0;
  std::string q = "inf";
  std::string r = "inf";
  double nu = 0.0;
  std::string pair = "auto";
  std::vector<std::string> centers;
  std::optional<double> delta_max;
  double ratio = 0.5;
  int count = 6;
  std::string profile = "cubic";
  std::string csv = "-";
  std::string json;
};

int run_verify(const VerifyOpts& o) {
  const GriddedField f = field_io::read_file(o.field);
  const ExtendedReal q = ExtendedReal::parse(o.q);
  const ExtendedReal r = ExtendedReal::parse(o.r);
  require(q >= 3.0 && r >= 3.0, "Hölder bound needs q, r >= 3");
  require(o.nu >= 0.0 && std::isfinite(o.nu), "viscosity must be non-negative");
  require(o.alpha > 0.0 && std::isfinite(o.alpha), "alpha must be positive");

  std::optional<weak::EntropyPair> pair;
  std::string pair_name = o.pair;
  if (pair_name == "auto") pair_name = (f.d() == 1 && !f.has_pressure()) ? "burgers" : "kinetic";
  if (pair_name == "burgers") {
    require(f.d() == 1, "the Burgers pair needs d = 1");
    pair = weak::EntropyPair::burgers();
  } else if (pair_name != "kinetic") {
    throw ValidationError("unknown entropy pair '" + o.pair + "'");
  }
  StepProfile profile;
  if (o.profile == "mollified") {
    profile = StepProfile(StepProfile::Kind::mollified);
  } else if (o.profile != "cubic") {
    throw ValidationError("unknown cutoff profile '" + o.profile + "'");
  }

  std::vector<SpaceTimePoint> centers;
  for (const auto& c : o.centers) {
    auto v = parse_list(c, "centre");
    require(static_cast<int>(v.size()) == f.d() + 1, "centre needs d space coordinates and a time");
    const double t = v.back();
    v.pop_back();
    centers.push_back({v, t});
  }
  if (centers.empty()) {
    centers.push_back({std::vector<double>(f.d(), 0.5 * (f.grid().a + f.grid().b)), 0.5 * f.T()});
  }
  const std::vector<double> scales =
      ladder(o.delta_max.value_or((f.grid().b - f.grid().a) / 8.0), o.ratio, o.count);
  const bool viscous = o.nu > 0.0;

  Sink csv(o.csv, std::cout);
  for (int a = 0; a < f.d(); ++a) *csv << 'x' << a + 1 << ',';
  *csv << "t,delta,weak_mass,holder_bound,ratio" << (viscous ? ",morrey" : "") << '\n';

  std::size_t rows = 0;
  std::size_t skipped = 0;
  // Cylinders narrower than one grid cell in space or time.
  std::size_t unresolved = 0;
  double max_ratio = 0.0;
  ordered_json per_center = ordered_json::array();
  for (const auto& c : centers) {
    std::vector<double> ds;
    std::vector<double> ws;
    for (double delta : scales) {
      if (delta < f.h() || std::pow(delta, o.alpha) < f.dt()) {
        ++unresolved;
        continue;
      }
      weak::BalanceReport rep;
      try {
        rep = weak::holder_cylinder_bound(f, CutoffPair(c, delta, o.alpha, profile), q, r, pair ? &*pair : nullptr, o.nu);
      } catch (const MarginError&) {
        ++skipped;
        continue;
      }
      const double bound = *rep.holder_bound;
      const double ratio = bound > 0.0 ? rep.weak_mass / bound : 0.0;
      max_ratio = std::max(max_ratio, ratio);
      for (double x : c.x) *csv << format_double(x) << ',';
      *csv << format_double(c.t) << ',' << format_double(delta) << ',' << format_double(rep.weak_mass) << ','
           << format_double(bound) << ',' << format_double(ratio);
      if (viscous) *csv << ',' << format_double(*rep.morrey);
      *csv << '\n';
      ++rows;
      ds.push_back(delta);
      ws.push_back(std::abs(rep.weak_mass));
    }
    const auto slope = log_slope(ds, ws);
    per_center.push_back(
        {{"center", json_io::to_json(c)}, {"rows", ds.size()}, {"slope", slope ? ordered_json(*slope) : ordered_json(nullptr)}});
  }

  ordered_json j;
  j["kind"] = "verify";
  j["mode"] = viscous ? "navier_stokes" : "euler";
  j["pair"] = pair_name;
  j["profile"] = profile.name();
  j["alpha"] = o.alpha;
  j["q"] = json_io::to_json(q);
  j["r"] = json_io::to_json(r);
  j["nu"] = o.nu;
  j["scales"] = scales;
  j["rows"] = rows;
  j["skipped"] = skipped;
  j["unresolved"] = unresolved;
  j["max_ratio"] = max_ratio;
  j["centers"] = per_center;
  j["slope"] = per_center.empty() ? ordered_json(nullptr) : per_center[0]["slope"];
  emit(json_io::document(j), o.json, std::cerr);
  return 0;
}

// ---------------------------------------------------------------- burgers

struct BurgersOpts {
  double ul = 1.0;
  double ur = -1.0;
  double x0 = 0.0;
  double nu = 0.0;
  double a = -1.0;
  double b = 1.0;
  double T = 1.0;
  int nx = 401;
  int nt = 201;
  double h = 0.0;
  int frames = 101;
  int atoms = 1000;
  std::string field_out;
  std::string measure_out;
  std::string out;
};

void write_field(const std::string& path, const GriddedField& f) {
  if (path.size() > 4 && path.substr(path.size() - 4) == ".csv") {
    Sink s(path, std::cout);
    field_io::write_csv(*s, f);
  } else {
    field_io::write_file(path, f);
  }
}

int run_burgers(const BurgersOpts& o) {
  const fixtures::RiemannDatum datum{o.ul, o.ur, o.x0};
  datum.validate();
  ordered_json j;
  if (o.nu > 0.0) {
    fixtures::ViscousConfig cfg;
    cfg.a = o.a;
    cfg.b = o.b;
    cfg.h = o.h;
    cfg.T = o.T;
    cfg.n_frames = o.frames;
    const auto run = fixtures::viscous_burgers_run(datum, o.nu, cfg);
    if (!o.field_out.empty()) write_field(o.field_out, run.field);
    if (!o.measure_out.empty()) measure_io::write_file(o.measure_out, run.dissipation);
    j = json_io::run_manifest(run, datum);
  } else {
    require(o.nu == 0.0, "viscosity must be non-negative");
    fixtures::GridSpec gs{o.a, o.b, o.nx, o.T, o.nt};
    const auto field = fixtures::burgers_entropy_solution(datum, gs);
    const auto sm = fixtures::burgers_dissipation_measure(datum, o.T, o.atoms);
    if (!o.field_out.empty()) write_field(o.field_out, field);
    if (!o.measure_out.empty()) measure_io::write_file(o.measure_out, sm.measure);
    j["schema"] = json_io::kSchema;
    j["kind"] = "burgers_entropy_solution";
    j["datum"] = {{"u_l", datum.u_l}, {"u_r", datum.u_r}, {"x0", datum.x0}};
    j["grid"] = {{"a", o.a}, {"b", o.b}, {"nx", o.nx}, {"T", o.T}, {"nt", o.nt}};
    j["shock"] = datum.is_shock();
    j["shock_speed"] = datum.is_shock() ? ordered_json(datum.shock_speed()) : ordered_json(nullptr);
    j["entropy_rate"] = datum.entropy_rate();
    j["total_entropy_production"] = sm.measure.total_mass();
    j["atoms"] = sm.measure.size();
  }
  emit(j, o.out, std::cout);
  return 0;
}

// ---------------------------------------------------------------- vfield

struct VfieldOpts {
  int d = 2;
  double eps = 0.5;
  std::vector<double> deltas = {0.05, 0.1, 0.2, 0.4};
  std::string measure_out;
  double r_min = 1e-3;
  double r_max = 0.5;
  int shells = 12;
  int directions = 16;
  std::string out;
};

int run_vfield(const VfieldOpts& o) {
  const fixtures::PowerLawField field(o.d, o.eps);
  require(!o.deltas.empty(), "need at least one --delta");
  ordered_json masses = ordered_json::array();
  std::vector<double> m;
  for (double delta : o.deltas) {
    const double mass = fixtures::power_law_ball_mass(field, delta);
    const double exact = field.c_d() * std::pow(delta, o.eps);
    masses.push_back(
        {{"delta", delta}, {"mass", mass}, {"c_d_delta_eps", exact}, {"relative_error", std::abs(mass - exact) / exact}});
    m.push_back(mass);
  }
  ordered_json ratios = ordered_json::array();
  for (std::size_t i = 0; i + 1 < o.deltas.size(); ++i) {
    ratios.push_back({{"delta", o.deltas[i]},
                      {"delta_prime", o.deltas[i + 1]},
                      {"ratio", m[i] / m[i + 1]},
                      {"expected", std::pow(o.deltas[i] / o.deltas[i + 1], o.eps)}});
  }
  ordered_json j;
  j["schema"] = json_io::kSchema;
  j["kind"] = "power_law_field";
  j["d"] = o.d;
  j["eps"] = o.eps;
  j["c_d"] = field.c_d();
  j["ball_mass"] = masses;
  j["nested_ratios"] = ratios;
  if (!o.measure_out.empty()) {
    const auto mu = fixtures::power_law_measure(field, o.r_min, o.r_max, o.shells, o.directions);
    measure_io::write_file(o.measure_out, mu);
    j["measure"] = {{"path", o.measure_out}, {"atoms", mu.size()}, {"total_mass", mu.total_mass()}};
  }
  emit(j, o.out, std::cout);
  return 0;
}

int fail(const std::string& kind, int code, const std::string& msg) {
  std::cout << json_io::error_object(kind, code, msg).dump(2) << '\n';
  std::cerr << "dissdim: " << msg << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anisotropic dimension estimates for dissipation measures"};
  app.require_subcommand(1);

  ExponentsOpts eo;
  auto* ex = app.add_subcommand("exponents", "Dimension exponent for an integrability class (JSON)");
  ex->add_option("--regime", eo.regime, "euler | ns | claw | numerology")->required();
  ex->add_option("--d", eo.d, "space dimension");
  ex->add_option("--q", eo.q, "time integrability (number or inf)");
  ex->add_option("--r", eo.r, "space integrability (number or inf)");
  ex->add_option("--alpha", eo.alpha, "time scaling; euler defaults to the balanced value, ns to 2");
  ex->add_flag("--unbounded-pressure", eo.unbounded_pressure, "euler with r = inf and no pressure bound");
  ex->add_option("--case", eo.case_tag, "numerology case: uniform_in_time_Lr | besov_13 | sobolev_beta");
  ex->add_option("--param", eo.param, "numerology parameter (r or beta)");
  ex->add_option("--out", eo.out, "output path (default stdout)");

  DimensionOpts dm;
  auto* di = app.add_subcommand("dimension", "Box-counting and density-ladder estimates for a measure file");
  di->add_option("--measure", dm.measure, "dissdim-measure file")->required();
  di->add_option("--alpha", dm.alpha, "time scaling");
  di->add_option("--s", dm.s, "density exponent (default d)");
  di->add_option("--delta-max", dm.delta_max, "largest scale (default 1/8 of the support width)");
  di->add_option("--ratio", dm.ratio, "ladder ratio in (0, 1)");
  di->add_option("--count", dm.count, "number of scales (>= 3)");
  di->add_option("--centers", dm.centers, "at most this many cylinder centres (0: every atom)");
  di->add_option("--csv", dm.csv, "CSV output path (default stdout)");
  di->add_option("--json", dm.json, "JSON summary path (default stderr)");

  VerifyOpts vo;
  auto* ve = app.add_subcommand("verify", "Weak mass against the Hölder bound over a cylinder sweep");
  ve->add_option("--field", vo.field, "dissdim-field file")->required();
  ve->add_option("--alpha", vo.alpha, "time scaling");
  ve->add_option("--q", vo.q, "time integrability (>= 3 or inf)");
  ve->add_option("--r", vo.r, "space integrability (>= 3 or inf)");
  ve->add_option("--nu", vo.nu, "viscosity (> 0 selects the Navier-Stokes balance)");
  ve->add_option("--pair", vo.pair, "auto | kinetic | burgers");
  ve->add_option("--center", vo.centers, "cylinder centre x1,...,xd,t (repeatable; default domain centre)");
  ve->add_option("--delta-max", vo.delta_max, "largest radius (default 1/8 of the domain width)");
  ve->add_option("--ratio", vo.ratio, "ladder ratio in (0, 1)");
  ve->add_option("--count", vo.count, "number of radii (>= 3)");
  ve->add_option("--profile", vo.profile, "cutoff profile: cubic | mollified");
  ve->add_option("--csv", vo.csv, "CSV output path (default stdout)");
  ve->add_option("--json", vo.json, "JSON summary path (default stderr)");

  BurgersOpts bo;
  auto* bu = app.add_subcommand("burgers", "Burgers Riemann fixtures: exact entropy solution or viscous run");
  bu->add_option("--ul", bo.ul, "left state");
  bu->add_option("--ur", bo.ur, "right state");
  bu->add_option("--x0", bo.x0, "initial discontinuity");
  bu->add_option("--nu", bo.nu, "viscosity (0: exact entropy solution)");
  bu->add_option("--a", bo.a, "domain left end");
  bu->add_option("--b", bo.b, "domain right end");
  bu->add_option("--T", bo.T, "final time");
  bu->add_option("--nx", bo.nx, "nodes (exact solution)");
  bu->add_option("--nt", bo.nt, "time levels (exact solution)");
  bu->add_option("--cell-width", bo.h, "cell width (viscous; default nu / 20)");
  bu->add_option("--frames", bo.frames, "stored frames (viscous)");
  bu->add_option("--atoms", bo.atoms, "shock atoms (exact solution)");
  bu->add_option("--field-out", bo.field_out, "field output (.csv for the text variant)");
  bu->add_option("--measure-out", bo.measure_out, "dissipation measure output");
  bu->add_option("--out", bo.out, "manifest path (default stdout)");

  VfieldOpts vf;
  auto* vfc = app.add_subcommand("vfield", "Power-law divergence field: ball masses and atomic measure");
  vfc->add_option("--d", vf.d, "space dimension");
  vfc->add_option("--eps", vf.eps, "exponent in (0, d)");
  vfc->add_option("--delta", vf.deltas, "ball radii (repeatable)");
  vfc->add_option("--measure-out", vf.measure_out, "write the atomic divergence measure here");
  vfc->add_option("--r-min", vf.r_min, "innermost shell radius");
  vfc->add_option("--r-max", vf.r_max, "outermost shell radius");
  vfc->add_option("--shells", vf.shells, "number of shells");
  vfc->add_option("--directions", vf.directions, "atoms per shell");
  vfc->add_option("--out", vf.out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", 2, e.what());
  }

  try {
    if (ex->parsed()) return run_exponents(eo);
    if (di->parsed()) return run_dimension(dm);
    if (ve->parsed()) return run_verify(vo);
    if (bu->parsed()) return run_burgers(bo);
    if (vfc->parsed()) return run_vfield(vf);
  } catch (const ValidationError& e) {
    return fail("validation", 2, e.what());
  } catch (const NumericalError& e) {
    return fail("numerical", 3, e.what());
  } catch (const std::exception& e) {
    return fail("numerical", 3, e.what());
  }
  return 2;
}

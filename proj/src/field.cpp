#include "dissdim/field.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dissdim/errors.hpp"
#include "dissdim/measure.hpp"

namespace dissdim {

std::size_t SpatialGrid::n_nodes() const {
  std::size_t n = 1;
  for (int k = 0; k < d; ++k) n *= static_cast<std::size_t>(nx);
  return n;
}

std::size_t SpatialGrid::flat(std::span<const long> idx) const {
  std::size_t f = 0;
  for (int k = 0; k < d; ++k) f = f * nx + static_cast<std::size_t>(idx[k]);
  return f;
}

void SpatialGrid::unflat(std::size_t f, std::span<long> idx) const {
  for (int k = d - 1; k >= 0; --k) {
    idx[k] = static_cast<long>(f % nx);
    f /= nx;
  }
}

void SpatialGrid::validate() const {
  require(d >= 1, "grid dimension must be >= 1");
  require(nx >= 2, "grid needs nx >= 2");
  require(std::isfinite(a) && std::isfinite(b) && b > a, "grid extent needs a < b");
}

GriddedField::GriddedField(SpatialGrid grid, double T, int nt, std::vector<double> u, std::optional<std::vector<double>> p,
                           std::optional<std::vector<double>> theta)
    : grid_(grid), T_(T), nt_(nt), u_(std::move(u)), p_(std::move(p)), theta_(std::move(theta)) {
  grid_.validate();
  require(nt_ >= 2, "field needs nt >= 2");
  require(T_ > 0.0 && std::isfinite(T_), "field needs T > 0");
  n_space_ = grid_.n_nodes();
  const std::size_t n = static_cast<std::size_t>(nt_) * n_space_;
  require(u_.size() == n * grid_.d, "velocity sample count does not match the grid");
  if (p_) require(p_->size() == n, "pressure sample count does not match the grid");
  if (theta_) require(theta_->size() == n, "scalar sample count does not match the grid");
  auto finite = [](const std::vector<double>& v, const char* what) {
    for (double x : v) {
      if (!std::isfinite(x)) throw NumericalError(std::string("non-finite ") + what + " sample");
    }
  };
  finite(u_, "velocity");
  if (p_) finite(*p_, "pressure");
  if (theta_) finite(*theta_, "scalar");
}

GriddedField GriddedField::sample(SpatialGrid grid, double T, int nt, const VelocityFn& ufn, const ScalarFn& pfn,
                                  const ScalarFn& thfn) {
  grid.validate();
  require(nt >= 2, "field needs nt >= 2");
  const std::size_t ns = grid.n_nodes();
  std::vector<double> u(static_cast<std::size_t>(nt) * ns * grid.d);
  std::optional<std::vector<double>> p;
  std::optional<std::vector<double>> th;
  if (pfn) p.emplace(static_cast<std::size_t>(nt) * ns);
  if (thfn) th.emplace(static_cast<std::size_t>(nt) * ns);
  std::vector<long> idx(grid.d);
  std::vector<double> x(grid.d);
  for (int k = 0; k < nt; ++k) {
    const double t = static_cast<double>(k) * T / (nt - 1);
    for (std::size_t n = 0; n < ns; ++n) {
      grid.unflat(n, idx);
      for (int c = 0; c < grid.d; ++c) x[c] = grid.coord(idx[c]);
      const std::size_t base = k * ns + n;
      ufn(x, t, std::span<double>(u.data() + base * grid.d, grid.d));
      if (p) (*p)[base] = pfn(x, t);
      if (th) (*th)[base] = thfn(x, t);
    }
  }
  return GriddedField(grid, T, nt, std::move(u), std::move(p), std::move(th));
}

double GriddedField::max_speed() const {
  double m = 0.0;
  const std::size_t n = u_.size() / grid_.d;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int c = 0; c < grid_.d; ++c) s += u_[i * grid_.d + c] * u_[i * grid_.d + c];
    m = std::max(m, std::sqrt(s));
  }
  return m;
}

SpatialVectorField::SpatialVectorField(SpatialGrid grid, std::vector<double> v) : grid_(grid), v_(std::move(v)) {
  grid_.validate();
  require(v_.size() == grid_.n_nodes() * grid_.d, "vector field sample count does not match the grid");
  for (double x : v_) {
    if (!std::isfinite(x)) throw NumericalError("non-finite vector field sample");
  }
}

SpatialVectorField SpatialVectorField::sample(SpatialGrid grid, const Fn& fn) {
  grid.validate();
  const std::size_t ns = grid.n_nodes();
  std::vector<double> v(ns * grid.d);
  std::vector<long> idx(grid.d);
  std::vector<double> x(grid.d);
  for (std::size_t n = 0; n < ns; ++n) {
    grid.unflat(n, idx);
    for (int c = 0; c < grid.d; ++c) x[c] = grid.coord(idx[c]);
    fn(x, std::span<double>(v.data() + n * grid.d, grid.d));
  }
  return SpatialVectorField(grid, std::move(v));
}

namespace field_io {
namespace {

constexpr const char* kMagic = "dissdim-field v1";

std::string header_line(const GriddedField& f) {
  std::ostringstream os;
  os << kMagic << " d=" << f.d() << " nx=" << f.nx() << " nt=" << f.nt() << " a=" << detail::format_double(f.grid().a)
     << " b=" << detail::format_double(f.grid().b) << " T=" << detail::format_double(f.T()) << " components=u";
  if (f.has_pressure()) os << ",p";
  if (f.has_theta()) os << ",theta";
  return os.str();
}

struct Header {
  SpatialGrid grid;
  double T = 1.0;
  int nt = 2;
  bool p = false;
  bool theta = false;
};

double parse_real(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

int parse_count(const std::string& s, std::size_t line_no) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  }
  return v;
}

Header parse_header(const std::string& line, std::size_t line_no) {
  if (line.rfind(kMagic, 0) != 0) {
    throw ValidationError("line " + std::to_string(line_no) + ": expected '" + std::string(kMagic) + "' header");
  }
  Header h;
  h.grid.d = parse_count(detail::header_value(line, "d", line_no), line_no);
  h.grid.nx = parse_count(detail::header_value(line, "nx", line_no), line_no);
  h.nt = parse_count(detail::header_value(line, "nt", line_no), line_no);
  h.grid.a = parse_real(detail::header_value(line, "a", line_no), line_no);
  h.grid.b = parse_real(detail::header_value(line, "b", line_no), line_no);
  h.T = parse_real(detail::header_value(line, "T", line_no), line_no);
  const std::string comps = detail::header_value(line, "components", line_no);
  if (comps == "u") {
  } else if (comps == "u,p") {
    h.p = true;
  } else if (comps == "u,theta") {
    h.theta = true;
  } else if (comps == "u,p,theta") {
    h.p = h.theta = true;
  } else {
    throw ValidationError("line " + std::to_string(line_no) + ": unknown components '" + comps + "'");
  }
  try {
    h.grid.validate();
    require(h.nt >= 2, "nt must be >= 2");
    require(h.T > 0.0, "T must be positive");
  } catch (const ValidationError& e) {
    throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
  }
  return h;
}

}  // namespace

void write_binary(std::ostream& os, const GriddedField& f) {
  os << header_line(f) << "\n";
  const int d = f.d();
  for (int k = 0; k < f.nt(); ++k) {
    for (std::size_t n = 0; n < f.n_space(); ++n) {
      for (int c = 0; c < d; ++c) detail::write_f64_le(os, f.u(k, n, c));
      if (f.has_pressure()) detail::write_f64_le(os, f.p(k, n));
      if (f.has_theta()) detail::write_f64_le(os, f.theta(k, n));
    }
  }
}

void write_csv(std::ostream& os, const GriddedField& f) {
  require(f.d() == 1, "the CSV field variant is for d = 1 only");
  os << "# " << header_line(f) << "\n";
  os << "t,x,u";
  if (f.has_pressure()) os << ",p";
  if (f.has_theta()) os << ",theta";
  os << "\n";
  for (int k = 0; k < f.nt(); ++k) {
    for (std::size_t n = 0; n < f.n_space(); ++n) {
      os << detail::format_double(f.time(k)) << ',' << detail::format_double(f.grid().coord(static_cast<long>(n))) << ','
         << detail::format_double(f.u(k, n, 0));
      if (f.has_pressure()) os << ',' << detail::format_double(f.p(k, n));
      if (f.has_theta()) os << ',' << detail::format_double(f.theta(k, n));
      os << '\n';
    }
  }
}

void write_file(const std::string& path, const GriddedField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot open '" + path + "' for writing");
  const bool csv = path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
  if (csv) {
    write_csv(os, f);
  } else {
    write_binary(os, f);
  }
}

GriddedField read(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("line 1: empty field file");
  const bool csv = line.rfind("# ", 0) == 0;
  const Header h = parse_header(csv ? line.substr(2) : line, 1);
  const int d = h.grid.d;
  const std::size_t ns = h.grid.n_nodes();
  const std::size_t n = static_cast<std::size_t>(h.nt) * ns;
  std::vector<double> u(n * d);
  std::optional<std::vector<double>> p;
  std::optional<std::vector<double>> th;
  if (h.p) p.emplace(n);
  if (h.theta) th.emplace(n);

  if (!csv) {
    for (std::size_t i = 0; i < n; ++i) {
      for (int c = 0; c < d; ++c) u[i * d + c] = detail::read_f64_le(is);
      if (p) (*p)[i] = detail::read_f64_le(is);
      if (th) (*th)[i] = detail::read_f64_le(is);
    }
    return GriddedField(h.grid, h.T, h.nt, std::move(u), std::move(p), std::move(th));
  }

  require(d == 1, "line 1: the CSV field variant is for d = 1 only");
  std::size_t line_no = 2;
  if (!std::getline(is, line)) throw ValidationError("line 2: missing column header");
  const std::size_t n_cols = 3 + (h.p ? 1 : 0) + (h.theta ? 1 : 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(is, line)) {
      throw ValidationError("line " + std::to_string(line_no + 1) + ": expected " + std::to_string(n) + " rows");
    }
    ++line_no;
    std::vector<double> vals;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) vals.push_back(parse_real(cell, line_no));
    if (vals.size() != n_cols) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected " + std::to_string(n_cols) + " columns");
    }
    u[i] = vals[2];
    std::size_t col = 3;
    if (p) (*p)[i] = vals[col++];
    if (th) (*th)[i] = vals[col++];
  }
  return GriddedField(h.grid, h.T, h.nt, std::move(u), std::move(p), std::move(th));
}

GriddedField read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open '" + path + "'");
  return read(is);
}

}  // namespace field_io
}  // namespace dissdim

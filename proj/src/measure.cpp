#include "dissdim/measure.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dissdim/errors.hpp"

namespace dissdim {

Cylinder::Cylinder(SpaceTimePoint c, double delta_, double alpha_) : center(std::move(c)), delta(delta_), alpha(alpha_) {
  require(delta > 0.0 && std::isfinite(delta), "cylinder radius must be positive");
  require(alpha > 0.0 && std::isfinite(alpha), "cylinder time scaling must be positive");
}

double Cylinder::half_time() const { return std::pow(delta, alpha); }

bool Cylinder::contains(std::span<const double> x, double t) const {
  if (!(std::abs(t - center.t) < half_time())) return false;
  double r2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = x[k] - center.x[k];
    r2 += dx * dx;
  }
  return r2 < delta * delta;
}

AtomicMeasure::AtomicMeasure(int d, std::vector<double> coords, std::vector<double> times, std::vector<double> weights)
    : d_(d), coords_(std::move(coords)), times_(std::move(times)), weights_(std::move(weights)) {
  require(d_ >= 1, "measure dimension must be >= 1");
  require(times_.size() == weights_.size() && coords_.size() == weights_.size() * static_cast<std::size_t>(d_),
          "measure arrays have inconsistent lengths");
  for (double c : coords_) require(std::isfinite(c), "measure coordinates must be finite");
  for (double t : times_) require(std::isfinite(t), "measure times must be finite");
  for (double w : weights_) {
    require(std::isfinite(w) && w >= 0.0, "measure weights must be finite and non-negative");
    total_ += w;
  }
}

AtomicMeasure AtomicMeasure::from_points(int d, std::span<const SpaceTimePoint> points, std::span<const double> weights) {
  require(points.size() == weights.size(), "points and weights differ in length");
  std::vector<double> coords;
  std::vector<double> times;
  coords.reserve(points.size() * d);
  times.reserve(points.size());
  for (const auto& p : points) {
    require(p.dim() == d, "point dimension does not match the measure");
    coords.insert(coords.end(), p.x.begin(), p.x.end());
    times.push_back(p.t);
  }
  return AtomicMeasure(d, std::move(coords), std::move(times), {weights.begin(), weights.end()});
}

SpaceTimePoint AtomicMeasure::point(std::size_t i) const {
  auto xi = x(i);
  return {{xi.begin(), xi.end()}, times_[i]};
}

namespace detail {

void write_f64_le(std::ostream& os, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  char buf[8];
  for (int k = 0; k < 8; ++k) buf[k] = static_cast<char>((bits >> (8 * k)) & 0xffu);
  os.write(buf, 8);
}

double read_f64_le(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  if (is.gcount() != 8) throw ValidationError("truncated binary payload");
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(buf[k]) << (8 * k);
  return std::bit_cast<double>(bits);
}

std::string header_value(const std::string& header, const std::string& key, std::size_t line_no) {
  std::istringstream is(header);
  std::string tok;
  const std::string prefix = key + "=";
  while (is >> tok) {
    if (tok.rfind(prefix, 0) == 0) return tok.substr(prefix.size());
  }
  throw ValidationError("line " + std::to_string(line_no) + ": header is missing '" + key + "='");
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return std::to_string(v);
  return std::string(buf, ptr);
}

}  // namespace detail

namespace measure_io {
namespace {

constexpr const char* kMagic = "dissdim-measure v1";

long parse_int(const std::string& s, std::size_t line_no) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  }
  return v;
}

}  // namespace

void write(std::ostream& os, const AtomicMeasure& mu, Encoding enc) {
  os << kMagic << " d=" << mu.dim() << " n=" << mu.size() << "\n";
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (enc == Encoding::binary) {
      for (double c : mu.x(i)) detail::write_f64_le(os, c);
      detail::write_f64_le(os, mu.t(i));
      detail::write_f64_le(os, mu.weight(i));
    } else {
      for (double c : mu.x(i)) os << detail::format_double(c) << ' ';
      os << detail::format_double(mu.t(i)) << ' ' << detail::format_double(mu.weight(i)) << '\n';
    }
  }
}

void write_file(const std::string& path, const AtomicMeasure& mu, Encoding enc) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot open '" + path + "' for writing");
  write(os, mu, enc);
}

AtomicMeasure read(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw ValidationError("line 1: empty measure file");
  if (header.rfind(kMagic, 0) != 0) throw ValidationError("line 1: expected '" + std::string(kMagic) + "' header");
  const long d = parse_int(detail::header_value(header, "d", 1), 1);
  const long n = parse_int(detail::header_value(header, "n", 1), 1);
  if (d < 1) throw ValidationError("line 1: d must be >= 1");
  if (n < 0) throw ValidationError("line 1: n must be >= 0");

  const std::streampos payload_start = is.tellg();
  is.seekg(0, std::ios::end);
  const std::streampos end = is.tellg();
  is.seekg(payload_start);
  const auto payload = static_cast<long long>(end - payload_start);
  const long long record = 8LL * (d + 2);

  std::vector<double> coords;
  std::vector<double> times;
  std::vector<double> weights;
  coords.reserve(n * d);
  times.reserve(n);
  weights.reserve(n);

  if (n > 0 && payload == record * n) {
    for (long i = 0; i < n; ++i) {
      for (long k = 0; k < d; ++k) coords.push_back(detail::read_f64_le(is));
      times.push_back(detail::read_f64_le(is));
      weights.push_back(detail::read_f64_le(is));
    }
  } else {
    std::string line;
    std::size_t line_no = 1;
    long read_atoms = 0;
    while (read_atoms < n && std::getline(is, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      std::istringstream ls(line);
      std::vector<double> vals;
      std::string tok;
      while (ls >> tok) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size()) {
          throw ValidationError("line " + std::to_string(line_no) + ": bad number '" + tok + "'");
        }
        vals.push_back(v);
      }
      if (static_cast<long>(vals.size()) != d + 2) {
        throw ValidationError("line " + std::to_string(line_no) + ": expected " + std::to_string(d + 2) + " values");
      }
      const double w = vals.back();
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw ValidationError("line " + std::to_string(line_no) + ": weight must be finite and non-negative");
      }
      coords.insert(coords.end(), vals.begin(), vals.begin() + d);
      times.push_back(vals[d]);
      weights.push_back(w);
      ++read_atoms;
    }
    if (read_atoms != n) {
      throw ValidationError("line " + std::to_string(line_no + 1) + ": expected " + std::to_string(n) + " atoms, found " +
                            std::to_string(read_atoms));
    }
  }
  return AtomicMeasure(static_cast<int>(d), std::move(coords), std::move(times), std::move(weights));
}

AtomicMeasure read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open '" + path + "'");
  return read(is);
}

}  // namespace measure_io
}  // namespace dissdim

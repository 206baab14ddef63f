#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dissdim {

/// A point (x, t) in R^d x R.
struct SpaceTimePoint {
  std::vector<double> x;
  double t = 0.0;

  int dim() const { return static_cast<int>(x.size()); }
};

/// The open anisotropic cylinder B_delta(x) x (t - delta^alpha, t + delta^alpha).
struct Cylinder {
  SpaceTimePoint center;
  double delta = 1.0;
  double alpha = 1.0;

  Cylinder(SpaceTimePoint c, double delta, double alpha);

  double half_time() const;
  /// Strict inequality on both factors; boundary points are outside.
  bool contains(std::span<const double> x, double t) const;
};

/// A finite positive measure sum_i w_i delta_{(x_i, t_i)} on R^d x R.
/// Immutable after construction; storage is flat (d coordinates per atom).
class AtomicMeasure {
 public:
  AtomicMeasure(int d, std::vector<double> coords, std::vector<double> times, std::vector<double> weights);
  static AtomicMeasure from_points(int d, std::span<const SpaceTimePoint> points, std::span<const double> weights);

  int dim() const { return d_; }
  std::size_t size() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }

  std::span<const double> x(std::size_t i) const { return {coords_.data() + i * d_, static_cast<std::size_t>(d_)}; }
  double t(std::size_t i) const { return times_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  SpaceTimePoint point(std::size_t i) const;

  std::span<const double> coords() const { return coords_; }
  std::span<const double> times() const { return times_; }
  std::span<const double> weights() const { return weights_; }

  double total_mass() const { return total_; }

 private:
  int d_;
  std::vector<double> coords_;
  std::vector<double> times_;
  std::vector<double> weights_;
  double total_ = 0.0;
};

/// `dissdim-measure v1` file format.
///
///   text:   header line, then n lines "x_1 ... x_d t w"
///   binary: header line, then n records of (d + 2) little-endian float64
///
/// The reader tells the two apart by payload size. Malformed input throws
/// ValidationError whose message carries the offending line number.
namespace measure_io {

enum class Encoding { text, binary };

void write(std::ostream& os, const AtomicMeasure& mu, Encoding enc = Encoding::text);
void write_file(const std::string& path, const AtomicMeasure& mu, Encoding enc = Encoding::text);
AtomicMeasure read(std::istream& is);
AtomicMeasure read_file(const std::string& path);

}  // namespace measure_io

namespace detail {
/// Little-endian float64 helpers shared by the measure and field formats.
void write_f64_le(std::ostream& os, double v);
double read_f64_le(std::istream& is);
/// Parses "key=value" tokens of a header line after the magic words.
std::string header_value(const std::string& header, const std::string& key, std::size_t line_no);
/// Shortest round-trip decimal representation.
std::string format_double(double v);
}  // namespace detail

}  // namespace dissdim

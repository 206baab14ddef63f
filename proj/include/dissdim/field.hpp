#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dissdim {

/// Uniform tensor grid on [a, b]^d with nx nodes per axis.
struct SpatialGrid {
  int d = 1;
  double a = 0.0;
  double b = 1.0;
  int nx = 2;

  double h() const { return (b - a) / (nx - 1); }
  std::size_t n_nodes() const;
  /// Coordinate of node index i along any axis.
  double coord(long i) const { return a + static_cast<double>(i) * h(); }
  /// Lexicographic flat index, last axis fastest.
  std::size_t flat(std::span<const long> idx) const;
  void unflat(std::size_t flat, std::span<long> idx) const;
  void validate() const;
};

/// Velocity (and optionally pressure and a transported scalar) sampled on a
/// uniform space-time grid; times t_k = k * T / (nt - 1).
///
/// Layout is t-major, then x lexicographic (last axis fastest), then
/// component. Immutable after construction.
class GriddedField {
 public:
  GriddedField(SpatialGrid grid, double T, int nt, std::vector<double> u, std::optional<std::vector<double>> p = {},
               std::optional<std::vector<double>> theta = {});

  using VelocityFn = std::function<void(std::span<const double> x, double t, std::span<double> u)>;
  using ScalarFn = std::function<double(std::span<const double> x, double t)>;
  static GriddedField sample(SpatialGrid grid, double T, int nt, const VelocityFn& u, const ScalarFn& p = {},
                             const ScalarFn& theta = {});

  const SpatialGrid& grid() const { return grid_; }
  int d() const { return grid_.d; }
  int nx() const { return grid_.nx; }
  int nt() const { return nt_; }
  double T() const { return T_; }
  double h() const { return grid_.h(); }
  double dt() const { return T_ / (nt_ - 1); }
  double time(int k) const { return static_cast<double>(k) * dt(); }
  std::size_t n_space() const { return n_space_; }

  bool has_pressure() const { return p_.has_value(); }
  bool has_theta() const { return theta_.has_value(); }

  double u(int k, std::size_t node, int comp) const { return u_[(k * n_space_ + node) * grid_.d + comp]; }
  double p(int k, std::size_t node) const { return (*p_)[k * n_space_ + node]; }
  double theta(int k, std::size_t node) const { return (*theta_)[k * n_space_ + node]; }

  std::span<const double> u_data() const { return u_; }
  const std::optional<std::vector<double>>& p_data() const { return p_; }
  const std::optional<std::vector<double>>& theta_data() const { return theta_; }

  /// Maximum of |u| over all samples.
  double max_speed() const;

  std::optional<double> alpha_hint;

 private:
  SpatialGrid grid_;
  double T_;
  int nt_;
  std::size_t n_space_;
  std::vector<double> u_;
  std::optional<std::vector<double>> p_;
  std::optional<std::vector<double>> theta_;
};

/// `dissdim-field v1` format: one header line
///   dissdim-field v1 d=<int> nx=<int> nt=<int> a=<f> b=<f> T=<f> components=u[,p][,theta]
/// followed by little-endian float64 samples. The d = 1 CSV variant starts
/// with "# <header>", then "t,x,u[,p][,theta]", then one row per sample.
namespace field_io {

void write_binary(std::ostream& os, const GriddedField& f);
void write_csv(std::ostream& os, const GriddedField& f);
void write_file(const std::string& path, const GriddedField& f);
GriddedField read(std::istream& is);
GriddedField read_file(const std::string& path);

}  // namespace field_io

/// A time-independent vector field V : R^d -> R^d sampled on a SpatialGrid.
class SpatialVectorField {
 public:
  SpatialVectorField(SpatialGrid grid, std::vector<double> v);

  using Fn = std::function<void(std::span<const double> x, std::span<double> v)>;
  static SpatialVectorField sample(SpatialGrid grid, const Fn& fn);

  const SpatialGrid& grid() const { return grid_; }
  int d() const { return grid_.d; }
  double v(std::size_t node, int comp) const { return v_[node * grid_.d + comp]; }

 private:
  SpatialGrid grid_;
  std::vector<double> v_;
};

}  // namespace dissdim

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "dissdim/field.hpp"
#include "dissdim/measure.hpp"

/// Analytic and semi-analytic fixtures: the power-law divergence field, exact
/// Burgers Riemann solutions with their entropy-production measures, and an
/// explicit viscous Burgers solver.
namespace dissdim::fixtures {

/// Surface measure of the unit sphere in R^d: 2 pi^{d/2} / Gamma(d/2).
double sphere_area(int d);

/// V(x) = x |x|^{eps - d}, div V = eps |x|^{eps - d}, so that the divergence
/// mass of B_delta(0) is c_d delta^eps.
struct PowerLawField {
  int d = 2;
  double eps = 0.5;

  PowerLawField(int d, double eps);

  void value(std::span<const double> x, std::span<double> v) const;
  double divergence(std::span<const double> x) const;
  double c_d() const { return sphere_area(d); }
};

/// Radial quadrature of the divergence over B_delta(0): adaptive Simpson on
/// dyadic shells, closed-form antiderivative rho^eps on the innermost ball.
double power_law_ball_mass(const PowerLawField& field, double delta);

/// Atoms carrying the divergence mass at t = 0: an origin atom of mass
/// c_d r_min^eps, then geometric shells between r_min and r_max with their
/// exact mass split evenly over `directions` atoms placed at the shell's
/// geometric mid-radius.
AtomicMeasure power_law_measure(const PowerLawField& field, double r_min, double r_max, int shells, int directions);

SpatialVectorField sample_power_law(const PowerLawField& field, const SpatialGrid& grid);

struct RiemannDatum {
  double u_l = 1.0;
  double u_r = -1.0;
  double x0 = 0.0;

  bool is_shock() const { return u_l > u_r; }
  /// Rankine-Hugoniot speed (u_l + u_r) / 2.
  double shock_speed() const { return 0.5 * (u_l + u_r); }
  /// Entropy production per unit time of the shock, (u_l - u_r)^3 / 12;
  /// zero for a rarefaction.
  double entropy_rate() const;
  /// Rejects u_l == u_r and non-finite states.
  void validate() const;
};

/// Pointwise entropy solution of u_t + (u^2/2)_x = 0.
double burgers_exact(const RiemannDatum& datum, double x, double t);
/// Exact average of the entropy solution over [lo, hi] at time t.
double burgers_cell_average(const RiemannDatum& datum, double lo, double hi, double t);

struct GridSpec {
  double a = -1.0;
  double b = 1.0;
  int nx = 401;
  double T = 1.0;
  int nt = 201;
};

/// Samples the entropy solution as exact averages over the dual cells
/// [x_i - h/2, x_i + h/2] (clipped to [a, b]).
GriddedField burgers_entropy_solution(const RiemannDatum& datum, const GridSpec& grid);

struct ShockMeasure {
  AtomicMeasure measure;
  /// Set for rarefaction data: no entropy is produced and the measure is empty.
  bool rarefaction = false;
};

/// n_atoms atoms at the interval midpoints t_k = (k + 1/2) T / n on the
/// shock path, each of weight entropy_rate * T / n.
ShockMeasure burgers_dissipation_measure(const RiemannDatum& datum, double T, int n_atoms);

enum class Boundary { dirichlet_states, periodic };

struct ViscousConfig {
  double a = -1.0;
  double b = 1.0;
  /// Cell width; 0 selects nu / 20.
  double h = 0.0;
  double T = 1.0;
  int n_frames = 101;
  Boundary boundary = Boundary::dirichlet_states;
  /// dt = cfl / (max|u| / h + 2 nu / h^2).
  double cfl = 0.9;
  /// Initial data; defaults to the Riemann step at datum.x0.
  std::function<double(double)> initial;
};

struct ViscousRun {
  double nu = 0.0;
  ViscousConfig config;
  double h = 0.0;
  double dt = 0.0;
  long steps = 0;
  /// dt / min(h / max|u|, h^2 / (2 nu)); at most 0.9.
  double stability_margin = 0.0;
  GriddedField field;
  /// Atoms at (x_i, frame mid-time) carrying nu |u_x|^2 h dt summed over the
  /// substeps of each frame interval.
  AtomicMeasure dissipation;
  double total_dissipation = 0.0;
  double energy_initial = 0.0;
  double energy_final = 0.0;
};

/// Local Lax-Friedrichs flux for u^2/2 plus a centred second difference for
/// nu u_xx, explicit Euler in time. Dirichlet runs pin the end nodes to u_l
/// and u_r; periodic runs store the duplicate node x = b.
ViscousRun viscous_burgers_run(const RiemannDatum& datum, double nu, const ViscousConfig& config);

/// Removes the O(nu) term: 2 D(nu) - D(2 nu).
double richardson_limit(double d_nu, double d_2nu);

/// n_atoms evenly spread atoms on [0,1]^d x {1/2} (a low-discrepancy
/// additive recurrence with a seeded start), total mass 1.
AtomicMeasure time_singular_measure_fixture(int d, int n_atoms, std::uint64_t seed = 1);

/// n^(d+1) lattice atoms at cell centres of [0,1]^d x [0,1], total mass 1.
AtomicMeasure uniform_grid_measure(int d, int n_per_axis);

/// A single atom of the given weight.
AtomicMeasure dirac_measure(const SpaceTimePoint& at, double weight = 1.0);

}  // namespace dissdim::fixtures

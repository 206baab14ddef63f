#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dissdim/measure.hpp"

/// Anisotropic space-time measure estimators: cylinder masses, lattice box
/// counting with temporal side delta^alpha, sup-density ladders and the
/// "bounded density at exponent s => dimension >= s" certification.
///
/// Box counting stands in for the Hausdorff dimension; finite point sets
/// cannot tell the two apart, so every estimate carries a fit residual.
namespace dissdim::aniso {

/// Sum of weights of the atoms strictly inside `c`.
double cylinder_mass(const AtomicMeasure& mu, const Cylinder& c);

/// Geometric ladder delta_max, delta_max * ratio, ... (count entries).
std::vector<double> geometric_scales(double delta_max, double ratio, std::size_t count);

struct BoxCount {
  std::vector<double> scales;
  std::vector<std::size_t> counts;
  /// Least-squares slope of log N_delta against log(1/delta).
  double dim_estimate = 0.0;
  double fit_residual = 0.0;
};

/// Counts occupied cells of the origin-anchored lattice with spatial side
/// delta and temporal side delta^alpha. Scales must be strictly decreasing,
/// at least three of them.
BoxCount box_counting_dimension(const AtomicMeasure& points, double alpha, std::span<const double> scales);
BoxCount box_counting_dimension(std::span<const SpaceTimePoint> points, double alpha, std::span<const double> scales);

/// Which atoms serve as cylinder centres in a density ladder.
struct CenterPolicy {
  enum class Kind { support, top_k, stride, explicit_points };
  Kind kind = Kind::support;
  /// top_k: number of heaviest atoms; stride: at most this many support atoms,
  /// taken at an even stride in storage order.
  std::size_t count = 0;
  std::vector<SpaceTimePoint> points;
  /// Atoms lighter than weight_floor * total mass are not support.
  double weight_floor = 1e-12;

  static CenterPolicy support_atoms() { return {}; }
  static CenterPolicy heaviest(std::size_t k) { return {Kind::top_k, k, {}, 1e-12}; }
  static CenterPolicy strided(std::size_t max_centers) { return {Kind::stride, max_centers, {}, 1e-12}; }
  static CenterPolicy explicit_list(std::vector<SpaceTimePoint> pts) { return {Kind::explicit_points, 0, std::move(pts), 1e-12}; }
};

struct DensityLadder {
  double alpha = 1.0;
  double s = 0.0;
  std::vector<double> scales;
  /// sup over centres of mu(C^alpha_delta).
  std::vector<double> sup_mass;
  /// sup_mass / delta^s.
  std::vector<double> densities;
  /// Slope of log sup_mass against log delta over the positive scales.
  double fitted_slope = 0.0;
  double fit_residual = 0.0;
  std::size_t positive_scales = 0;
  /// Densities never grow by more than `nonincreasing_tolerance` from one
  /// scale to the next finer one.
  bool non_increasing = true;
  double nonincreasing_tolerance = 1.05;
  std::size_t n_centers = 0;
  int d = 1;
};

DensityLadder density_ladder(const AtomicMeasure& mu, double alpha, double s, std::span<const double> scales,
                             const CenterPolicy& centers = CenterPolicy::support_atoms());

enum class Verdict { certified, inconclusive };
std::string to_string(Verdict v);

struct Certification {
  double certified_s = 0.0;
  Verdict verdict = Verdict::inconclusive;
  /// C = 2 x the coarsest-scale density at the certified exponent.
  double constant = 0.0;
};

/// Scans s' over [0, d + 1] in steps of `step` and returns the largest s'
/// whose densities stay below twice the coarsest one at every scale and
/// whose fitted log-density does not increase towards small delta.
Certification certify_lower_bound(const DensityLadder& ladder, double step = 0.005);

/// Upper estimate of the delta_cap-premeasure H^s_{alpha, delta <= cap}. The
/// candidate cylinders are lattice cells (spatial side 2 delta / sqrt(d),
/// temporal side 2 delta^alpha) inscribed in C^alpha_delta; the greedy always
/// prefers the largest admissible cylinder, so the cover ends up made of
/// cap-scale cells ordered by how many uncovered points they hold.
double covering_premeasure(const AtomicMeasure& points, double alpha, double s, double delta_cap);
double covering_premeasure(std::span<const SpaceTimePoint> points, double alpha, double s, double delta_cap);

struct AlphaMonotonicity {
  std::vector<double> alphas;
  std::vector<double> estimates;
  std::vector<double> residuals;
  bool violation = false;
  double tolerance = 0.15;
};

/// Box-dimension estimates per alpha; flags a decrease larger than the fit
/// tolerance between consecutive (increasing) alphas.
AlphaMonotonicity alpha_monotonicity_check(const AtomicMeasure& points, std::span<const double> alphas,
                                           std::span<const double> scales);

/// `delta,count_or_density,fit_slope,residual` rows.
void write_csv(std::ostream& os, const BoxCount& bc);
void write_csv(std::ostream& os, const DensityLadder& ladder);

}  // namespace dissdim::aniso

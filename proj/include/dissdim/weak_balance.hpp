#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dissdim/cutoff.hpp"
#include "dissdim/extended_real.hpp"
#include "dissdim/exponents.hpp"
#include "dissdim/field.hpp"

/// Weak-form energy and entropy balances on gridded fields.
///
/// Everything is a midpoint rule over grid cells: the field is interpolated
/// multilinearly to the cell centre, nonlinear densities are evaluated from
/// the interpolated state, and test-function derivatives are exact. Local
/// Lebesgue norms use the same cells and weights, so discrete Hölder bounds
/// hold exactly rather than up to quadrature error.
namespace dissdim::weak {

using exponents::Term;

/// Local state handed to an entropy pair.
struct State {
  std::span<const double> u;
  double p = 0.0;
  double theta = 0.0;
};

/// Companion density eta[u] and flux Q[u] conserved by smooth solutions.
struct EntropyPair {
  std::string label;
  std::function<double(const State&)> eta;
  std::function<void(const State&, std::span<double> q)> flux;
  bool needs_theta = false;

  /// eta = u^2/2, Q = u^3/3 (d = 1).
  static EntropyPair burgers();
  /// eta = |u|^2/2, Q = |u|^2/2 u (the pressure flux is handled separately).
  static EntropyPair kinetic_energy();
  /// eta = theta^2/2, Q = u theta^2/2.
  static EntropyPair transported_scalar();
};

/// The four weak integrals of a density/flux pair against phi:
///   time     = int eta dphi/dt
///   flux     = int Q . grad phi
///   pressure = int p u . grad phi          (kinetic energy mode only)
///   viscous  = nu int eta lap phi
/// plus the positive viscous pairing nu int |grad u|^2 phi.
struct WeakIntegrals {
  double time = 0.0;
  double flux = 0.0;
  double pressure = 0.0;
  double viscous = 0.0;
  double dissipation = 0.0;
  /// int of the absolute integrands; sets the scale for nullity tolerances.
  double abs_scale = 0.0;
  std::size_t cells = 0;

  double total() const { return time + flux + pressure + viscous; }
};

struct QuadratureOptions {
  /// Include the pressure work term (needs p).
  bool pressure = false;
  double nu = 0.0;
  /// Allow the test function to be nonzero up to t = T.
  bool allow_terminal = false;
  /// Allow the test function to reach the spatial boundary.
  bool allow_spatial_boundary = false;
};

/// Cell-midpoint quadrature of the weak integrals. Checks the 2-cell margin
/// between the support of phi and the grid boundary.
WeakIntegrals weak_integrals(const GriddedField& field, const EntropyPair& pair, const TestFunction& phi,
                             const QuadratureOptions& opts = {});

/// int int (eta[u] d_t phi + Q[u] . grad phi): equals <D, phi> for the
/// dissipation measure D = -div_{t,x}(eta, Q).
double entropy_production(const GriddedField& field, const EntropyPair& pair, const TestFunction& phi);

struct LocalNorms {
  ExtendedReal q;
  ExtendedReal r;
  /// ||u||_{L^q_t L^r_x(C_{2 delta})}
  double u = 0.0;
  /// ||p||_{L^{q/2}_t L^{r/2}_x(C_{2 delta})}
  double p = 0.0;
  /// Quadrature measure of the spatial ball and of the time interval.
  double space_measure = 0.0;
  double time_measure = 0.0;
};

struct BalanceReport {
  std::string mode;
  SpaceTimePoint center;
  double delta = 0.0;
  double alpha = 1.0;
  double nu = 0.0;
  std::string profile;
  /// I, II, III and optionally IV.
  std::vector<Term> terms;
  double weak_mass = 0.0;
  double abs_scale = 0.0;
  std::optional<double> holder_bound;
  std::vector<Term> bound_terms;
  std::optional<LocalNorms> local_norms;
  /// C_chi, C_eta and (viscous mode) C_lap.
  std::vector<Term> constants;
  /// nu int |grad u|^2 chi eta
  std::optional<double> viscous_pairing;
  /// nu int over C_delta of |grad u|^2
  std::optional<double> morrey;
};

/// I + II + III for the kinetic energy with pressure; requires p.
BalanceReport euler_weak_mass(const GriddedField& field, const CutoffPair& cutoff);
/// I + II for an entropy pair (no pressure term).
BalanceReport euler_weak_mass(const GriddedField& field, const CutoffPair& cutoff, const EntropyPair& pair);

/// I + II + III + IV with viscosity nu, plus the viscous pairing and the
/// direct int_C nu |grad u|^2. With `pair` the density/flux are replaced and
/// the pressure term dropped.
BalanceReport ns_weak_mass(const GriddedField& field, const CutoffPair& cutoff, double nu,
                           const EntropyPair* pair = nullptr);

/// Weak mass plus the explicit Hölder bound with the realized cutoff
/// constants:
///   |I|   <= C_eta/delta^a  1/2 ||u||^2         |B|^{1-2/r} |J|^{1-2/q}
///   |II|  <= C_chi/delta    1/2 ||u||^3         |B|^{1-3/r} |J|^{1-3/q}
///   |III| <= C_chi/delta    ||p|| ||u||         |B|^{1-3/r} |J|^{1-3/q}
///   |IV|  <= nu C_lap/delta^2 1/2 ||u||^2       |B|^{1-2/r} |J|^{1-2/q}
/// where B, J are the quadrature ball and interval of C_{2 delta}. Throws
/// NumericalError if the weak mass exceeds the bound. Without pressure p is
/// taken as zero; an entropy pair's |Q| must not exceed |u|^3/2.
BalanceReport holder_cylinder_bound(const GriddedField& field, const CutoffPair& cutoff, ExtendedReal q, ExtendedReal r,
                                    const EntropyPair* pair = nullptr, double nu = 0.0);

struct BoundaryBalance {
  /// Weak integrals with phi allowed to be nonzero at t = T.
  double interior = 0.0;
  /// int eta(u(., T)) phi(., T) dx
  double terminal = 0.0;
  /// nu int |grad u|^2 phi (zero for nu = 0).
  double viscous_pairing = 0.0;
  /// |interior - viscous_pairing - terminal| / |terminal|
  double relative_residual = 0.0;
};

/// Requires phi to vanish near t = 0. For nu > 0 the interior includes the
/// viscous term nu int eta lap phi.
BoundaryBalance boundary_extended_mass(const GriddedField& field, const TestFunction& phi, const EntropyPair& pair,
                                       double nu = 0.0, bool allow_spatial_boundary = false);

struct Ball {
  std::vector<double> center;
  double radius = 0.0;
};

struct SignedSupportResult {
  double bound_I = 0.0;
  double bound_II = 0.0;
  double pairing = 0.0;
  double threshold = 0.0;
  std::size_t flagged_cells = 0;
  /// ||V||_{L^r} over the cells where grad chi != 0.
  double v_norm_on_collar = 0.0;
};

/// chi = max_i chi_i over the covering bumps (1 on B_{r_i}, 0 off B_{2 r_i}).
/// I = |int V . grad phi chi|, II = |int V . grad chi phi|,
/// pairing = |int V . grad(chi phi)| <= I + II. Every cell whose centred
/// divergence exceeds the threshold (default 1e-8 x max) must have its centre
/// inside some ball.
SignedSupportResult signed_support_bound(const SpatialVectorField& V, std::span<const Ball> covering,
                                         const RadialPlateau& phi, ExtendedReal r,
                                         std::optional<double> threshold = std::nullopt);

}  // namespace dissdim::weak

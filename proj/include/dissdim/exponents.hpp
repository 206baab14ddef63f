#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dissdim/extended_real.hpp"

/// Closed-form dimension exponents for dissipation measures.
///
/// Every function here is pure. Infinite integrability exponents are handled
/// by explicit branches that reproduce the conventions attached to each
/// theorem (they differ between the Euler, Navier-Stokes and conservation-law
/// statements, so IEEE propagation is never relied on).
namespace dissdim::exponents {

enum class Regime { euler, conservation_law, navier_stokes };

std::string to_string(Regime r);

/// Integrability class L^q_t L^r_x in d space dimensions. In conservation-law
/// mode only `r` (a single space-time exponent) is meaningful.
struct IntegrabilityClass {
  int d = 3;
  ExtendedReal q = ExtendedReal::infinity();
  ExtendedReal r = ExtendedReal::infinity();
};

/// Rejects d < 1 and q, r < 3.
void validate_fluid_class(const IntegrabilityClass& cls);

struct Term {
  std::string label;
  double value = 0.0;
};

struct ExponentReport {
  Regime regime = Regime::euler;
  int d = 0;
  ExtendedReal q;
  ExtendedReal r;
  double alpha = 1.0;
  double s = 0.0;
  std::vector<Term> terms;
  /// Which r = inf / q = inf branch fired: "finite", "r_inf", "q_inf",
  /// "r_q_inf", or a case tag for the numerology helpers.
  std::string convention_applied = "finite";
  /// s < 0: the statement is empty for these parameters.
  bool vacuous = false;
  /// Absolute continuity holds only with respect to H^{s-gamma} for every gamma > 0.
  bool open_exponent = false;
  /// Endpoint (Besov) case obtained as a limit of the L^r family.
  bool endpoint_limit = false;
  /// Navier-Stokes only: d + 1 - 3(d/r + 2/q), populated when alpha = 2 and
  /// 2/q + d/r >= 1 (the range where it equals the three-term minimum).
  std::optional<double> closed_form_s;
};

/// Two-term minimum for incompressible Euler at a free time scaling alpha.
ExponentReport euler_exponent(const IntegrabilityClass& cls, double alpha);

/// Euler exponent at the time scaling that balances the two terms. Throws
/// NumericalError if the balanced terms disagree beyond 1e-12 relative.
ExponentReport euler_optimal(const IntegrabilityClass& cls);

/// Euler with r = inf and no pressure integrability: (d - 2/(q-1), q/(q-1))
/// with `open_exponent` set.
ExponentReport euler_unbounded_pressure(const IntegrabilityClass& cls);

/// Isotropic exponent d + 1 - r/(r-1) for entropy solutions of a general
/// conservation law with eta, Q in L^r.
ExponentReport conservation_law_exponent(int d, ExtendedReal r);

/// Three-term minimum for suitable Leray-Hopf solutions (the third term comes
/// from the viscous Laplacian).
ExponentReport navier_stokes_exponent(const IntegrabilityClass& cls, double alpha);

enum class NumerologyCase { uniform_in_time_Lr, besov_13, sobolev_beta };

NumerologyCase parse_case(const std::string& tag);
std::string to_string(NumerologyCase c);

/// Exponents for three physically relevant integrability classes.
///  - uniform_in_time_Lr: u in L^inf_t L^r_x, param = r.
///  - besov_13: u in L^inf_t B^{1/3}_{3,inf}; param ignored, returns the
///    uniform_in_time_Lr formula at r = 3d/(d-1) with `endpoint_limit`.
///  - sobolev_beta: u in L^inf_t H^beta, param = beta in [d/6, 5/6) with
///    beta < d/2 and d < 5; the endpoint beta = d/6 is r = 3.
ExponentReport case_numerology(int d, NumerologyCase c, double param);

/// r = 3d/(d-1), infinite for d = 1.
ExtendedReal optimal_uniform_r(int d);

/// d(l-1)/l + alpha(m-1)/m >= s: a force with f.u in L^m_t L^l_x leaves the
/// dimension conclusions unchanged.
bool forcing_admissible(int d, double alpha, double s, ExtendedReal m, ExtendedReal l);

}  // namespace dissdim::exponents

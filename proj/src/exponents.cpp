#include "dissdim/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dissdim/errors.hpp"

namespace dissdim::exponents {
namespace {

constexpr double kBalanceTol = 1e-12;

std::string convention_tag(const IntegrabilityClass& cls) {
  const bool qi = cls.q.is_infinite();
  const bool ri = cls.r.is_infinite();
  if (qi && ri) return "r_q_inf";
  if (ri) return "r_inf";
  if (qi) return "q_inf";
  return "finite";
}

void validate_alpha(double alpha) {
  require(std::isfinite(alpha) && alpha > 0.0, "time scaling alpha must be positive");
}

double min_of(const std::vector<Term>& terms) {
  double s = terms.front().value;
  for (const auto& t : terms) s = std::min(s, t.value);
  return s;
}

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= kBalanceTol * std::max({std::abs(a), std::abs(b), 1e-300}) + 1e-15;
}

ExponentReport finish(ExponentReport rep) {
  rep.s = min_of(rep.terms);
  rep.vacuous = rep.s < 0.0;
  return rep;
}

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::euler: return "euler";
    case Regime::conservation_law: return "conservation_law";
    case Regime::navier_stokes: return "navier_stokes";
  }
  return "unknown";
}

void validate_fluid_class(const IntegrabilityClass& cls) {
  require(cls.d >= 1, "spatial dimension d must be >= 1");
  require(cls.q >= 3.0, "time exponent q must be >= 3");
  require(cls.r >= 3.0, "space exponent r must be >= 3");
}

ExponentReport euler_exponent(const IntegrabilityClass& cls, double alpha) {
  validate_fluid_class(cls);
  validate_alpha(alpha);
  const double d = cls.d;
  ExponentReport rep;
  rep.regime = Regime::euler;
  rep.d = cls.d;
  rep.q = cls.q;
  rep.r = cls.r;
  rep.alpha = alpha;
  rep.convention_applied = convention_tag(cls);

  double t1 = 0.0;
  double t2 = 0.0;
  if (cls.q.is_infinite() && cls.r.is_infinite()) {
    t1 = d;
    t2 = d - 1.0 + alpha;
  } else if (cls.r.is_infinite()) {
    const double q = cls.q.value();
    t1 = d - alpha * 2.0 / q;
    t2 = d - 1.0 + alpha * (q - 3.0) / q;
  } else if (cls.q.is_infinite()) {
    const double r = cls.r.value();
    t1 = d * (r - 2.0) / r;
    t2 = d * (r - 3.0) / r - 1.0 + alpha;
  } else {
    const double q = cls.q.value();
    const double r = cls.r.value();
    t1 = d * (r - 2.0) / r - alpha * 2.0 / q;
    t2 = d * (r - 3.0) / r - 1.0 + alpha * (q - 3.0) / q;
  }
  rep.terms = {{"time_derivative", t1}, {"flux", t2}};
  return finish(std::move(rep));
}

ExponentReport euler_optimal(const IntegrabilityClass& cls) {
  validate_fluid_class(cls);
  const double d = cls.d;
  double alpha = 1.0;
  double s = d;
  if (cls.q.is_infinite() && cls.r.is_infinite()) {
    alpha = 1.0;
    s = d;
  } else if (cls.r.is_infinite()) {
    const double q = cls.q.value();
    alpha = q / (q - 1.0);
    s = d - 2.0 / (q - 1.0);
  } else if (cls.q.is_infinite()) {
    const double r = cls.r.value();
    alpha = (r + d) / r;
    s = d * (r - 2.0) / r;
  } else {
    const double q = cls.q.value();
    const double r = cls.r.value();
    alpha = q / (q - 1.0) * (r + d) / r;
    s = d * (r - 2.0) / r - 2.0 / (q - 1.0) * (r + d) / r;
  }
  ExponentReport rep = euler_exponent(cls, alpha);
  const double a = rep.terms[0].value;
  const double b = rep.terms[1].value;
  if (!nearly_equal(a, b) || !nearly_equal(rep.s, s)) {
    throw NumericalError("euler_optimal: min-terms do not balance at the optimal alpha");
  }
  rep.s = s;
  rep.vacuous = s < 0.0;
  return rep;
}

ExponentReport euler_unbounded_pressure(const IntegrabilityClass& cls) {
  validate_fluid_class(cls);
  require(cls.r.is_infinite(), "unbounded-pressure exponent requires r = inf");
  ExponentReport rep;
  if (cls.q.is_infinite()) {
    rep = euler_exponent(cls, 1.0);
    rep.s = cls.d;
  } else {
    const double q = cls.q.value();
    const double alpha = q / (q - 1.0);
    rep = euler_exponent(cls, alpha);
    rep.s = cls.d - 2.0 / (q - 1.0);
  }
  rep.vacuous = rep.s < 0.0;
  rep.open_exponent = true;
  return rep;
}

ExponentReport conservation_law_exponent(int d, ExtendedReal r) {
  require(d >= 1, "spatial dimension d must be >= 1");
  const double rmin = static_cast<double>(d + 1) / d;
  require(r >= rmin, "conservation-law exponent requires r >= (d+1)/d");
  ExponentReport rep;
  rep.regime = Regime::conservation_law;
  rep.d = d;
  rep.q = r;
  rep.r = r;
  rep.alpha = 1.0;
  if (r.is_infinite()) {
    rep.convention_applied = "r_inf";
    rep.terms = {{"isotropic", static_cast<double>(d)}};
  } else {
    const double rv = r.value();
    rep.convention_applied = "finite";
    rep.terms = {{"isotropic", d + 1.0 - rv / (rv - 1.0)}};
  }
  return finish(std::move(rep));
}

ExponentReport navier_stokes_exponent(const IntegrabilityClass& cls, double alpha) {
  validate_fluid_class(cls);
  validate_alpha(alpha);
  const double d = cls.d;
  ExponentReport rep;
  rep.regime = Regime::navier_stokes;
  rep.d = cls.d;
  rep.q = cls.q;
  rep.r = cls.r;
  rep.alpha = alpha;
  rep.convention_applied = convention_tag(cls);

  if (cls.q.is_infinite() && cls.r.is_infinite()) {
    rep.terms = {{"time_derivative", d}, {"laplacian", d - 2.0 + alpha}};
  } else if (cls.r.is_infinite()) {
    const double q = cls.q.value();
    rep.terms = {{"time_derivative", d - alpha * 2.0 / q},
                 {"flux", d - 1.0 + alpha * (q - 3.0) / q},
                 {"laplacian", d - 2.0 + alpha * (q - 2.0) / q}};
  } else if (cls.q.is_infinite()) {
    const double r = cls.r.value();
    rep.terms = {{"time_derivative", d * (r - 2.0) / r},
                 {"flux", -1.0 + d * (r - 3.0) / r + alpha},
                 {"laplacian", -2.0 + d * (r - 2.0) / r + alpha}};
  } else {
    const double q = cls.q.value();
    const double r = cls.r.value();
    rep.terms = {{"time_derivative", d * (r - 2.0) / r - alpha * 2.0 / q},
                 {"flux", -1.0 + d * (r - 3.0) / r + alpha * (q - 3.0) / q},
                 {"laplacian", -2.0 + d * (r - 2.0) / r + alpha * (q - 2.0) / q}};
  }
  rep = finish(std::move(rep));

  const double scaling = cls.r.reciprocal_times(d) + cls.q.reciprocal_times(2.0);
  if (alpha == 2.0 && scaling >= 1.0) rep.closed_form_s = d + 1.0 - 3.0 * scaling;
  return rep;
}

NumerologyCase parse_case(const std::string& tag) {
  if (tag == "uniform_in_time_Lr") return NumerologyCase::uniform_in_time_Lr;
  if (tag == "besov_13") return NumerologyCase::besov_13;
  if (tag == "sobolev_beta") return NumerologyCase::sobolev_beta;
  throw ValidationError("unknown numerology case '" + tag + "'");
}

std::string to_string(NumerologyCase c) {
  switch (c) {
    case NumerologyCase::uniform_in_time_Lr: return "uniform_in_time_Lr";
    case NumerologyCase::besov_13: return "besov_13";
    case NumerologyCase::sobolev_beta: return "sobolev_beta";
  }
  return "unknown";
}

ExtendedReal optimal_uniform_r(int d) {
  require(d >= 1, "spatial dimension d must be >= 1");
  if (d == 1) return ExtendedReal::infinity();
  return ExtendedReal(3.0 * d / (d - 1.0));
}

ExponentReport case_numerology(int d, NumerologyCase c, double param) {
  require(d >= 1, "spatial dimension d must be >= 1");
  switch (c) {
    case NumerologyCase::uniform_in_time_Lr: {
      const ExtendedReal r = std::isinf(param) ? ExtendedReal::infinity() : ExtendedReal(param);
      auto rep = euler_optimal({d, ExtendedReal::infinity(), r});
      rep.convention_applied = to_string(c);
      return rep;
    }
    case NumerologyCase::besov_13: {
      auto rep = euler_optimal({d, ExtendedReal::infinity(), optimal_uniform_r(d)});
      // (2+d)/3 for both, exactly.
      rep.alpha = (2.0 + d) / 3.0;
      rep.s = (2.0 + d) / 3.0;
      rep.convention_applied = to_string(c);
      rep.endpoint_limit = true;
      return rep;
    }
    case NumerologyCase::sobolev_beta: {
      require(d < 5, "sobolev_beta numerology is non-trivial only for d < 5");
      const double beta = param;
      require(beta >= d / 6.0 && beta < 5.0 / 6.0, "sobolev_beta requires beta in [d/6, 5/6)");
      require(beta < d / 2.0, "sobolev_beta requires beta < d/2 for the embedding into L^r");
      // Sobolev embedding H^beta in L^r with r = 2d / (d - 2 beta) >= 3; both terms equal 2 beta.
      const double alpha = 1.0 + (d - 2.0 * beta) / 2.0;
      auto rep = euler_exponent({d, ExtendedReal::infinity(), ExtendedReal(std::max(3.0, 2.0 * d / (d - 2.0 * beta)))}, alpha);
      rep.alpha = alpha;
      rep.s = 2.0 * beta;
      rep.vacuous = false;
      rep.convention_applied = to_string(c);
      return rep;
    }
  }
  throw ValidationError("unknown numerology case");
}

bool forcing_admissible(int d, double alpha, double s, ExtendedReal m, ExtendedReal l) {
  require(m >= 1.0 && l >= 1.0, "forcing exponents m, l must be >= 1");
  const double lhs = d * l.fraction_minus(1.0) + alpha * m.fraction_minus(1.0);
  return lhs >= s - 1e-12 * std::max(1.0, std::abs(s));
}

}  // namespace dissdim::exponents

#pragma once

#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dissdim/field.hpp"
#include "dissdim/measure.hpp"

namespace dissdim {

/// Smooth step S with S = 1 on s <= 0 and S = 0 on s >= 1.
///   cubic:      S(s) = 1 - 3 s^2 + 2 s^3
///   mollified:  S(s) = 1 / (1 + exp(1/(1-s) - 1/s))  (C-infinity)
/// Both satisfy S(s) + S(1 - s) = 1, so they integrate to 1/2 on [0, 1].
class StepProfile {
 public:
  enum class Kind { cubic, mollified };

  StepProfile() : StepProfile(Kind::cubic) {}
  explicit StepProfile(Kind kind);

  Kind kind() const { return kind_; }
  std::string name() const;

  double value(double s) const;
  double d1(double s) const;
  double d2(double s) const;

  /// Realized sup |S'|, sup |S''| and sup |S'(s)| / (1 + s) on [0, 1].
  double max_d1() const { return max_d1_; }
  double max_d2() const { return max_d2_; }
  double max_d1_over_1ps() const { return max_d1_ratio_; }

 private:
  Kind kind_;
  double max_d1_ = 0.0;
  double max_d2_ = 0.0;
  double max_d1_ratio_ = 0.0;
};

/// Everything a weak-form quadrature needs from a test function at one point.
struct Jet {
  double value = 0.0;
  double dt = 0.0;
  std::vector<double> grad;
  double lap = 0.0;
};

/// Axis-aligned box outside which a test function vanishes identically.
struct SupportBox {
  std::vector<double> lo;
  std::vector<double> hi;
  double t_lo = 0.0;
  double t_hi = 0.0;
};

class TestFunction {
 public:
  virtual ~TestFunction() = default;
  virtual int dim() const = 0;
  /// Fills value, exact (or centred-difference) derivatives and Laplacian.
  virtual void jet(std::span<const double> x, double t, Jet& out) const = 0;
  virtual SupportBox support() const = 0;
};

/// Radial plateau: 1 on |y - c| <= inner, 0 on |y - c| >= outer.
struct RadialPlateau {
  std::vector<double> center;
  double inner = 1.0;
  double outer = 2.0;
  StepProfile profile;

  RadialPlateau(std::vector<double> center, double inner, double outer, StepProfile profile = StepProfile());

  int dim() const { return static_cast<int>(center.size()); }
  double value(std::span<const double> y) const;
  /// Writes the gradient into `g` and returns the Laplacian.
  double derivatives(std::span<const double> y, std::span<double> g) const;
};

/// 1 on [lo, hi], stepping down to 0 over [lo - ramp_lo, lo] and
/// [hi, hi + ramp_hi]. With `open_top` the window stays 1 for all t >= lo.
struct TimeWindow {
  double lo = 0.0;
  double hi = 1.0;
  double ramp_lo = 0.1;
  double ramp_hi = 0.1;
  bool open_top = false;
  StepProfile profile;

  double value(double t) const;
  double d1(double t) const;
  double support_lo() const { return lo - ramp_lo; }
  double support_hi() const { return open_top ? std::numeric_limits<double>::infinity() : hi + ramp_hi; }
};

/// phi(x, t) = space(x) * time(t).
class SeparableTestFunction : public TestFunction {
 public:
  SeparableTestFunction(RadialPlateau space, TimeWindow time);

  int dim() const override { return space_.dim(); }
  void jet(std::span<const double> x, double t, Jet& out) const override;
  SupportBox support() const override;

  const RadialPlateau& space() const { return space_; }
  const TimeWindow& time() const { return time_; }

 private:
  RadialPlateau space_;
  TimeWindow time_;
};

/// phi_1 + phi_2.
class SumTestFunction : public TestFunction {
 public:
  SumTestFunction(std::shared_ptr<const TestFunction> a, std::shared_ptr<const TestFunction> b);

  int dim() const override { return a_->dim(); }
  void jet(std::span<const double> x, double t, Jet& out) const override;
  SupportBox support() const override;

 private:
  std::shared_ptr<const TestFunction> a_;
  std::shared_ptr<const TestFunction> b_;
};

/// Nodal samples on a field grid; derivatives by centred differences of the
/// multilinear interpolant (exact for the cell-centre evaluation points the
/// quadrature uses).
class SampledTestFunction : public TestFunction {
 public:
  SampledTestFunction(SpatialGrid grid, double T, int nt, std::vector<double> values);

  int dim() const override { return grid_.d; }
  void jet(std::span<const double> x, double t, Jet& out) const override;
  SupportBox support() const override;

 private:
  double node(int k, std::span<const long> idx) const;
  double nodal_laplacian(int k, std::span<const long> idx) const;

  SpatialGrid grid_;
  double T_;
  int nt_;
  std::vector<double> values_;
};

/// The cylinder cutoff chi_delta(y) eta_delta(t): chi = 1 on B_delta(x),
/// supported in B_{2 delta}(x); eta = 1 on (t - delta^alpha, t + delta^alpha),
/// supported in (t - (2 delta)^alpha, t + (2 delta)^alpha).
///
/// Realized constants: |grad chi| <= C_chi / delta, |eta'| <= C_eta / delta^alpha,
/// |lap chi| <= C_lap / delta^2 with C_chi = sup|S'|, C_eta = sup|S'| / (2^alpha - 1)
/// and C_lap = sup|S''| + (d - 1) sup |S'(s)| / (1 + s).
class CutoffPair : public TestFunction {
 public:
  CutoffPair(SpaceTimePoint center, double delta, double alpha, StepProfile profile = StepProfile());

  int dim() const override { return center_.dim(); }
  void jet(std::span<const double> x, double t, Jet& out) const override;
  SupportBox support() const override;

  const SpaceTimePoint& center() const { return center_; }
  double delta() const { return delta_; }
  double alpha() const { return alpha_; }
  const StepProfile& profile() const { return space_.profile; }

  double chi(std::span<const double> y) const { return space_.value(y); }
  double eta(double t) const;
  double eta_d1(double t) const;

  double C_chi() const;
  double C_eta() const;
  double C_lap() const;

  /// Checks range, plateau, support and derivative bounds at every grid node
  /// inside the support box; throws NumericalError on the first failure.
  void validate_on(const SpatialGrid& grid, double T, int nt) const;

 private:
  SpaceTimePoint center_;
  double delta_;
  double alpha_;
  RadialPlateau space_;
  double tau_ = 1.0;
  double tau2_ = 2.0;
};

}  // namespace dissdim

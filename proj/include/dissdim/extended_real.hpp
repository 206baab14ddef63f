#pragma once

#include <string>

namespace dissdim {

/// A real number or +infinity. Integrability exponents live in [1, inf], and
/// every formula that consumes them branches on `is_infinite()` explicitly
/// instead of relying on IEEE infinity propagation.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT(google-explicit-constructor)

  static constexpr ExtendedReal infinity() {
    ExtendedReal e;
    e.infinite_ = true;
    return e;
  }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr bool is_finite() const { return !infinite_; }

  /// Finite value; throws ValidationError when infinite.
  double value() const;

  /// (x - k) / x with the limit 1 at infinity. This is the ubiquitous
  /// Hölder fraction (r-2)/r, (q-3)/q, (l-1)/l ...
  double fraction_minus(double k) const;
  /// k / x with the limit 0 at infinity.
  double reciprocal_times(double k) const;

  bool operator<(double x) const { return !infinite_ && value_ < x; }
  bool operator>=(double x) const { return !(*this < x); }

  /// Accepts "inf", "infinity", "∞" (any case for the ASCII forms) or a
  /// decimal literal. Throws ValidationError on garbage.
  static ExtendedReal parse(const std::string& text);

  std::string to_string() const;

  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

}  // namespace dissdim

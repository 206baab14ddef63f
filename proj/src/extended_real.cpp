#include "dissdim/extended_real.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "dissdim/errors.hpp"

namespace dissdim {

double ExtendedReal::value() const {
  if (infinite_) throw ValidationError("finite value requested from an infinite exponent");
  return value_;
}

double ExtendedReal::fraction_minus(double k) const {
  if (infinite_) return 1.0;
  return (value_ - k) / value_;
}

double ExtendedReal::reciprocal_times(double k) const {
  if (infinite_) return 0.0;
  return k / value_;
}

ExtendedReal ExtendedReal::parse(const std::string& text) {
  std::string t;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (t == "inf" || t == "+inf" || t == "infinity" || t == "+infinity" || t == "\xe2\x88\x9e") {
    return infinity();
  }
  // Accept simple fractions such as 9/2.
  if (auto slash = t.find('/'); slash != std::string::npos) {
    const auto num = parse(t.substr(0, slash));
    const auto den = parse(t.substr(slash + 1));
    if (num.is_infinite() || den.is_infinite() || den.value() == 0.0) {
      throw ValidationError("cannot parse extended real '" + text + "'");
    }
    return ExtendedReal(num.value() / den.value());
  }
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (t.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ValidationError("cannot parse extended real '" + text + "'");
  }
  return ExtendedReal(v);
}

std::string ExtendedReal::to_string() const {
  if (infinite_) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << value_;
  return os.str();
}

}  // namespace dissdim

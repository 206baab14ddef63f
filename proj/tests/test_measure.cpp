#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "dissdim/errors.hpp"
#include "dissdim/measure.hpp"

using namespace dissdim;

namespace {

std::string error_of(const std::string& text) {
  std::istringstream is(text);
  try {
    (void)measure_io::read(is);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

AtomicMeasure sample_measure() {
  // Values chosen to exercise shortest round-trip formatting.
  std::vector<double> coords = {0.1, -2.5e-300, 1.0 / 3.0, 7.0, -0.0, 1e300};
  std::vector<double> times = {0.5, 2.0 / 7.0, -1e-12};
  std::vector<double> weights = {1.0, 0.0, 5e-324};
  return AtomicMeasure(2, coords, times, weights);
}

void check_identical(const AtomicMeasure& a, const AtomicMeasure& b) {
  REQUIRE(a.dim() == b.dim());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.coords().size(); ++i) CHECK(std::signbit(a.coords()[i]) == std::signbit(b.coords()[i]));
  CHECK(std::vector<double>(a.coords().begin(), a.coords().end()) ==
        std::vector<double>(b.coords().begin(), b.coords().end()));
  CHECK(std::vector<double>(a.times().begin(), a.times().end()) ==
        std::vector<double>(b.times().begin(), b.times().end()));
  CHECK(std::vector<double>(a.weights().begin(), a.weights().end()) ==
        std::vector<double>(b.weights().begin(), b.weights().end()));
}

}  // namespace

TEST_CASE("cylinder membership is strict in both factors") {
  const Cylinder c(SpaceTimePoint{{0.0, 0.0}, 1.0}, 0.5, 2.0);
  CHECK(c.half_time() == doctest::Approx(0.25));
  CHECK(c.contains(std::vector<double>{0.0, 0.0}, 1.0));
  CHECK(c.contains(std::vector<double>{0.3, 0.39}, 1.249));
  // On the sphere |y - x| = delta.
  CHECK_FALSE(c.contains(std::vector<double>{0.3, 0.4}, 1.0));
  // On the time faces.
  CHECK_FALSE(c.contains(std::vector<double>{0.0, 0.0}, 1.25));
  CHECK_FALSE(c.contains(std::vector<double>{0.0, 0.0}, 0.75));
  CHECK_THROWS_AS(Cylinder(SpaceTimePoint{{0.0}, 0.0}, 0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(Cylinder(SpaceTimePoint{{0.0}, 0.0}, 1.0, -1.0), ValidationError);
  CHECK_THROWS_AS(Cylinder(SpaceTimePoint{{0.0}, 0.0}, NAN, 1.0), ValidationError);
}

TEST_CASE("atomic measures reject malformed data") {
  CHECK_THROWS_AS(AtomicMeasure(0, {}, {}, {}), ValidationError);
  CHECK_THROWS_AS(AtomicMeasure(1, {0.0}, {0.0, 1.0}, {1.0}), ValidationError);
  CHECK_THROWS_AS(AtomicMeasure(1, {0.0}, {0.0}, {-1.0}), ValidationError);
  CHECK_THROWS_AS(AtomicMeasure(1, {INFINITY}, {0.0}, {1.0}), ValidationError);
  CHECK_THROWS_AS(AtomicMeasure(1, {0.0}, {NAN}, {1.0}), ValidationError);

  const std::vector<SpaceTimePoint> pts = {{{0.0, 1.0}, 0.0}, {{2.0}, 0.0}};
  const std::vector<double> w = {1.0, 1.0};
  CHECK_THROWS_AS(AtomicMeasure::from_points(2, pts, w), ValidationError);
}

TEST_CASE("atomic measure accessors and total mass") {
  const std::vector<SpaceTimePoint> pts = {{{0.0, 1.0}, 0.5}, {{2.0, 3.0}, -1.0}};
  const std::vector<double> w = {0.25, 1.5};
  const auto mu = AtomicMeasure::from_points(2, pts, w);
  CHECK(mu.size() == 2);
  CHECK(mu.total_mass() == 1.75);
  const auto p = mu.point(1);
  CHECK(p.x == std::vector<double>{2.0, 3.0});
  CHECK(p.t == -1.0);
  CHECK(mu.weight(0) == 0.25);
  CHECK(AtomicMeasure(3, {}, {}, {}).empty());
}

TEST_CASE("text encoding round-trips bit for bit") {
  const auto mu = sample_measure();
  std::stringstream ss;
  measure_io::write(ss, mu);
  const std::string text = ss.str();
  CHECK(text.rfind("dissdim-measure v1 d=2 n=3\n", 0) == 0);
  check_identical(mu, measure_io::read(ss));
}

TEST_CASE("binary encoding round-trips bit for bit") {
  const auto mu = sample_measure();
  std::stringstream ss;
  measure_io::write(ss, mu, measure_io::Encoding::binary);
  const std::string bytes = ss.str();
  const std::string header = "dissdim-measure v1 d=2 n=3\n";
  REQUIRE(bytes.size() == header.size() + 3 * 4 * 8);
  // First coordinate 0.1 = 0x3FB999999999999A, little-endian.
  CHECK(static_cast<unsigned char>(bytes[header.size()]) == 0x9A);
  CHECK(static_cast<unsigned char>(bytes[header.size() + 7]) == 0x3F);
  check_identical(mu, measure_io::read(ss));
}

TEST_CASE("file round trip in both encodings") {
  const auto mu = sample_measure();
  for (auto enc : {measure_io::Encoding::text, measure_io::Encoding::binary}) {
    const std::string path = std::string("measure_roundtrip_") +
                             (enc == measure_io::Encoding::text ? "text" : "bin") + ".dat";
    measure_io::write_file(path, mu, enc);
    check_identical(mu, measure_io::read_file(path));
    std::remove(path.c_str());
  }
  CHECK_THROWS_AS(measure_io::read_file("definitely/not/here.dat"), ValidationError);
}

TEST_CASE("text reader tolerates blank lines and extra spacing") {
  const std::string text = "dissdim-measure v1 d=1 n=2\n\n  0.5   1   2\n\t-1 0 0.25\n";
  std::istringstream is(text);
  const auto mu = measure_io::read(is);
  CHECK(mu.size() == 2);
  CHECK(mu.total_mass() == 2.25);
  CHECK(mu.t(1) == 0.0);
}

TEST_CASE("malformed measure files report the offending line") {
  CHECK(error_of("").find("line 1") != std::string::npos);
  CHECK(error_of("not-a-measure d=1 n=0\n").find("line 1") != std::string::npos);
  CHECK(error_of("dissdim-measure v1 n=1\n0 0 1\n").find("d=") != std::string::npos);
  CHECK(error_of("dissdim-measure v1 d=x n=1\n").find("line 1") != std::string::npos);

  const std::string bad_number = "dissdim-measure v1 d=1 n=3\n0 0 1\n0 0 1\n0 zero 1\n";
  CHECK(error_of(bad_number).find("line 4") != std::string::npos);
  CHECK(error_of(bad_number).find("zero") != std::string::npos);

  const std::string short_row = "dissdim-measure v1 d=2 n=2\n0 0 0 1\n0 0 1\n";
  CHECK(error_of(short_row).find("line 3") != std::string::npos);

  const std::string negative = "dissdim-measure v1 d=1 n=1\n0 0 -1\n";
  CHECK(error_of(negative).find("line 2") != std::string::npos);

  const std::string missing = "dissdim-measure v1 d=1 n=3\n0 0 1\n";
  const std::string msg = error_of(missing);
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("found 1") != std::string::npos);
}

TEST_CASE("shortest decimal formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-310, 6.02214076e23, -7.0, 0.0}) {
    const std::string s = detail::format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(detail::format_double(0.5) == "0.5");
  CHECK(detail::format_double(3.0) == "3");
}

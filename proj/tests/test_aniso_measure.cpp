#include <cmath>
#include <cstdlib>
#include <random>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "doctest.h"
#include "dissdim/aniso_measure.hpp"
#include "dissdim/errors.hpp"
#include "dissdim/fixtures.hpp"

using namespace dissdim;
using namespace dissdim::aniso;

namespace {

std::vector<double> dyadic(int k_lo, int k_hi) {
  std::vector<double> s;
  for (int k = k_lo; k <= k_hi; ++k) s.push_back(std::ldexp(1.0, -k));
  return s;
}

AtomicMeasure unit_atoms(int d, const std::vector<std::pair<std::vector<double>, double>>& pts) {
  std::vector<double> xs;
  std::vector<double> ts;
  for (const auto& [x, t] : pts) {
    xs.insert(xs.end(), x.begin(), x.end());
    ts.push_back(t);
  }
  return AtomicMeasure(d, xs, ts, std::vector<double>(ts.size(), 1.0));
}

// {t = 1/2} x [0, 1] sampled at cell midpoints.
AtomicMeasure segment(int n) {
  std::vector<std::pair<std::vector<double>, double>> pts;
  for (int i = 0; i < n; ++i) pts.push_back({{(i + 0.5) / n}, 0.5});
  return unit_atoms(1, pts);
}

AtomicMeasure random_square(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<std::pair<std::vector<double>, double>> pts;
  for (int i = 0; i < n; ++i) {
    const double x = U(rng);
    pts.push_back({{x}, U(rng)});
  }
  return unit_atoms(1, pts);
}

AtomicMeasure diagonal(int n) {
  std::vector<std::pair<std::vector<double>, double>> pts;
  for (int i = 0; i < n; ++i) {
    const double v = (i + 0.5) / n;
    pts.push_back({{v}, v});
  }
  return unit_atoms(1, pts);
}

// nx x nt lattice filling [0,1]^2, d = 1.
AtomicMeasure full_square(int nx, int nt) {
  std::vector<std::pair<std::vector<double>, double>> pts;
  for (int i = 0; i < nx; ++i) {
    for (int k = 0; k < nt; ++k) pts.push_back({{(i + 0.5) / nx}, (k + 0.5) / nt});
  }
  return unit_atoms(1, pts);
}

// Left endpoints of the level-K middle-thirds intervals, at t = 0.
AtomicMeasure cantor(int K) {
  std::vector<double> xs = {0.0};
  double len = 1.0;
  for (int k = 0; k < K; ++k) {
    len /= 3.0;
    std::vector<double> next;
    for (double x : xs) {
      next.push_back(x);
      next.push_back(x + 2.0 * len);
    }
    xs = std::move(next);
  }
  std::vector<std::pair<std::vector<double>, double>> pts;
  for (double x : xs) pts.push_back({{x + 0.5 * len}, 0.0});
  return unit_atoms(1, pts);
}

// Independent lattice count: distinct (floor(x / delta), floor(t / delta^alpha)).
std::size_t lattice_count(const AtomicMeasure& mu, double alpha, double delta) {
  std::set<std::vector<long long>> cells;
  const double tau = std::pow(delta, alpha);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    std::vector<long long> key;
    for (double c : mu.x(i)) key.push_back(static_cast<long long>(std::floor(c / delta)));
    key.push_back(static_cast<long long>(std::floor(mu.t(i) / tau)));
    cells.insert(key);
  }
  return cells.size();
}

double ls_slope(const std::vector<double>& scales, const std::vector<double>& counts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(scales.size());
  for (std::size_t i = 0; i < scales.size(); ++i) {
    const double x = -std::log(scales[i]);
    const double y = std::log(counts[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct EnvThreads {
  explicit EnvThreads(const char* v) { setenv("DISSDIM_THREADS", v, 1); }
  ~EnvThreads() { unsetenv("DISSDIM_THREADS"); }
};

}  // namespace

TEST_CASE("cylinder mass of single atoms") {
  const auto mu = fixtures::dirac_measure(SpaceTimePoint{{0.0}, 0.0});
  CHECK(cylinder_mass(mu, Cylinder(SpaceTimePoint{{0.0}, 0.0}, 0.5, 1.0)) == 1.0);
  CHECK(cylinder_mass(mu, Cylinder(SpaceTimePoint{{2.0}, 0.0}, 0.5, 1.0)) == 0.0);
  CHECK_THROWS_AS(cylinder_mass(mu, Cylinder(SpaceTimePoint{{0.0, 0.0}, 0.0}, 0.5, 1.0)), ValidationError);
}

TEST_CASE("cylinder mass on a 10x10 lattice matches brute-force membership") {
  std::vector<std::pair<std::vector<double>, double>> pts;
  for (int i = 0; i < 10; ++i) {
    for (int k = 0; k < 10; ++k) pts.push_back({{i / 9.0}, k / 9.0});
  }
  const auto mu = unit_atoms(1, pts);
  // |i/9 - 1/2| < 0.35  <=>  |2i - 9| < 6.3, decided in integers.
  int inside = 0;
  for (int i = 0; i < 10; ++i) {
    for (int k = 0; k < 10; ++k) {
      if (10 * std::abs(2 * i - 9) < 63 && 10 * std::abs(2 * k - 9) < 63) ++inside;
    }
  }
  CHECK(inside == 36);
  CHECK(cylinder_mass(mu, Cylinder(SpaceTimePoint{{0.5}, 0.5}, 0.35, 1.0)) == inside);
}

TEST_CASE("cylinder mass is monotone in delta and additive over disjoint cylinders") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> xs;
  std::vector<double> ts;
  std::vector<double> ws;
  for (int i = 0; i < 2000; ++i) {
    xs.push_back(U(rng));
    xs.push_back(U(rng));
    ts.push_back(U(rng));
    ws.push_back(U(rng));
  }
  const AtomicMeasure mu(2, xs, ts, ws);
  for (int trial = 0; trial < 50; ++trial) {
    const SpaceTimePoint c{{U(rng), U(rng)}, U(rng)};
    const double alpha = 0.5 + 2.0 * U(rng);
    double prev = 0.0;
    for (double delta : {0.01, 0.03, 0.1, 0.2, 0.4}) {
      const double m = cylinder_mass(mu, Cylinder(c, delta, alpha));
      CHECK(m >= prev);
      prev = m;
    }
    // Two cylinders stacked in time, disjoint; their union is the parent
    // box minus a measure-zero face, which no random atom hits.
    const double delta = 0.2;
    const Cylinder lo(SpaceTimePoint{c.x, 0.25}, delta, 1.0);
    const Cylinder hi(SpaceTimePoint{c.x, 0.75}, delta, 1.0);
    double manual = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (lo.contains(mu.x(i), mu.t(i)) || hi.contains(mu.x(i), mu.t(i))) manual += mu.weight(i);
    }
    CHECK(cylinder_mass(mu, lo) + cylinder_mass(mu, hi) == doctest::Approx(manual).epsilon(1e-12));
  }
}

TEST_CASE("box counting rejects bad ladders and empty sets") {
  const auto seg = segment(64);
  CHECK_THROWS_AS(box_counting_dimension(seg, 1.0, dyadic(2, 3)), ValidationError);
  const std::vector<double> increasing = {0.1, 0.2, 0.3};
  CHECK_THROWS_AS(box_counting_dimension(seg, 1.0, increasing), ValidationError);
  const std::vector<SpaceTimePoint> none;
  CHECK_THROWS_AS(box_counting_dimension(std::span<const SpaceTimePoint>(none), 1.0, dyadic(2, 5)), ValidationError);
}

TEST_CASE("segment box counts equal the exact lattice count for both alphas") {
  const auto seg = segment(1024);
  const auto scales = dyadic(2, 7);
  for (double alpha : {1.0, 2.0}) {
    const auto bc = box_counting_dimension(seg, alpha, scales);
    for (std::size_t i = 0; i < scales.size(); ++i) {
      // N_delta = 1 / delta cells along the segment, one time slab.
      CHECK(bc.counts[i] == static_cast<std::size_t>(std::lround(1.0 / scales[i])));
    }
    CHECK(bc.dim_estimate == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bc.fit_residual < 1e-12);
  }
}

TEST_CASE("uniform random square: counts follow expected occupancy") {
  const auto mu = random_square(10000, 2024);
  const auto scales = dyadic(2, 7);
  const auto bc = box_counting_dimension(mu, 1.0, scales);
  for (std::size_t i = 0; i < scales.size(); ++i) {
    // M cells, n uniform points: E[occupied] = M (1 - (1 - 1/M)^n).
    const double M = std::pow(1.0 / scales[i], 2.0);
    const double expected = M * (1.0 - std::pow(1.0 - 1.0 / M, 10000.0));
    CHECK(std::abs(static_cast<double>(bc.counts[i]) - expected) <= 4.0 * std::sqrt(expected) + 1.0);
    if (i > 0) CHECK(bc.counts[i] >= bc.counts[i - 1]);
  }
  // Before saturation the slope is the full dimension d + 1.
  const auto coarse = box_counting_dimension(mu, 1.0, dyadic(2, 5));
  CHECK(coarse.dim_estimate == doctest::Approx(2.0).epsilon(0.075));
}

TEST_CASE("diagonal and full square: lattice-count oracle for alpha in {1, 2}") {
  const auto diag = diagonal(1 << 12);
  const auto scales = dyadic(2, 5);
  for (double alpha : {1.0, 2.0}) {
    const auto bc = box_counting_dimension(diag, alpha, scales);
    std::vector<double> oracle;
    for (double s : scales) oracle.push_back(static_cast<double>(lattice_count(diag, alpha, s)));
    for (std::size_t i = 0; i < scales.size(); ++i) CHECK(static_cast<double>(bc.counts[i]) == oracle[i]);
    CHECK(bc.dim_estimate == doctest::Approx(ls_slope(scales, oracle)).epsilon(1e-12));
  }
  // The diagonal crosses delta^{-alpha} time slabs, each in its own cell.
  CHECK(box_counting_dimension(diag, 1.0, scales).dim_estimate == doctest::Approx(1.0).epsilon(0.02));
  CHECK(box_counting_dimension(diag, 2.0, scales).dim_estimate == doctest::Approx(2.0).epsilon(0.02));

  const auto sq = full_square(64, 512);
  const auto sq_scales = dyadic(2, 4);
  CHECK(box_counting_dimension(sq, 1.0, sq_scales).dim_estimate == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(box_counting_dimension(sq, 2.0, sq_scales).dim_estimate == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("time-singular fixtures have the spatial dimension") {
  const auto scales = dyadic(3, 8);
  const auto seg = fixtures::time_singular_measure_fixture(1, 10000);
  CHECK(box_counting_dimension(seg, 1.0, scales).dim_estimate == doctest::Approx(1.0).epsilon(0.1));
  const auto slab = fixtures::time_singular_measure_fixture(2, 100000);
  CHECK(std::abs(box_counting_dimension(slab, 1.0, scales).dim_estimate - 2.0) < 0.15);
  bool inside = true;
  for (std::size_t i = 0; i < slab.size(); ++i) {
    inside = inside && slab.t(i) == 0.5;
    for (double c : slab.x(i)) inside = inside && c >= 0.0 && c < 1.0;
  }
  CHECK(inside);
  CHECK(slab.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("union and product bounds on box dimension") {
  const auto scales = dyadic(2, 7);
  const auto a = segment(1024);
  const auto b = diagonal(1024);
  std::vector<double> xs(a.coords().begin(), a.coords().end());
  xs.insert(xs.end(), b.coords().begin(), b.coords().end());
  std::vector<double> ts(a.times().begin(), a.times().end());
  ts.insert(ts.end(), b.times().begin(), b.times().end());
  const AtomicMeasure u(1, xs, ts, std::vector<double>(ts.size(), 1.0));
  const double da = box_counting_dimension(a, 1.0, scales).dim_estimate;
  const double db = box_counting_dimension(b, 1.0, scales).dim_estimate;
  CHECK(box_counting_dimension(u, 1.0, scales).dim_estimate <= std::max(da, db) + 0.15);

  // Cantor dust x [0, 1] in time: log 2 / log 3 + 1.
  const auto c = cantor(8);
  std::vector<double> px;
  std::vector<double> pt;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (int k = 0; k < 729; ++k) {
      px.push_back(c.x(i)[0]);
      pt.push_back((k + 0.5) / 729.0);
    }
  }
  const AtomicMeasure prod(1, px, pt, std::vector<double>(pt.size(), 1.0));
  std::vector<double> triadic;
  for (int k = 1; k <= 5; ++k) triadic.push_back(std::pow(3.0, -k));
  const double dc = box_counting_dimension(c, 1.0, triadic).dim_estimate;
  const double dp = box_counting_dimension(prod, 1.0, triadic).dim_estimate;
  CHECK(dc == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(0.1));
  CHECK(std::abs(dp - (dc + 1.0)) < 0.2);
}

TEST_CASE("alpha monotonicity holds on the fixture suite") {
  const auto scales = dyadic(2, 5);
  const std::vector<double> alphas = {0.5, 1.0, 1.5, 2.0};
  std::vector<AtomicMeasure> sets;
  sets.push_back(segment(1024));
  sets.push_back(diagonal(4096));
  sets.push_back(full_square(64, 1024));
  sets.push_back(fixtures::time_singular_measure_fixture(2, 20000));
  sets.push_back(fixtures::burgers_dissipation_measure(fixtures::RiemannDatum{1.0, -1.0, 0.0}, 1.0, 4096).measure);
  for (const auto& mu : sets) {
    const auto check = alpha_monotonicity_check(mu, alphas, scales);
    CHECK_FALSE(check.violation);
    REQUIRE(check.estimates.size() == alphas.size());
  }
  // Time slab: (2, 2); full square: (2, 3).
  const std::vector<double> one_two = {1.0, 2.0};
  const auto slab = alpha_monotonicity_check(sets[3], one_two, scales);
  CHECK(slab.estimates[0] == doctest::Approx(2.0).epsilon(0.075));
  CHECK(slab.estimates[1] == doctest::Approx(2.0).epsilon(0.075));
  const auto cube = alpha_monotonicity_check(full_square(64, 512), one_two, dyadic(2, 4));
  CHECK(cube.estimates[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(cube.estimates[1] == doctest::Approx(3.0).epsilon(1e-9));

  const std::vector<double> single = {1.0};
  CHECK_THROWS_AS(alpha_monotonicity_check(sets[0], single, scales), ValidationError);
  const std::vector<double> decreasing = {2.0, 1.0};
  CHECK_THROWS_AS(alpha_monotonicity_check(sets[0], decreasing, scales), ValidationError);
}

TEST_CASE("a two-atom set fools the box-count ladder and is flagged") {
  // Time gap 0.07: already split at every alpha = 2 scale (delta^2 <= 1/16),
  // split only from delta = 1/16 on at alpha = 1. The alpha = 1 slope is
  // positive, the alpha = 2 slope zero.
  const auto two = unit_atoms(1, {{{0.5}, 0.0}, {{0.5}, 0.07}});
  const std::vector<double> one_two = {1.0, 2.0};
  const auto check = alpha_monotonicity_check(two, one_two, dyadic(2, 7));
  CHECK(check.estimates[1] == doctest::Approx(0.0));
  CHECK(check.estimates[0] > 0.15);
  CHECK(check.violation);
}

TEST_CASE("Dirac density ladder is constant at s = 0 and certifies 0") {
  const auto mu = fixtures::dirac_measure(SpaceTimePoint{{0.3, 0.3}, 0.1}, 2.5);
  const auto scales = dyadic(1, 8);
  const auto L = density_ladder(mu, 1.0, 0.0, scales);
  for (double v : L.densities) CHECK(v == 2.5);
  CHECK(L.non_increasing);
  CHECK(L.fitted_slope == doctest::Approx(0.0));
  const auto cert = certify_lower_bound(L);
  CHECK(cert.verdict == Verdict::certified);
  CHECK(cert.certified_s == 0.0);
  CHECK(cert.constant == 5.0);
  // At s = 2 the density blows up like delta^{-2}.
  CHECK_FALSE(density_ladder(mu, 1.0, 2.0, scales).non_increasing);
}

TEST_CASE("density ladder at s = 0 never exceeds total mass") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> xs;
    std::vector<double> ts;
    std::vector<double> ws;
    for (int i = 0; i < 500; ++i) {
      xs.push_back(U(rng));
      ts.push_back(U(rng));
      ws.push_back(U(rng));
    }
    const AtomicMeasure mu(1, xs, ts, ws);
    const auto L = density_ladder(mu, 0.5 + U(rng), 0.0, dyadic(0, 6));
    for (double v : L.densities) CHECK(v <= mu.total_mass() * (1.0 + 1e-12));
  }
}

TEST_CASE("uniform lattice square: density near 4 and certified s = 2") {
  const auto mu = fixtures::uniform_grid_measure(1, 256);
  CHECK(mu.total_mass() == doctest::Approx(1.0));
  const auto L = density_ladder(mu, 1.0, 2.0, dyadic(2, 5), CenterPolicy::strided(600));
  for (double v : L.densities) {
    CHECK(v > 3.5);
    CHECK(v <= 4.0 + 1e-9);
  }
  const auto cert = certify_lower_bound(L);
  CHECK(cert.verdict == Verdict::certified);
  CHECK(std::abs(cert.certified_s - 2.0) <= 0.15);
}

TEST_CASE("shock dissipation ladder tends to 4/3 and certifies s >= 0.9") {
  const auto shock = fixtures::burgers_dissipation_measure(fixtures::RiemannDatum{1.0, -1.0, 0.0}, 1.0, 8192);
  const auto L = density_ladder(shock.measure, 1.0, 1.0, dyadic(3, 8), CenterPolicy::strided(500));
  for (double v : L.densities) CHECK(v == doctest::Approx(4.0 / 3.0).epsilon(0.05));
  const auto cert = certify_lower_bound(L);
  CHECK(cert.verdict == Verdict::certified);
  CHECK(cert.certified_s >= 0.9);
  CHECK(cert.certified_s <= 1.15);
}

TEST_CASE("power-law divergence measure certifies its exponent") {
  const fixtures::PowerLawField field(2, 0.5);
  const auto mu = fixtures::power_law_measure(field, 1e-6, 1.0, 120, 32);
  const std::vector<SpaceTimePoint> origin = {{{0.0, 0.0}, 0.0}};
  const auto L = density_ladder(mu, 1.0, 0.5, dyadic(3, 8), CenterPolicy::explicit_list(origin));
  // Centred at the origin the ladder is the ball mass c_2 delta^{1/2}.
  for (std::size_t i = 0; i < L.scales.size(); ++i) {
    CHECK(L.sup_mass[i] == doctest::Approx(fixtures::power_law_ball_mass(field, L.scales[i])).epsilon(0.05));
  }
  const auto cert = certify_lower_bound(density_ladder(mu, 1.0, 0.5, dyadic(3, 8)));
  CHECK(cert.verdict == Verdict::certified);
  CHECK(cert.certified_s == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("density ladder preconditions") {
  const auto mu = fixtures::dirac_measure(SpaceTimePoint{{0.0}, 0.0});
  CHECK_THROWS_AS(density_ladder(mu, 1.0, -0.5, dyadic(1, 4)), ValidationError);
  const AtomicMeasure zero(1, {0.0}, {0.0}, {0.0});
  CHECK_THROWS_AS(density_ladder(zero, 1.0, 1.0, dyadic(1, 4)), ValidationError);
  const std::vector<SpaceTimePoint> wrong_dim = {{{0.0, 0.0}, 0.0}};
  CHECK_THROWS_AS(density_ladder(mu, 1.0, 1.0, dyadic(1, 4), CenterPolicy::explicit_list(wrong_dim)),
                  ValidationError);
}

TEST_CASE("noisy or short ladders are inconclusive") {
  DensityLadder L;
  L.d = 1;
  L.scales = {0.5, 0.25, 0.125, 0.0625};
  L.sup_mass = {1.0, 1e-3, 0.5, 1e-5};
  L.positive_scales = 4;
  L.fitted_slope = 1.0;
  L.fit_residual = 2.0;
  CHECK(certify_lower_bound(L).verdict == Verdict::inconclusive);

  const auto mu = fixtures::dirac_measure(SpaceTimePoint{{0.0}, 0.0});
  const std::vector<SpaceTimePoint> far = {{{5.0}, 0.0}};
  const auto empty_ladder = density_ladder(mu, 1.0, 0.0, dyadic(1, 4), CenterPolicy::explicit_list(far));
  CHECK(empty_ladder.positive_scales == 0);
  CHECK(certify_lower_bound(empty_ladder).verdict == Verdict::inconclusive);
}

TEST_CASE("density ladders do not depend on the thread count") {
  const auto mu = fixtures::time_singular_measure_fixture(2, 20000, 3);
  DensityLadder one;
  DensityLadder many;
  {
    EnvThreads env("1");
    one = density_ladder(mu, 1.0, 2.0, dyadic(2, 5), CenterPolicy::strided(300));
  }
  {
    EnvThreads env("7");
    many = density_ladder(mu, 1.0, 2.0, dyadic(2, 5), CenterPolicy::strided(300));
  }
  CHECK(one.sup_mass == many.sup_mass);
  CHECK(one.fitted_slope == many.fitted_slope);
}

TEST_CASE("covering premeasure: single point, segment, Cantor dust") {
  const auto pt = fixtures::dirac_measure(SpaceTimePoint{{0.3}, 0.7});
  for (double cap : {0.5, 0.1, 0.01}) CHECK(covering_premeasure(pt, 1.0, 0.5, cap) == std::pow(cap, 0.5));
  CHECK_THROWS_AS(covering_premeasure(pt, 1.0, 0.5, 0.0), ValidationError);

  // Cells of side 2 delta cover the unit segment 1 / (2 delta) times.
  const auto seg = segment(4096);
  std::vector<double> values;
  for (double cap : dyadic(3, 8)) values.push_back(covering_premeasure(seg, 1.0, 1.0, cap));
  for (double v : values) CHECK(v == doctest::Approx(0.5).epsilon(0.05));

  // Exact cover by 2^k triadic intervals has sum 2^k (3^{-k})^s = 1.
  const auto dust = cantor(10);
  const double s = std::log(2.0) / std::log(3.0);
  for (int k = 2; k <= 7; ++k) {
    const double v = covering_premeasure(dust, 1.0, s, std::pow(3.0, -k));
    CHECK(v >= 0.25);
    CHECK(v <= 4.0);
  }
}

TEST_CASE("covering premeasure below the certified exponent diverges") {
  std::vector<AtomicMeasure> sets;
  std::vector<double> certified;
  sets.push_back(fixtures::burgers_dissipation_measure(fixtures::RiemannDatum{1.0, -1.0, 0.0}, 1.0, 8192).measure);
  certified.push_back(1.0);
  sets.push_back(fixtures::time_singular_measure_fixture(2, 100000));
  certified.push_back(2.0);
  sets.push_back(fixtures::uniform_grid_measure(1, 256));
  certified.push_back(2.0);
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const auto caps = dyadic(2, 6);
    double prev = 0.0;
    for (double cap : caps) {
      const double v = covering_premeasure(sets[k], 1.0, certified[k] - 0.2, cap);
      CHECK(v > prev);
      prev = v;
    }
    const double first = covering_premeasure(sets[k], 1.0, certified[k] - 0.2, caps.front());
    CHECK(prev / first > 1.5);
  }
}

TEST_CASE("ladder and box-count CSV layout") {
  const auto seg = segment(256);
  std::ostringstream a;
  write_csv(a, box_counting_dimension(seg, 1.0, dyadic(2, 4)));
  CHECK(a.str() == "delta,count_or_density,fit_slope,residual\n0.25,4,1,0\n0.125,8,1,0\n0.0625,16,1,0\n");
  std::ostringstream b;
  write_csv(b, density_ladder(fixtures::dirac_measure(SpaceTimePoint{{0.0}, 0.0}), 1.0, 0.0, dyadic(1, 3)));
  CHECK(b.str() == "delta,count_or_density,fit_slope,residual\n0.5,1,0,0\n0.25,1,0,0\n0.125,1,0,0\n");
}

TEST_CASE("geometric scales") {
  const auto s = geometric_scales(0.5, 0.5, 4);
  CHECK(s == std::vector<double>{0.5, 0.25, 0.125, 0.0625});
  CHECK_THROWS_AS(geometric_scales(0.5, 1.5, 4), ValidationError);
}

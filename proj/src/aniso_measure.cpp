#include "dissdim/aniso_measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "dissdim/errors.hpp"
#include "dissdim/numerics.hpp"

namespace dissdim::aniso {
namespace {

std::uint64_t mix(std::uint64_t h, std::int64_t v) {
  std::uint64_t z = h + 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(v);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::int64_t cell_index(double v, double side) {
  const double q = std::floor(v / side);
  if (!(std::abs(q) < 9.0e18)) throw NumericalError("lattice index overflow");
  return static_cast<std::int64_t>(q);
}

/// Indices of atoms with weight above floor * mass.
std::vector<std::size_t> support_indices(const AtomicMeasure& mu, double floor_fraction) {
  std::vector<std::size_t> idx;
  const double floor = floor_fraction * mu.total_mass();
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu.weight(i) > floor) idx.push_back(i);
  }
  return idx;
}

AtomicMeasure unit_measure(std::span<const SpaceTimePoint> points) {
  require(!points.empty(), "empty support");
  std::vector<double> w(points.size(), 1.0);
  return AtomicMeasure::from_points(points.front().dim(), points, w);
}

void check_scales(std::span<const double> scales) {
  require(scales.size() >= 3, "need at least 3 scales");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    require(scales[i] > 0.0 && std::isfinite(scales[i]), "scales must be positive and finite");
    if (i > 0) require(scales[i] < scales[i - 1], "scales must be strictly decreasing");
  }
}

/// Number of distinct lattice cells (space side `side_x`, time side `side_t`)
/// holding at least one of the listed atoms.
std::size_t occupied_cells(const AtomicMeasure& mu, std::span<const std::size_t> idx, double side_x, double side_t) {
  const std::size_t w = static_cast<std::size_t>(mu.dim()) + 1;
  std::vector<std::int64_t> keys(idx.size() * w);
  for (std::size_t n = 0; n < idx.size(); ++n) {
    const auto x = mu.x(idx[n]);
    for (std::size_t k = 0; k < x.size(); ++k) keys[n * w + k] = cell_index(x[k], side_x);
    keys[n * w + w - 1] = cell_index(mu.t(idx[n]), side_t);
  }
  std::vector<std::size_t> order(idx.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto key_less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(keys.begin() + a * w, keys.begin() + (a + 1) * w, keys.begin() + b * w,
                                        keys.begin() + (b + 1) * w);
  };
  std::sort(order.begin(), order.end(), key_less);
  std::size_t count = order.empty() ? 0 : 1;
  for (std::size_t n = 1; n < order.size(); ++n) {
    if (key_less(order[n - 1], order[n])) ++count;
  }
  return count;
}

/// Hashed bucket index of atoms for one cylinder scale: cells of side delta
/// in space and delta^alpha in time, so a cylinder centred anywhere in a cell
/// only reaches the 3^(d+1) surrounding cells. Hash collisions merely add
/// candidates; membership is always tested exactly.
class BucketIndex {
 public:
  BucketIndex(const AtomicMeasure& mu, std::span<const std::size_t> idx, double delta, double alpha)
      : mu_(mu), delta_(delta), tau_(std::pow(delta, alpha)) {
    // Each bucket packs (x_1..x_d, t, w) records contiguously.
    for (std::size_t i : idx) {
      auto& b = buckets_[key_of(mu.x(i), mu.t(i), nullptr)];
      const auto x = mu.x(i);
      b.insert(b.end(), x.begin(), x.end());
      b.push_back(mu.t(i));
      b.push_back(mu.weight(i));
    }
  }

  double mass(const Cylinder& c) const {
    const int d = mu_.dim();
    std::vector<std::int64_t> base(d + 1);
    for (int k = 0; k < d; ++k) base[k] = cell_index(c.center.x[k], delta_);
    base[d] = cell_index(c.center.t, tau_);
    const std::size_t n_nb = static_cast<std::size_t>(std::pow(3.0, d + 1) + 0.5);
    std::vector<std::uint64_t> hashes;
    hashes.reserve(n_nb);
    std::vector<std::int64_t> cell(d + 1);
    for (std::size_t code = 0; code < n_nb; ++code) {
      std::size_t rest = code;
      for (int k = 0; k <= d; ++k) {
        cell[k] = base[k] + static_cast<std::int64_t>(rest % 3) - 1;
        rest /= 3;
      }
      hashes.push_back(hash_cell(cell));
    }
    std::sort(hashes.begin(), hashes.end());
    hashes.erase(std::unique(hashes.begin(), hashes.end()), hashes.end());
    const double r2 = c.delta * c.delta;
    const double half_t = c.half_time();
    const std::size_t stride = static_cast<std::size_t>(d) + 2;
    double m = 0.0;
    for (std::uint64_t h : hashes) {
      auto it = buckets_.find(h);
      if (it == buckets_.end()) continue;
      const std::vector<double>& rec = it->second;
      for (std::size_t o = 0; o < rec.size(); o += stride) {
        if (!(std::abs(rec[o + d] - c.center.t) < half_t)) continue;
        double dist2 = 0.0;
        for (int k = 0; k < d; ++k) {
          const double dx = rec[o + k] - c.center.x[k];
          dist2 += dx * dx;
        }
        if (dist2 < r2) m += rec[o + d + 1];
      }
    }
    return m;
  }

 private:
  static std::uint64_t hash_cell(std::span<const std::int64_t> cell) {
    std::uint64_t h = 0x51ed2701f3a5c7d1ULL;
    for (auto v : cell) h = mix(h, v);
    return h;
  }

  std::uint64_t key_of(std::span<const double> x, double t, std::vector<std::int64_t>* out) const {
    std::vector<std::int64_t> cell(x.size() + 1);
    for (std::size_t k = 0; k < x.size(); ++k) cell[k] = cell_index(x[k], delta_);
    cell[x.size()] = cell_index(t, tau_);
    if (out) *out = cell;
    return hash_cell(cell);
  }

  const AtomicMeasure& mu_;
  double delta_;
  double tau_;
  std::unordered_map<std::uint64_t, std::vector<double>> buckets_;
};

std::vector<SpaceTimePoint> choose_centers(const AtomicMeasure& mu, const CenterPolicy& policy) {
  std::vector<SpaceTimePoint> centers;
  if (policy.kind == CenterPolicy::Kind::explicit_points) {
    for (const auto& p : policy.points) require(p.dim() == mu.dim(), "centre dimension does not match the measure");
    return policy.points;
  }
  auto idx = support_indices(mu, policy.weight_floor);
  require(!idx.empty(), "empty support");
  if (policy.kind == CenterPolicy::Kind::top_k) {
    require(policy.count >= 1, "top-k policy needs k >= 1");
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return mu.weight(a) > mu.weight(b); });
    if (idx.size() > policy.count) idx.resize(policy.count);
  } else if (policy.kind == CenterPolicy::Kind::stride) {
    require(policy.count >= 1, "stride policy needs max_centers >= 1");
    if (idx.size() > policy.count) {
      std::vector<std::size_t> picked;
      picked.reserve(policy.count);
      for (std::size_t j = 0; j < policy.count; ++j) picked.push_back(idx[j * idx.size() / policy.count]);
      idx = std::move(picked);
    }
  }
  centers.reserve(idx.size());
  for (std::size_t i : idx) centers.push_back(mu.point(i));
  return centers;
}

}  // namespace

double cylinder_mass(const AtomicMeasure& mu, const Cylinder& c) {
  require(c.center.dim() == mu.dim(), "cylinder dimension does not match the measure");
  double m = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (c.contains(mu.x(i), mu.t(i))) m += mu.weight(i);
  }
  return m;
}

std::vector<double> geometric_scales(double delta_max, double ratio, std::size_t count) {
  require(delta_max > 0.0 && std::isfinite(delta_max), "delta_max must be positive");
  require(ratio > 0.0 && ratio < 1.0, "ladder ratio must lie in (0, 1)");
  require(count >= 3, "ladder count must be >= 3");
  std::vector<double> s(count);
  for (std::size_t i = 0; i < count; ++i) s[i] = delta_max * std::pow(ratio, static_cast<double>(i));
  return s;
}

BoxCount box_counting_dimension(const AtomicMeasure& points, double alpha, std::span<const double> scales) {
  check_scales(scales);
  require(alpha > 0.0, "alpha must be positive");
  const auto idx = support_indices(points, 0.0);
  require(!idx.empty(), "empty support");
  BoxCount bc;
  bc.scales.assign(scales.begin(), scales.end());
  std::vector<double> lx;
  std::vector<double> ly;
  for (double delta : scales) {
    const std::size_t n = occupied_cells(points, idx, delta, std::pow(delta, alpha));
    bc.counts.push_back(n);
    lx.push_back(std::log(1.0 / delta));
    ly.push_back(std::log(static_cast<double>(n)));
  }
  const auto fit = fit_line(lx, ly);
  bc.dim_estimate = fit.slope;
  bc.fit_residual = fit.residual;
  return bc;
}

BoxCount box_counting_dimension(std::span<const SpaceTimePoint> points, double alpha, std::span<const double> scales) {
  return box_counting_dimension(unit_measure(points), alpha, scales);
}

DensityLadder density_ladder(const AtomicMeasure& mu, double alpha, double s, std::span<const double> scales,
                             const CenterPolicy& policy) {
  require(s >= 0.0, "density exponent s must be >= 0");
  require(alpha > 0.0, "alpha must be positive");
  check_scales(scales);
  const auto centers = choose_centers(mu, policy);
  require(!centers.empty(), "empty support");
  const auto idx = support_indices(mu, 0.0);

  DensityLadder L;
  L.alpha = alpha;
  L.s = s;
  L.d = mu.dim();
  L.n_centers = centers.size();
  L.scales.assign(scales.begin(), scales.end());
  for (double delta : scales) {
    const BucketIndex index(mu, idx, delta, alpha);
    std::vector<double> chunk_max(chunk_count(centers.size()), 0.0);
    parallel_chunks(centers.size(), [&](std::size_t chunk, std::size_t b, std::size_t e) {
      double best = 0.0;
      for (std::size_t c = b; c < e; ++c) best = std::max(best, index.mass(Cylinder(centers[c], delta, alpha)));
      chunk_max[chunk] = best;
    });
    const double sup = *std::max_element(chunk_max.begin(), chunk_max.end());
    L.sup_mass.push_back(sup);
    L.densities.push_back(sup / std::pow(delta, s));
  }
  for (std::size_t i = 1; i < L.densities.size(); ++i) {
    if (L.densities[i] > L.nonincreasing_tolerance * L.densities[i - 1]) L.non_increasing = false;
  }
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < L.scales.size(); ++i) {
    if (L.sup_mass[i] > 0.0) {
      lx.push_back(std::log(L.scales[i]));
      ly.push_back(std::log(L.sup_mass[i]));
    }
  }
  L.positive_scales = lx.size();
  if (lx.size() >= 3) {
    const auto fit = fit_line(lx, ly);
    L.fitted_slope = fit.slope;
    L.fit_residual = fit.residual;
  }
  return L;
}

std::string to_string(Verdict v) { return v == Verdict::certified ? "certified" : "inconclusive"; }

Certification certify_lower_bound(const DensityLadder& L, double step) {
  require(step > 0.0, "scan step must be positive");
  Certification cert;
  if (L.positive_scales < 3 || L.fit_residual > 0.25) return cert;
  if (!(L.sup_mass.front() > 0.0)) return cert;

  const double top = L.d + 1.0;
  const auto n_steps = static_cast<std::size_t>(std::floor(top / step + 1e-9));
  bool any = false;
  for (std::size_t k = 0; k <= n_steps; ++k) {
    const double sp = static_cast<double>(k) * step;
    const double coarse = L.sup_mass.front() / std::pow(L.scales.front(), sp);
    const double C = 2.0 * coarse;
    bool bounded = true;
    for (std::size_t i = 0; i < L.scales.size() && bounded; ++i) {
      if (L.sup_mass[i] / std::pow(L.scales[i], sp) > C) bounded = false;
    }
    // log density = log mass - s' log delta; its slope against log delta is
    // fitted_slope - s' and must not be negative.
    if (bounded && L.fitted_slope - sp >= -1e-12) {
      cert.certified_s = sp;
      cert.constant = C;
      any = true;
    }
  }
  cert.verdict = any ? Verdict::certified : Verdict::inconclusive;
  return cert;
}

double covering_premeasure(const AtomicMeasure& points, double alpha, double s, double delta_cap) {
  require(delta_cap > 0.0 && std::isfinite(delta_cap), "delta_cap must be positive");
  require(alpha > 0.0, "alpha must be positive");
  const auto idx = support_indices(points, 0.0);
  if (idx.empty()) return 0.0;
  const double side_x = 2.0 * delta_cap / std::sqrt(static_cast<double>(points.dim()));
  const double side_t = 2.0 * std::pow(delta_cap, alpha);
  // Every uncovered point lies in some occupied cap-scale cell, and those
  // cells are the largest admissible cylinders, so the greedy picks each
  // occupied cell once.
  const std::size_t n = occupied_cells(points, idx, side_x, side_t);
  return static_cast<double>(n) * std::pow(delta_cap, s);
}

double covering_premeasure(std::span<const SpaceTimePoint> points, double alpha, double s, double delta_cap) {
  if (points.empty()) return 0.0;
  return covering_premeasure(unit_measure(points), alpha, s, delta_cap);
}

AlphaMonotonicity alpha_monotonicity_check(const AtomicMeasure& points, std::span<const double> alphas,
                                           std::span<const double> scales) {
  require(alphas.size() >= 2, "need at least 2 alphas");
  AlphaMonotonicity out;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (i > 0) require(alphas[i] > alphas[i - 1], "alphas must be increasing");
    const auto bc = box_counting_dimension(points, alphas[i], scales);
    out.alphas.push_back(alphas[i]);
    out.estimates.push_back(bc.dim_estimate);
    out.residuals.push_back(bc.fit_residual);
    if (i > 0 && out.estimates[i] < out.estimates[i - 1] - out.tolerance) out.violation = true;
  }
  return out;
}

void write_csv(std::ostream& os, const BoxCount& bc) {
  os << "delta,count_or_density,fit_slope,residual\n";
  for (std::size_t i = 0; i < bc.scales.size(); ++i) {
    os << detail::format_double(bc.scales[i]) << ',' << bc.counts[i] << ',' << detail::format_double(bc.dim_estimate)
       << ',' << detail::format_double(bc.fit_residual) << '\n';
  }
}

void write_csv(std::ostream& os, const DensityLadder& L) {
  os << "delta,count_or_density,fit_slope,residual\n";
  for (std::size_t i = 0; i < L.scales.size(); ++i) {
    os << detail::format_double(L.scales[i]) << ',' << detail::format_double(L.densities[i]) << ','
       << detail::format_double(L.fitted_slope) << ',' << detail::format_double(L.fit_residual) << '\n';
  }
}

}  // namespace dissdim::aniso

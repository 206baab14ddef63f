#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace dissdim {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Root-mean-square of the vertical residuals.
  double residual = 0.0;
};

/// Ordinary least squares y = slope * x + intercept. Needs >= 2 points.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Adaptive Simpson quadrature of f on [a, b] to relative tolerance `rel_tol`
/// (with an absolute floor of rel_tol * |estimate on the first panel|).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol,
                        int max_depth = 50);

/// Number of worker threads: DISSDIM_THREADS if set (>= 1), otherwise the
/// hardware concurrency.
unsigned worker_threads();

/// Runs body(begin, end) over contiguous chunks of [0, n). The chunk layout
/// depends only on n and the thread count; callers reduce per-chunk results in
/// chunk order so results are deterministic.
void parallel_chunks(std::size_t n, const std::function<void(std::size_t chunk, std::size_t begin, std::size_t end)>& body,
                     std::size_t* n_chunks_out = nullptr);

/// The chunk count parallel_chunks will use for n items.
std::size_t chunk_count(std::size_t n);

}  // namespace dissdim

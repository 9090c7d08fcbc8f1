#pragma once

// Argument-principle counting on axis-parallel rectangles.

#include <complex>
#include <functional>

namespace edgewatch {

struct Rect {
    double x_lo = 0.0;
    double x_hi = 0.0;
    double y_lo = 0.0;
    double y_hi = 0.0;
};

struct WindingOptions {
    int samples_min = 16;  // initial samples per side
    int max_depth = 24;    // bisection depth per initial segment
};

/// Winding number of g along the positively oriented boundary of rect, i.e.
/// zeros minus poles inside for meromorphic g. Phase increments are tracked
/// by bisecting until every piece turns by less than pi/2 and agrees with its
/// midpoint split. Throws AdaptiveDepthExceeded when that is impossible
/// (a zero or pole on or too near the boundary) or g is not finite there.
int winding_count(const std::function<std::complex<double>(std::complex<double>)>& g, const Rect& rect,
                  const WindingOptions& opts = {});

}  // namespace edgewatch

#include "edgewatch/winding.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "edgewatch/error.hpp"

namespace edgewatch {

namespace {

using Complex = std::complex<double>;

constexpr double kQuarterTurn = std::numbers::pi / 2;

class PhaseWalker {
public:
    PhaseWalker(const std::function<Complex(Complex)>& g, Complex from, Complex to, int max_depth)
        : g_(g), from_(from), to_(to), max_depth_(max_depth) {}

    Complex value(double t) const {
        const Complex v = g_(from_ + t * (to_ - from_));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || v == Complex(0.0))
            throw Error(ErrorKind::AdaptiveDepthExceeded, "function vanishes or is singular on the contour");
        return v;
    }

    double increment(double t0, double t1, Complex g0, Complex g1, int depth) const {
        const double whole = std::arg(g1 / g0);
        const double tm = 0.5 * (t0 + t1);
        const Complex gm = value(tm);
        const double left = std::arg(gm / g0);
        const double right = std::arg(g1 / gm);
        if (std::abs(whole) < kQuarterTurn && std::abs(left) < kQuarterTurn && std::abs(right) < kQuarterTurn &&
            std::abs(left + right - whole) < 1e-9)
            return whole;
        if (depth >= max_depth_)
            throw Error(ErrorKind::AdaptiveDepthExceeded, "phase could not be resolved along the contour");
        return increment(t0, tm, g0, gm, depth + 1) + increment(tm, t1, gm, g1, depth + 1);
    }

private:
    const std::function<Complex(Complex)>& g_;
    Complex from_, to_;
    int max_depth_;
};

}  // namespace

int winding_count(const std::function<Complex(Complex)>& g, const Rect& rect, const WindingOptions& opts) {
    if (!(rect.x_lo < rect.x_hi) || !(rect.y_lo < rect.y_hi))
        throw Error(ErrorKind::InvalidArgument, "rectangle must have positive width and height");
    if (opts.samples_min < 1 || opts.max_depth < 0)
        throw Error(ErrorKind::InvalidArgument, "invalid winding options");

    const std::array<Complex, 5> corners{Complex(rect.x_lo, rect.y_lo), Complex(rect.x_hi, rect.y_lo),
                                         Complex(rect.x_hi, rect.y_hi), Complex(rect.x_lo, rect.y_hi),
                                         Complex(rect.x_lo, rect.y_lo)};
    double total = 0.0;
    for (std::size_t side = 0; side < 4; ++side) {
        const PhaseWalker walker(g, corners[side], corners[side + 1], opts.max_depth);
        double t0 = 0.0;
        Complex g0 = walker.value(0.0);
        for (int s = 1; s <= opts.samples_min; ++s) {
            const double t1 = static_cast<double>(s) / opts.samples_min;
            const Complex g1 = walker.value(t1);
            total += walker.increment(t0, t1, g0, g1, 0);
            t0 = t1;
            g0 = g1;
        }
    }
    const double turns = total / (2 * std::numbers::pi);
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) > 1e-6)
        throw Error(ErrorKind::AdaptiveDepthExceeded, "accumulated phase is not a whole number of turns");
    return static_cast<int>(rounded);
}

}  // namespace edgewatch

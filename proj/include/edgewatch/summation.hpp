#pragma once

#include <cmath>
#include <complex>
#include <span>

namespace edgewatch {

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    void add(const CompensatedSum& other) noexcept {
        add(other.sum_);
        add(other.comp_);
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Pairwise summation over blocks, each block Neumaier-compensated.
double pairwise_sum(std::span<const double> terms);

/// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2 (error-free transformations).
struct DoubleDouble {
    double hi = 0.0;
    double lo = 0.0;

    DoubleDouble() = default;
    DoubleDouble(double x) : hi(x), lo(0.0) {}  // NOLINT(google-explicit-constructor)
    DoubleDouble(double h, double l) : hi(h), lo(l) {}

    double to_double() const noexcept { return hi + lo; }

    friend DoubleDouble operator+(DoubleDouble a, DoubleDouble b);
    friend DoubleDouble operator-(DoubleDouble a, DoubleDouble b);
    friend DoubleDouble operator*(DoubleDouble a, DoubleDouble b);
    friend DoubleDouble operator/(DoubleDouble a, DoubleDouble b);
    DoubleDouble operator-() const { return {-hi, -lo}; }
};

}  // namespace edgewatch

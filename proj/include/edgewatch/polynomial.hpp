#pragma once

#include <complex>
#include <span>
#include <vector>

namespace edgewatch {

/// Real polynomial, coefficients in increasing degree order.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs);

    static Polynomial constant(double c) { return Polynomial({c}); }
    /// x - shift
    static Polynomial monomial_shift(double shift) { return Polynomial({-shift, 1.0}); }

    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    std::span<const double> coeffs() const noexcept { return coeffs_; }
    double leading() const { return coeffs_.back(); }

    double operator()(double x) const;
    std::complex<double> operator()(std::complex<double> z) const;
    /// Value and first derivative by Horner.
    std::pair<double, double> eval_with_derivative(double x) const;
    /// Sum of |c_i| |x|^i, the natural rounding scale of an evaluation at x.
    double magnitude_at(double x) const;

    Polynomial derivative() const;

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a);

private:
    void trim();
    std::vector<double> coeffs_{0.0};
};

/// All roots of a real polynomial as eigenvalues of its companion matrix.
std::vector<std::complex<double>> companion_roots(const Polynomial& poly);

/// Newton polish of an approximate real root. Stops on exact zero, on a
/// non-decreasing residual, or after `max_iter` steps; returns the iterate
/// with the smallest residual seen.
double polish_real_root(const Polynomial& poly, double x, int max_iter = 50);

}  // namespace edgewatch

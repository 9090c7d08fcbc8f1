#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "edgewatch/polynomial.hpp"
#include "edgewatch/summation.hpp"

using namespace edgewatch;

TEST_CASE("polynomial arithmetic and evaluation") {
    const Polynomial p({1.0, -3.0, 2.0});  // 2x^2 - 3x + 1 = (2x - 1)(x - 1)
    CHECK(p.degree() == 2);
    CHECK(p(0.5) == 0.0);
    CHECK(p(1.0) == 0.0);
    CHECK(p(std::complex<double>(0.0, 1.0)) == std::complex<double>(-1.0, -3.0));

    const auto [v, dv] = p.eval_with_derivative(2.0);
    CHECK(v == 3.0);
    CHECK(dv == 5.0);
    CHECK(p.derivative()(2.0) == 5.0);
    CHECK(p.magnitude_at(-1.0) == 6.0);

    const Polynomial q = Polynomial::monomial_shift(2.0) * Polynomial::monomial_shift(-2.0);
    CHECK(q.degree() == 2);
    CHECK(q(3.0) == 5.0);
    CHECK((q - q).degree() == 0);
    CHECK((q + (-q))(7.0) == 0.0);
}

TEST_CASE("companion roots recover a product of linear factors") {
    const std::vector<double> roots{-1.5, -0.25, 0.5, 2.0, 3.75};
    Polynomial p = Polynomial::constant(2.0);
    for (double r : roots) p = p * Polynomial::monomial_shift(r);
    auto found = companion_roots(p);
    std::vector<double> re;
    for (auto z : found) {
        CHECK(std::abs(z.imag()) < 1e-10);
        re.push_back(polish_real_root(p, z.real()));
    }
    std::sort(re.begin(), re.end());
    for (std::size_t i = 0; i < roots.size(); ++i) CHECK(re[i] == doctest::Approx(roots[i]).epsilon(1e-14));
}

TEST_CASE("compensated and double-double sums beat naive summation") {
    std::vector<double> terms{1.0, 1e-16, 1e-16, 1e-16, 1e-16, -1.0};
    double naive = 0.0;
    for (double t : terms) naive += t;
    CHECK(naive == 0.0);
    CHECK(pairwise_sum(terms) == doctest::Approx(4e-16).epsilon(1e-12));

    CompensatedSum s;
    for (double t : terms) s.add(t);
    CHECK(s.value() == doctest::Approx(4e-16).epsilon(1e-12));

    DoubleDouble acc;
    for (double t : terms) acc = acc + DoubleDouble(t);
    CHECK(acc.to_double() == doctest::Approx(4e-16).epsilon(1e-12));

    const DoubleDouble third = DoubleDouble(1.0) / DoubleDouble(3.0);
    const DoubleDouble back = third * DoubleDouble(3.0) - DoubleDouble(1.0);
    CHECK(std::abs(back.to_double()) < 1e-30);
}

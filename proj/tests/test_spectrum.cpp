#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "edgewatch/error.hpp"
#include "edgewatch/parallel.hpp"
#include "edgewatch/spectrum.hpp"

using namespace edgewatch;

namespace {

struct Dense {
    std::vector<double> values;
    std::vector<double> first;  // |phi(0)|^2
    std::vector<double> last;   // |phi(L)|^2
};

Dense dense_oracle(const Tridiagonal& h) {
    const auto n = static_cast<Eigen::Index>(h.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i, i) = h.diag[static_cast<std::size_t>(i)];
        if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = h.offdiag[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Dense d;
    for (Eigen::Index k = 0; k < n; ++k) {
        d.values.push_back(es.eigenvalues()(k));
        d.first.push_back(es.eigenvectors()(0, k) * es.eigenvectors()(0, k));
        d.last.push_back(es.eigenvectors()(n - 1, k) * es.eigenvectors()(n - 1, k));
    }
    return d;
}

}  // namespace

TEST_CASE("assemble") {
    const auto h = assemble(PeriodicPotential({0.0}), 2);
    CHECK(h.diag == std::vector<double>{0.0, 0.0, 0.0});
    CHECK(h.offdiag == std::vector<double>{1.0, 1.0});
    const auto h2 = assemble(PeriodicPotential({0.0, 3.0}), 4);
    CHECK(h2.diag == std::vector<double>{0.0, 3.0, 0.0, 3.0, 0.0});
    CHECK(h2.period == 2);
    CHECK_THROWS_AS(assemble(PeriodicPotential({0.0}), 0), Error);
}

TEST_CASE("free chain closed forms") {
    for (int L : {2, 9, 50}) {
        const auto sd = eigensystem(assemble(PeriodicPotential({0.0}), L));
        REQUIRE(sd.size() == static_cast<std::size_t>(L + 1));
        const double M = L + 2.0;
        for (int m = 1; m <= L + 1; ++m) {
            const auto k = static_cast<std::size_t>(L + 1 - m);  // ascending order
            const double lam = 2 * std::cos(m * std::numbers::pi / M);
            const double w = 2.0 / M * std::pow(std::sin(m * std::numbers::pi / M), 2);
            CHECK(std::abs(sd.lambdas[k] - lam) < 1e-10);
            CHECK(std::abs(sd.weights_end[k] - w) < 1e-10);
            CHECK(std::abs(sd.weights_start[k] - w) < 1e-10);
        }
        double sum = 0.0;
        for (double a : sd.weights_end) sum += a;
        CHECK(std::abs(sum - 1.0) < 1e-10);
    }
}

TEST_CASE("eigensystem agrees with a dense symmetric solver") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> vals(5);
    for (double& x : vals) x = u(rng);
    const auto h = assemble(PeriodicPotential(vals), 60);
    const auto sd = eigensystem(h);
    const auto d = dense_oracle(h);
    for (std::size_t k = 0; k < sd.size(); ++k) {
        CHECK(std::abs(sd.lambdas[k] - d.values[k]) < 1e-10);
        CHECK(std::abs(sd.weights_end[k] - d.last[k]) < 1e-10);
        CHECK(std::abs(sd.weights_start[k] - d.first[k]) < 1e-10);
    }
    double se = 0.0, ss = 0.0;
    for (std::size_t k = 0; k < sd.size(); ++k) {
        se += sd.weights_end[k];
        ss += sd.weights_start[k];
        CHECK(sd.weights_end[k] >= 0.0);
        CHECK(sd.weights_end[k] <= 1.0);
        if (k > 0) CHECK(sd.lambdas[k] > sd.lambdas[k - 1]);
    }
    CHECK(std::abs(se - 1.0) < 1e-10);
    CHECK(std::abs(ss - 1.0) < 1e-10);
}

TEST_CASE("Cauchy interlacing between L and L + 1") {
    const PeriodicPotential v({0.4, -1.3, 0.9});
    const auto a = tridiagonal_eigenvalues(assemble(v, 60));
    const auto b = tridiagonal_eigenvalues(assemble(v, 61));
    REQUIRE(b.size() == a.size() + 1);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(b[k] <= a[k]);
        CHECK(a[k] <= b[k + 1]);
    }
}

TEST_CASE("output does not depend on the thread count") {
    const auto h = assemble(PeriodicPotential({0.0, 3.0}), 300);
    set_thread_override(1);
    const auto s1 = eigensystem(h, {1e-13, 5});
    set_thread_override(4);
    const auto s4 = eigensystem(h, {1e-13, 5});
    set_thread_override(0);
    CHECK(s1.lambdas == s4.lambdas);
    CHECK(s1.weights_end == s4.weights_end);
    CHECK(s1.weights_start == s4.weights_start);
}

TEST_CASE("eigensystem error paths") {
    Tridiagonal h;
    h.diag = {1.0, 1.0, 2.0};
    h.offdiag = {0.0, 0.0};
    try {
        eigensystem(h);
        FAIL("expected ConvergenceFailure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConvergenceFailure);
        CHECK(e.index().has_value());
    }
    CHECK_THROWS_AS(eigensystem(assemble(PeriodicPotential({0.0}), 5), {1e-15, 0}), Error);
}

TEST_CASE("band enumeration") {
    SUBCASE("free chain: one band, local index equals global index") {
        const PeriodicPotential v({0.0});
        const auto sd = compute_spectral_data(v, 30, band_structure(v));
        for (std::size_t k = 0; k < sd.size(); ++k) {
            CHECK(sd.band_of[k] == 0);
            CHECK(sd.local_index[k] == static_cast<int>(k));
        }
    }
    SUBCASE("(0,3), L = 40: bands and outside eigenvalues partition the spectrum") {
        const PeriodicPotential v({0.0, 3.0});
        const auto bs = band_structure(v);
        const auto sd = compute_spectral_data(v, 40, bs);
        std::vector<int> per_band(bs.bands().size(), 0);
        for (std::size_t k = 0; k < sd.size(); ++k)
            if (sd.band_of[k] >= 0) ++per_band[static_cast<std::size_t>(sd.band_of[k])];
        CHECK(per_band[0] + per_band[1] + static_cast<int>(sd.outside_indices().size()) == 41);
        for (std::size_t k : sd.outside_indices())
            for (const auto& b : bs.bands()) CHECK(!b.contains(sd.lambdas[k], 1e-9));
    }
    SUBCASE("outside eigenvalues converge in L at fixed residue") {
        const PeriodicPotential v({0.0, 3.0, -1.0});
        const auto bs = band_structure(v);
        const auto a = compute_spectral_data(v, 400, bs);
        const auto b = compute_spectral_data(v, 403, bs);
        const auto oa = a.outside_indices();
        const auto ob = b.outside_indices();
        REQUIRE(oa.size() == ob.size());
        for (std::size_t i = 0; i < oa.size(); ++i)
            CHECK(std::abs(a.lambdas[oa[i]] - b.lambdas[ob[i]]) < 1e-6);
    }
}

TEST_CASE("quantization condition") {
    SUBCASE("free chain, L = 50") {
        const PeriodicPotential v({0.0});
        const auto bs = band_structure(v);
        const auto sd = compute_spectral_data(v, 50, bs);
        double worst = 0.0;
        for (const auto& r : quantization_residuals(sd, bs, v)) worst = std::max(worst, std::abs(r.value));
        CHECK(worst <= 1e-6);
    }
    SUBCASE("(0,3), L = 400 and L = 401, both bands") {
        const PeriodicPotential v({0.0, 3.0});
        const auto bs = band_structure(v);
        for (int L : {400, 401}) {
            const auto sd = compute_spectral_data(v, L, bs);
            const auto res = quantization_residuals(sd, bs, v);
            double worst = 0.0;
            int count0 = 0;
            for (const auto& r : res) {
                worst = std::max(worst, std::abs(r.value));
                count0 += r.band == 0 ? 1 : 0;
            }
            CHECK(count0 > 150);
            CHECK(worst <= 1e-5);
        }
    }
    SUBCASE("a period-3 potential") {
        const PeriodicPotential v({0.5, -0.7, 1.9});
        const auto bs = band_structure(v);
        const auto sd = compute_spectral_data(v, 301, bs);
        double worst = 0.0;
        for (const auto& r : quantization_residuals(sd, bs, v)) worst = std::max(worst, std::abs(r.value));
        CHECK(worst <= 1e-5);
    }
}

TEST_CASE("near-edge weight profile") {
    const PeriodicPotential v({0.0, 3.0});
    const auto bs = band_structure(v);
    const auto sd = compute_spectral_data(v, 400, bs);
    const auto edge = classify_edge(v, bs, -1.0, sd.j);
    const double eps = 0.2;
    const auto rows = weight_profile(sd, edge, eps);
    CHECK(rows.size() >= static_cast<std::size_t>(0.5 * eps * 400 / 10));
    CHECK(rows.size() <= static_cast<std::size_t>(2 * eps * 400));
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].distance > rows[i - 1].distance);

    // Spacing law: |lambda_k - lambda_n| L^2 / |k^2 - n^2| within one decade.
    double lo = 1e300, hi = 0.0;
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = a + 1; b < rows.size(); ++b) {
            const double ka = rows[a].k, kb = rows[b].k;
            const double r = std::abs(rows[b].distance - rows[a].distance) * 400.0 * 400.0 / (kb * kb - ka * ka);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    CHECK(hi / lo < 10.0);

    CHECK_THROWS_AS(weight_profile(compute_spectral_data(v, 20, bs), edge, 0.2), Error);
    CHECK_THROWS_AS(weight_profile(sd, edge, 0.6), Error);
}

TEST_CASE("weights are Lipschitz in lambda on the 1/L scale") {
    const PeriodicPotential v({0.0, 3.0});
    const auto bs = band_structure(v);
    auto lip = [&](int L) {
        const auto sd = compute_spectral_data(v, L, bs);
        const auto rows = weight_profile(sd, classify_edge(v, bs, -1.0, sd.j), 0.2);
        double m = 0.0;
        for (std::size_t a = 0; a < rows.size(); ++a)
            for (std::size_t b = a + 1; b < rows.size(); ++b)
                m = std::max(m, std::abs(rows[a].a_end - rows[b].a_end) * L /
                                    std::abs(rows[a].distance - rows[b].distance));
        return m;
    };
    const double c400 = lip(400);
    const double c800 = lip(800);
    CHECK(std::isfinite(c400));
    CHECK(c800 / c400 < 2.0);
    CHECK(c400 / c800 < 2.0);
}

#include "edgewatch/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "edgewatch/error.hpp"
#include "edgewatch/resonance.hpp"
#include "edgewatch/spectrum.hpp"
#include "edgewatch/winding.hpp"

namespace edgewatch {

namespace {

std::string sci(double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
}

SuiteResult guarded(const std::string& name, const std::function<SuiteResult()>& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        return {name, false, e.what()};
    }
}

// Random point off the real axis, |Im| spread over six decades.
Complex random_point(std::mt19937_64& rng, double x_lo, double x_hi) {
    std::uniform_real_distribution<double> ux(x_lo, x_hi);
    std::uniform_real_distribution<double> uexp(-6.0, 0.0);
    std::bernoulli_distribution upper(0.5);
    const double y = std::pow(10.0, uexp(rng));
    return {ux(rng), upper(rng) ? y : -y};
}

SuiteResult branch_identity(std::mt19937_64& rng) {
    double worst = 0.0;
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int i = 0; i < 1000; ++i) {
        Complex e(u(rng), u(rng));
        if (e.imag() == 0.0) continue;
        const Complex back = 2.0 * std::cos(theta(e));
        worst = std::max(worst, std::abs(back - e) / std::max(1.0, std::abs(e)));
    }
    return {"branch-identity", worst <= 1e-13, "max |2cos(theta(E)) - E| / max(1,|E|) = " + sci(worst)};
}

SuiteResult spectral_invariants(const SpectralData& sd) {
    double sum_end = 0.0, sum_start = 0.0;
    bool in_range = true, increasing = true;
    for (std::size_t k = 0; k < sd.size(); ++k) {
        sum_end += sd.weights_end[k];
        sum_start += sd.weights_start[k];
        in_range = in_range && sd.weights_end[k] >= 0.0 && sd.weights_end[k] <= 1.0 && sd.weights_start[k] >= 0.0 &&
                   sd.weights_start[k] <= 1.0;
        if (k > 0) increasing = increasing && sd.lambdas[k] > sd.lambdas[k - 1];
    }
    const double err = std::max(std::abs(sum_end - 1.0), std::abs(sum_start - 1.0));
    return {"spectral-data", err <= 1e-10 && in_range && increasing,
            "weight sum error " + sci(err) + (in_range ? "" : "; weight outside [0,1]") +
                (increasing ? "" : "; eigenvalues not increasing")};
}

SuiteResult quantization(const SpectralData& sd, const BandStructure& bs, const PeriodicPotential& v) {
    double worst = 0.0;
    for (const auto& r : quantization_residuals(sd, bs, v)) worst = std::max(worst, std::abs(r.value));
    return {"quantization", worst <= 1e-5, "max spacing residual " + sci(worst)};
}

SuiteResult sign_identity(const SpectralData& sd, std::mt19937_64& rng, double x_lo, double x_hi) {
    double worst = 0.0;
    int sign_errors = 0;
    for (int i = 0; i < 1000; ++i) {
        const Complex e = random_point(rng, x_lo, x_hi);
        const double a = s_l(sd, e).imag();
        const double b = im_s_l_direct(sd, e);
        worst = std::max(worst, std::abs(a - b) / std::abs(b));
        if (!(a * e.imag() > 0.0)) ++sign_errors;
    }
    return {"im-s-routes", worst <= 1e-12 && sign_errors == 0,
            "max relative difference " + sci(worst) + ", sign mismatches " + std::to_string(sign_errors)};
}

SuiteResult summation_accuracy(const SpectralData& sd, std::mt19937_64& rng, double x_lo, double x_hi) {
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const Complex e = random_point(rng, x_lo, x_hi);
        const Complex ref = s_l_reference(sd, e);
        worst = std::max(worst, std::abs(s_l(sd, e) - ref) / std::abs(ref));
    }
    return {"s-l-accuracy", worst <= 1e-12, "max relative error vs double-double " + sci(worst)};
}

SuiteResult derivative(const SpectralData& sd, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ux(-1.9, 1.9);
    std::uniform_real_distribution<double> uy(-0.5, -0.01);
    double worst = 0.0;
    const double h = 1e-6;
    for (int i = 0; i < 20; ++i) {
        const Complex e(ux(rng), uy(rng));
        const Complex fd = (f_value(sd, e + h) - f_value(sd, e - h)) / (2 * h);
        const Complex d = f_and_fprime(sd, e).fprime;
        worst = std::max(worst, std::abs(fd - d) / std::abs(d));
    }
    return {"f-derivative", worst <= 1e-5, "max relative finite-difference mismatch " + sci(worst)};
}

SuiteResult upper_half_plane(const SpectralData& sd) {
    const int w = winding_count(sd, Rect{-1.9, 1.9, 1e-3, 1.0});
    return {"upper-half-plane", w == 0, "zeros in [-1.9,1.9] + i[1e-3,1]: " + std::to_string(w)};
}

SuiteResult winding_oracles(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    std::uniform_int_distribution<int> count(0, 4);
    int failures = 0;
    for (int trial = 0; trial < 50; ++trial) {
        Rect r{u(rng), u(rng), u(rng), u(rng)};
        if (r.x_lo > r.x_hi) std::swap(r.x_lo, r.x_hi);
        if (r.y_lo > r.y_hi) std::swap(r.y_lo, r.y_hi);
        r.x_hi += 0.2;
        r.y_hi += 0.2;
        auto boundary_distance = [&](Complex c) {
            const double dx = std::min(std::abs(c.real() - r.x_lo), std::abs(c.real() - r.x_hi));
            const double dy = std::min(std::abs(c.imag() - r.y_lo), std::abs(c.imag() - r.y_hi));
            const bool inside_x = c.real() > r.x_lo && c.real() < r.x_hi;
            const bool inside_y = c.imag() > r.y_lo && c.imag() < r.y_hi;
            if (inside_x && inside_y) return std::min(dx, dy);
            if (inside_x) return dy;
            if (inside_y) return dx;
            return std::hypot(dx, dy);
        };
        auto draw = [&](int n) {
            std::vector<Complex> pts;
            while (static_cast<int>(pts.size()) < n) {
                const Complex c(u(rng), u(rng));
                if (boundary_distance(c) > 0.02) pts.push_back(c);
            }
            return pts;
        };
        const auto zeros = draw(count(rng));
        const auto poles = draw(count(rng));
        int expected = 0;
        auto inside = [&](Complex c) {
            return c.real() > r.x_lo && c.real() < r.x_hi && c.imag() > r.y_lo && c.imag() < r.y_hi;
        };
        for (auto c : zeros) expected += inside(c) ? 1 : 0;
        for (auto c : poles) expected -= inside(c) ? 1 : 0;
        const auto g = [&](Complex z) {
            Complex acc = 1.0;
            for (auto c : zeros) acc *= z - c;
            for (auto c : poles) acc /= z - c;
            return acc;
        };
        if (winding_count(g, r) != expected) ++failures;
    }
    return {"winding-oracles", failures == 0, std::to_string(failures) + " of 50 rational oracles miscounted"};
}

}  // namespace

std::vector<SuiteResult> run_property_suites(const PeriodicPotential& v, int L, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<SuiteResult> out;
    out.push_back(guarded("branch-identity", [&] { return branch_identity(rng); }));
    out.push_back(guarded("winding-oracles", [&] { return winding_oracles(rng); }));

    const BandStructure bs = band_structure(v);
    SpectralData sd;
    try {
        sd = compute_spectral_data(v, L, bs, {1e-13, seed});
    } catch (const std::exception& e) {
        out.push_back({"spectral-data", false, e.what()});
        return out;
    }
    const double x_lo = sd.lambdas.front() - 0.5;
    const double x_hi = sd.lambdas.back() + 0.5;
    out.push_back(guarded("spectral-data", [&] { return spectral_invariants(sd); }));
    out.push_back(guarded("quantization", [&] { return quantization(sd, bs, v); }));
    out.push_back(guarded("im-s-routes", [&] { return sign_identity(sd, rng, x_lo, x_hi); }));
    out.push_back(guarded("s-l-accuracy", [&] { return summation_accuracy(sd, rng, x_lo, x_hi); }));
    out.push_back(guarded("f-derivative", [&] { return derivative(sd, rng); }));
    out.push_back(guarded("upper-half-plane", [&] { return upper_half_plane(sd); }));
    return out;
}

}  // namespace edgewatch

// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "edgewatch/analysis.hpp"
#include "edgewatch/error.hpp"
#include "edgewatch/floquet.hpp"
#include "edgewatch/resonance.hpp"
#include "edgewatch/spectrum.hpp"
#include "edgewatch/winding.hpp"

using namespace edgewatch;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double limit_s;  // <= 0: no runtime bound
    std::function<Outcome()> run;
};

const PeriodicPotential& v03() {
    static const PeriodicPotential v{std::vector<double>{0.0, 3.0}};
    return v;
}

struct Edge {
    BandStructure bs = band_structure(v03());
    SpectralData sd;
    EdgeData edge;
    explicit Edge(int L) : sd(compute_spectral_data(v03(), L, bs)), edge(classify_edge(v03(), bs, -1.0, sd.j)) {}
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

// Least squares on logs, computed here rather than through the library.
struct LogFit {
    double slope = 0.0;
    double r2 = 0.0;
};

LogFit log_fit(const std::vector<std::pair<double, double>>& pts) {
    const double n = static_cast<double>(pts.size());
    double sx = 0, sy = 0;
    for (auto [x, y] : pts) {
        sx += std::log(x);
        sy += std::log(y);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (auto [x, y] : pts) {
        const double dx = std::log(x) - mx, dy = std::log(y) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    return {sxy / sxx, sxy * sxy / (sxx * syy)};
}

Outcome floquet_oracles() {
    // Delta = E (E - 3) - 2 for (0,3): |Delta| = 2 at E(E-3) in {0, 4}.
    const auto bs = band_structure(v03());
    const double expected[4] = {-1.0, 0.0, 3.0, 4.0};
    double worst = 0.0;
    bool ok = bs.bands().size() == 2;
    if (ok) {
        const double got[4] = {bs.bands()[0].lo, bs.bands()[0].hi, bs.bands()[1].lo, bs.bands()[1].hi};
        for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(got[i] - expected[i]));
        ok = worst <= 1e-10;
    }
    // V = 1 as a period-2 potential: Delta = (E - 1)^2 - 2, closed gap where Delta = -2.
    const auto flat = band_structure(PeriodicPotential({1.0, 1.0}));
    bool ok_flat = flat.bands().size() == 1;
    double gap_err = 1.0;
    if (ok_flat) {
        const Band& b = flat.bands()[0];
        ok_flat = std::abs(b.lo + 1.0) <= 1e-10 && std::abs(b.hi - 3.0) <= 1e-10 && b.closed_gaps == 1 &&
                  b.closed_gap_points.size() == 1;
        if (ok_flat) gap_err = std::abs(b.closed_gap_points[0] - 1.0);
        ok_flat = ok_flat && gap_err <= 1e-10;
    }
    return {ok && ok_flat, "edge error " + fmt(worst) + ", closed gap error " + fmt(gap_err)};
}

Outcome free_chain() {
    double worst_l = 0.0, worst_a = 0.0, worst_sum = 0.0;
    for (int L : {2, 9, 50}) {
        const auto sd = compute_spectral_data(PeriodicPotential({0.0}), L, band_structure(PeriodicPotential({0.0})));
        if (sd.size() != static_cast<std::size_t>(L + 1)) return {false, "wrong size at L = " + std::to_string(L)};
        const double M = L + 2.0;
        double sum = 0.0;
        for (int m = 1; m <= L + 1; ++m) {
            const auto k = static_cast<std::size_t>(L + 1 - m);
            const double s = std::sin(m * std::numbers::pi / M);
            worst_l = std::max(worst_l, std::abs(sd.lambdas[k] - 2 * std::cos(m * std::numbers::pi / M)));
            worst_a = std::max(worst_a, std::abs(sd.weights_end[k] - 2.0 / M * s * s));
            sum += sd.weights_end[k];
        }
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    }
    return {worst_l <= 1e-10 && worst_a <= 1e-10 && worst_sum <= 1e-10,
            "eigenvalue error " + fmt(worst_l) + ", weight error " + fmt(worst_a) + ", sum error " + fmt(worst_sum)};
}

Outcome genericity() {
    const auto bs = band_structure(v03());
    const auto e0 = classify_edge(v03(), bs, -1.0, 0);
    const auto e1 = classify_edge(v03(), bs, -1.0, 1);
    const bool ok = e0.classification == EdgeClass::GenericA && e1.classification == EdgeClass::GenericA &&
                    std::abs(e0.d_j1 + 1.0) <= 1e-12 && std::abs(e1.d_j1 - 2.0) <= 1e-12;
    return {ok, "j=0: " + std::string(to_string(e0.classification)) + " d=" + fmt(e0.d_j1) +
                    "; j=1: " + std::string(to_string(e1.classification)) + " d=" + fmt(e1.d_j1)};
}

Outcome quantization() {
    const auto bs = band_structure(v03());
    const auto sd = compute_spectral_data(v03(), 400, bs);
    double worst = 0.0;
    int pairs = 0;
    for (const auto& r : quantization_residuals(sd, bs, v03()))
        if (r.band == 0) {
            worst = std::max(worst, std::abs(r.value));
            ++pairs;
        }
    return {pairs > 0 && worst <= 1e-5, std::to_string(pairs) + " pairs, max residual " + fmt(worst)};
}

Outcome uniqueness() {
    const Edge s(400);
    SweepOptions opts;
    opts.fail_on_count_mismatch = false;
    const auto res = sweep_band_edge(s.sd, s.edge, opts);
    bool ok = res.size() == 9;
    double worst_res = 0.0;
    int ones = 0, inside = 0;
    for (const auto& r : res) {
        const int c = count_in_box(s.sd, r.box);
        ones += c == 1;
        inside += r.shallow_box.contains(r.z) && r.z.imag() < 0.0;
        worst_res = std::max(worst_res, r.residual);
    }
    ok = ok && ones == 9 && inside == 9 && worst_res <= 1e-10;
    return {ok, std::to_string(res.size()) + " boxes, " + std::to_string(ones) + " with count 1, " +
                    std::to_string(inside) + " in M_n, max residual " + fmt(worst_res)};
}

Outcome free_region() {
    const Edge s(400);
    const auto rep = free_region_report(s.sd, s.bs, s.edge, 0.2);
    const bool box_ok = rep.box.x_lo == -1.2 && rep.box.x_hi == -1.0 && rep.box.depth == std::pow(0.2, 5);
    return {box_ok && rep.count == 0, "count " + std::to_string(rep.count) + ", shifted n=0 box count " +
                                          std::to_string(rep.shifted_box_count)};
}

Outcome width_in_n(const std::vector<Resonance>& res) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : res)
        if (r.n >= 3 && r.n <= 20) pts.emplace_back(r.n + 1.0, std::abs(r.z.imag()));
    if (pts.size() != 18) return {false, "only " + std::to_string(pts.size()) + " resonances with 3 <= n <= 20"};
    const auto f = log_fit(pts);
    return {std::abs(f.slope - 2.0) <= 0.3 && f.r2 >= 0.95, "slope " + fmt(f.slope) + ", R^2 " + fmt(f.r2)};
}

Outcome width_in_L() {
    const std::vector<int> Ls{250, 500, 1000, 2000};
    auto track = [&](const std::function<int(int)>& n_of_L) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : l_scaling_points(v03(), -1.0, Ls, n_of_L)) pts.emplace_back(p.L, p.abs_im_z);
        return log_fit(pts);
    };
    const auto fixed = track([](int) { return 3; });
    const auto prop = track([](int L) { return static_cast<int>(std::floor(0.02 * L)); });
    return {std::abs(fixed.slope + 3.0) <= 0.3 && std::abs(prop.slope + 1.0) <= 0.4,
            "fixed n=3 slope " + fmt(fixed.slope) + ", n=floor(0.02L) slope " + fmt(prop.slope)};
}

Outcome eigen_laws() {
    const Edge s(1000);
    const auto rows = weight_profile(s.sd, s.edge, 0.2);
    std::vector<std::pair<double, double>> dist, weight, spacing;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].k < 3) continue;
        const double k1 = rows[r].k + 1.0;
        dist.emplace_back(k1, rows[r].distance);
        weight.emplace_back(k1, rows[r].a_end);
        if (r + 1 < rows.size()) spacing.emplace_back(k1, rows[r + 1].distance - rows[r].distance);
    }
    const auto d = log_fit(dist), w = log_fit(weight), sp = log_fit(spacing);
    const bool ok = std::abs(d.slope - 2.0) <= 0.2 && std::abs(w.slope - 2.0) <= 0.3 &&
                    std::abs(sp.slope - 1.0) <= 0.3 && std::min({d.r2, w.r2, sp.r2}) >= 0.95;
    return {ok, "lambda " + fmt(d.slope) + " (R^2 " + fmt(d.r2) + "), a " + fmt(w.slope) + " (R^2 " + fmt(w.r2) +
                    "), spacing " + fmt(sp.slope) + " (R^2 " + fmt(sp.r2) + "), " + std::to_string(rows.size()) +
                    " rows"};
}

Outcome seed_formula(const std::vector<Resonance>& res1000) {
    auto max_ratio = [](int L) {
        const Edge s(L);
        const auto res = sweep_band_edge(s.sd, s.edge);
        double m = 0.0;
        for (const auto& r : res) {
            const double err = std::abs(r.offset - r.seed_offset);
            m = std::max(m, err * std::pow(L, 5.0) * std::pow(std::abs(r.alpha_n), 3) / std::pow(r.n + 1.0, 4));
        }
        return m;
    };
    const double r400 = max_ratio(400);
    const double r800 = max_ratio(800);
    int bad = 0, verified = 0;
    for (const auto& r : res1000) {
        if (!r.verified()) continue;
        ++verified;
        bad += !(std::abs(r.offset - r.seed_offset) < std::abs(r.z.imag()));
    }
    return {r800 <= 4 * r400 && bad == 0 && verified > 0,
            "max ratio L=400 " + fmt(r400) + ", L=800 " + fmt(r800) + "; seed error >= |Im z| for " +
                std::to_string(bad) + " of " + std::to_string(verified) + " at L=1000"};
}

Outcome small_im_s() {
    const Edge s(400);
    constexpr double eps = 0.2;
    std::ostringstream d;
    bool ok = true;
    // The criterion's C0 = 50 leaves A_{n,eps} empty at L = 400 for n >= 1.
    for (int n : {1, 2, 4}) {
        try {
            im_s_grid(s.sd, s.edge, n, eps, 50.0, 30);
            d << "n=" << n << " C0=50 non-empty; ";
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::EmptyRegion) throw;
            d << "n=" << n << " C0=50 empty; ";
        }
    }
    for (int n : {1, 2, 4}) {
        const auto g = im_s_grid(s.sd, s.edge, n, eps, 5.0, 30);
        ok = ok && g.max_abs_im_s <= 10 * eps && g.max_abs_im_s < g.min_abs_im_exp;
        d << "n=" << n << " C0=5 max|Im S| " << fmt(g.max_abs_im_s) << " < " << fmt(g.min_abs_im_exp) << "; ";
    }
    std::string text = d.str();
    text.resize(text.size() - 2);
    return {ok, text};
}

Outcome winding_exactness() {
    using C = std::complex<double>;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_int_distribution<int> count(0, 6);
    int agree = 0;
    for (int trial = 0; trial < 50; ++trial) {
        Rect r{u(rng), u(rng), u(rng), u(rng)};
        if (r.x_lo > r.x_hi) std::swap(r.x_lo, r.x_hi);
        if (r.y_lo > r.y_hi) std::swap(r.y_lo, r.y_hi);
        r.x_hi += 0.05;
        r.y_hi += 0.05;
        auto away = [&](C c) {
            return std::min({std::abs(c.real() - r.x_lo), std::abs(c.real() - r.x_hi), std::abs(c.imag() - r.y_lo),
                             std::abs(c.imag() - r.y_hi)}) > 1e-3;
        };
        std::vector<C> zeros, poles;
        for (auto* set : {&zeros, &poles}) {
            const int n = count(rng);
            while (static_cast<int>(set->size()) < n) {
                const C c(u(rng), u(rng));
                if (away(c)) set->push_back(c);
            }
        }
        auto inside = [&](C c) {
            return c.real() > r.x_lo && c.real() < r.x_hi && c.imag() > r.y_lo && c.imag() < r.y_hi;
        };
        int expected = 0;
        for (C c : zeros) expected += inside(c);
        for (C c : poles) expected -= inside(c);
        const auto g = [&](C z) {
            C acc(0.5, -1.5);
            for (C c : zeros) acc *= z - c;
            for (C c : poles) acc /= z - c;
            return acc;
        };
        agree += winding_count(g, r) == expected;
    }
    return {agree == 50, std::to_string(agree) + " of 50 exact"};
}

Outcome summation_identity() {
    const Edge s(400);
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> re(-3.0, 5.0);
    std::uniform_real_distribution<double> lg(-8.0, 0.0);
    std::bernoulli_distribution up(0.5);
    double worst = 0.0;
    int sign_bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const double y = (up(rng) ? 1.0 : -1.0) * std::pow(10.0, lg(rng));
        const Complex e(re(rng), y);
        const double a = s_l(s.sd, e).imag();
        const double b = im_s_l_direct(s.sd, e);
        worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
        sign_bad += (a > 0) != (y > 0) || (b > 0) != (y > 0);
    }
    return {worst <= 1e-12 && sign_bad == 0, "max relative gap " + fmt(worst) + ", sign mismatches " +
                                                 std::to_string(sign_bad)};
}

}  // namespace

int main() {
    std::vector<Resonance> res1000;
    auto sweep1000 = [&]() -> const std::vector<Resonance>& {
        if (res1000.empty()) {
            const Edge s(1000);
            res1000 = sweep_band_edge(s.sd, s.edge);
        }
        return res1000;
    };

    const std::vector<Criterion> criteria{
        {1, "floquet oracles", 1.0, floquet_oracles},
        {2, "free-chain spectral oracle", 1.0, free_chain},
        {3, "genericity classifier", 1.0, genericity},
        {4, "quantization condition", 10.0, quantization},
        {5, "uniqueness in B_n", 120.0, uniqueness},
        {6, "resonance-free region", 60.0, free_region},
        {7, "width scaling in n", 300.0, [&] { return width_in_n(sweep1000()); }},
        {8, "width scaling in L", 900.0, width_in_L},
        {9, "eigenvalue and weight laws", 60.0, eigen_laws},
        {10, "seed formula", 0.0, [&] { return seed_formula(sweep1000()); }},
        {11, "small Im S region", 30.0, small_im_s},
        {12, "winding-counter exactness", 10.0, winding_exactness},
        {13, "summation identity", 5.0, summation_identity},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const Error& e) {
            o = {false, std::string(to_string(e.kind())) + ": " + e.what()};
        } catch (const std::exception& e) {
            o = {false, e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.limit_s <= 0.0 || secs < c.limit_s;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("[%s] %2d %s (%.2f s%s): %s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                    in_time ? "" : ", over time limit", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}

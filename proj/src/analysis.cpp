#include "edgewatch/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "edgewatch/error.hpp"

namespace edgewatch {

PowerLawFit fit_power_law(std::span<const std::pair<double, double>> points, std::string x_name,
                          std::string y_name) {
    if (points.size() < 4)
        throw Error(ErrorKind::TooFewPoints, "a power-law fit needs at least 4 points, got " +
                                                 std::to_string(points.size()));
    const auto n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
            throw Error(ErrorKind::InvalidArgument, "power-law fit needs finite positive data");
        mx += std::log(x);
        my += std::log(y);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : points) {
        const double dx = std::log(x) - mx;
        const double dy = std::log(y) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw Error(ErrorKind::DegenerateData, "all abscissae coincide");
    PowerLawFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (const auto& [x, y] : points) {
        const double r = std::log(y) - (fit.intercept + fit.slope * std::log(x));
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    fit.n_points = static_cast<int>(points.size());
    fit.x_name = std::move(x_name);
    fit.y_name = std::move(y_name);
    return fit;
}

bool ScalingReport::pass() const {
    return std::all_of(fits.begin(), fits.end(), [](const FitCheck& f) { return f.pass; });
}

namespace {

FitCheck check(PowerLawFit fit, double expected, double tolerance, std::string note = {}) {
    FitCheck c;
    // R^2 says nothing about a flat law.
    const bool explained = expected == 0.0 || fit.r_squared >= 0.95;
    c.pass = std::abs(fit.slope - expected) <= tolerance && explained;
    c.fit = std::move(fit);
    c.expected = expected;
    c.tolerance = tolerance;
    c.note = std::move(note);
    return c;
}

}  // namespace

ScalingReport scaling_report(const SpectralData& sd, std::span<const Resonance> resonances, const EdgeData& edge,
                             double eps) {
    if (!(std::abs(edge.e0) < 2.0))
        throw Error(ErrorKind::OutOfDomain,
                    "edge " + std::to_string(edge.e0) + " is not inside (-2, 2), where resonances are defined");
    const auto rows = weight_profile(sd, edge, eps);

    ScalingReport rep;
    rep.e0 = edge.e0;
    rep.classification = edge.classification;
    rep.L = sd.L;
    rep.eps = eps;

    std::vector<std::pair<double, double>> dist, weight, spacing;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].k < kFitFirstIndex) continue;
        const double k1 = rows[r].k + 1.0;
        dist.emplace_back(k1, rows[r].distance);
        weight.emplace_back(k1, rows[r].a_end);
        if (r + 1 < rows.size()) spacing.emplace_back(k1, rows[r + 1].distance - rows[r].distance);
    }
    rep.fits.push_back(check(fit_power_law(dist, "k+1", "lambda_k-E0"), 2.0, 0.3));
    if (edge.is_generic()) {
        rep.fits.push_back(check(fit_power_law(weight, "k+1", "a_k"), 2.0, 0.3));
    } else {
        auto c = check(fit_power_law(weight, "k+1", "a_k"), 0.0, 0.3, "non-generic edge: a_k ~ 1/L expected");
        rep.notes.push_back("edge classified " + std::string(to_string(edge.classification)) +
                            "; weights do not vanish at the edge");
        rep.fits.push_back(std::move(c));
    }
    rep.fits.push_back(check(fit_power_law(spacing, "k+1", "lambda_{k+1}-lambda_k"), 1.0, 0.3));

    if (edge.is_generic()) {
        if (resonances.size() < 5)
            throw Error(ErrorKind::TooFewPoints, "need at least 5 resonances for the width fit");
        std::vector<std::pair<double, double>> width;
        for (const auto& r : resonances)
            if (r.n >= kFitFirstIndex) width.emplace_back(r.n + 1.0, std::abs(r.z.imag()));
        rep.fits.push_back(check(fit_power_law(width, "n+1", "|Im z_n|"), 2.0, 0.3));
    } else {
        rep.notes.push_back("width fit omitted for a non-generic edge");
    }
    return rep;
}

PowerLawFit l_scaling(std::span<const LPoint> points, bool require_same_n) {
    std::set<int> Ls, js, ns;
    for (const auto& p : points) {
        Ls.insert(p.L);
        js.insert(p.j);
        ns.insert(p.n);
    }
    if (Ls.size() < 3) throw Error(ErrorKind::TooFewPoints, "need at least 3 distinct values of L");
    if (js.size() > 1) throw Error(ErrorKind::MixedResidues, "values of L have different residues mod p");
    if (require_same_n && ns.size() > 1) throw Error(ErrorKind::InvalidArgument, "points mix different n");
    std::vector<std::pair<double, double>> xy;
    for (const auto& p : points) xy.emplace_back(static_cast<double>(p.L), p.abs_im_z);
    return fit_power_law(xy, "L", "|Im z_n|");
}

std::vector<LPoint> l_scaling_points(const PeriodicPotential& v, double e0, std::span<const int> Ls,
                                     const std::function<int(int)>& n_of_L, const SweepOptions& opts,
                                     const EigensystemOptions& eig) {
    const BandStructure bs = band_structure(v);
    const double edge_energy = find_edge(bs, e0, 1e-6).energy;
    std::vector<LPoint> out;
    for (int L : Ls) {
        const SpectralData sd = compute_spectral_data(v, L, bs, eig);
        const EdgeData edge = classify_edge(v, bs, edge_energy, sd.j);
        if (!edge.is_generic())
            throw Error(ErrorKind::NonGenericEdge, "edge is not generic for L = " + std::to_string(L));
        const int n = n_of_L(L);
        const Resonance r = resonance_at(sd, edge, n, opts);
        out.push_back({L, sd.j, n, std::abs(r.z.imag())});
    }
    return out;
}

SeedAccuracy seed_accuracy(std::span<const Resonance> resonances, int L) {
    if (resonances.empty()) throw Error(ErrorKind::TooFewPoints, "no resonances given");
    SeedAccuracy out;
    out.L = L;
    const double L5 = std::pow(static_cast<double>(L), 5);
    for (const auto& r : resonances) {
        SeedAccuracyRow row;
        row.n = r.n;
        row.error = std::abs(r.offset - r.seed_offset);
        row.abs_im_z = std::abs(r.z.imag());
        row.ratio = row.error * L5 * std::pow(std::abs(r.alpha_n), 3) / std::pow(r.n + 1.0, 4);
        out.max_ratio = std::max(out.max_ratio, row.ratio);
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace edgewatch

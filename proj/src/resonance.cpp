#include "edgewatch/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "edgewatch/parallel.hpp"
#include "edgewatch/summation.hpp"

namespace edgewatch {

namespace {

double pole_tolerance(const SpectralData& sd) { return 1e-14 * std::max(1.0, sd.spectral_radius()); }

// sqrt(1 - w^2) with its cuts on the real axis outside [-1, 1].
Complex root_factor(Complex e) {
    const Complex w = 0.5 * e;
    return std::sqrt(1.0 - w) * std::sqrt(1.0 + w);
}

void require_off_cut(Complex e) {
    if (e.imag() == 0.0 && std::abs(e.real()) >= 2.0)
        throw Error(ErrorKind::OnBranchCut, "E = " + std::to_string(e.real()) + " lies on a cut of theta");
}

struct ComplexSum {
    CompensatedSum re, im;
    void add(Complex z) {
        re.add(z.real());
        im.add(z.imag());
    }
    Complex value() const { return {re.value(), im.value()}; }
};

std::size_t nearest_eigenvalue(const SpectralData& sd, double x) {
    const auto it = std::lower_bound(sd.lambdas.begin(), sd.lambdas.end(), x);
    if (it == sd.lambdas.begin()) return 0;
    if (it == sd.lambdas.end()) return sd.size() - 1;
    const auto hi = static_cast<std::size_t>(it - sd.lambdas.begin());
    return (x - sd.lambdas[hi - 1] <= *it - x) ? hi - 1 : hi;
}

}  // namespace

Complex theta(Complex e) {
    require_off_cut(e);
    return -std::acos(0.5 * e);
}

Complex exp_minus_i_theta(Complex e) {
    require_off_cut(e);
    return 0.5 * e + Complex(0.0, 1.0) * root_factor(e);
}

Complex theta_prime(Complex e) {
    require_off_cut(e);
    return 0.5 / root_factor(e);
}

Complex s_l(const SpectralData& sd, Complex e) {
    const double tol = pole_tolerance(sd);
    ComplexSum sum;
    for (std::size_t k = 0; k < sd.size(); ++k) {
        const Complex d = sd.lambdas[k] - e;
        if (std::abs(d) <= tol)
            throw Error(ErrorKind::PoleHit, "E coincides with eigenvalue " + std::to_string(k),
                        static_cast<std::int64_t>(k));
        sum.add(sd.weights_end[k] / d);
    }
    return sum.value();
}

double im_s_l_direct(const SpectralData& sd, Complex e) {
    const double tol = pole_tolerance(sd);
    CompensatedSum sum;
    for (std::size_t k = 0; k < sd.size(); ++k) {
        const double u = sd.lambdas[k] - e.real();
        const double m2 = u * u + e.imag() * e.imag();
        if (std::sqrt(m2) <= tol)
            throw Error(ErrorKind::PoleHit, "E coincides with eigenvalue " + std::to_string(k),
                        static_cast<std::int64_t>(k));
        sum.add(sd.weights_end[k] / m2);
    }
    return e.imag() * sum.value();
}

Complex s_l_reference(const SpectralData& sd, Complex e) {
    const double tol = pole_tolerance(sd);
    DoubleDouble re, im;
    const DoubleDouble y(e.imag());
    for (std::size_t k = 0; k < sd.size(); ++k) {
        const DoubleDouble u = DoubleDouble(sd.lambdas[k]) - DoubleDouble(e.real());
        const DoubleDouble m2 = u * u + y * y;
        if (std::sqrt(m2.to_double()) <= tol)
            throw Error(ErrorKind::PoleHit, "E coincides with eigenvalue " + std::to_string(k),
                        static_cast<std::int64_t>(k));
        const DoubleDouble scale = DoubleDouble(sd.weights_end[k]) / m2;
        re = re + scale * u;
        im = im + scale * y;
    }
    return {re.to_double(), im.to_double()};
}

Complex f_value(const SpectralData& sd, Complex e) { return s_l(sd, e) + exp_minus_i_theta(e); }

FValue f_and_fprime(const SpectralData& sd, Complex e) {
    const double tol = pole_tolerance(sd);
    ComplexSum s, ds;
    for (std::size_t k = 0; k < sd.size(); ++k) {
        const Complex d = sd.lambdas[k] - e;
        if (std::abs(d) <= tol)
            throw Error(ErrorKind::PoleHit, "E coincides with eigenvalue " + std::to_string(k),
                        static_cast<std::int64_t>(k));
        const Complex t = sd.weights_end[k] / d;
        s.add(t);
        ds.add(t / d);
    }
    const Complex em = exp_minus_i_theta(e);
    return {s.value() + em, ds.value() - Complex(0.0, 1.0) * theta_prime(e) * em};
}

FValue f_and_fprime_anchored(const SpectralData& sd, std::size_t anchor, Complex offset) {
    if (anchor >= sd.size()) throw Error(ErrorKind::InvalidArgument, "anchor index out of range");
    if (offset == Complex(0.0))
        throw Error(ErrorKind::PoleHit, "evaluation at an eigenvalue", static_cast<std::int64_t>(anchor));
    const double tol = pole_tolerance(sd);
    const double la = sd.lambdas[anchor];
    ComplexSum s, ds;
    for (std::size_t k = 0; k < sd.size(); ++k) {
        if (k == anchor) continue;
        const Complex d = (sd.lambdas[k] - la) - offset;
        if (std::abs(d) <= tol)
            throw Error(ErrorKind::PoleHit, "E coincides with eigenvalue " + std::to_string(k),
                        static_cast<std::int64_t>(k));
        const Complex t = sd.weights_end[k] / d;
        s.add(t);
        ds.add(t / d);
    }
    const Complex t = -sd.weights_end[anchor] / offset;
    s.add(t);
    ds.add(-t / offset);
    const Complex e = la + offset;
    const Complex em = exp_minus_i_theta(e);
    return {s.value() + em, ds.value() - Complex(0.0, 1.0) * theta_prime(e) * em};
}

AlphaSeed alpha_and_seed(const SpectralData& sd, std::size_t global) {
    if (global >= sd.size()) throw Error(ErrorKind::InvalidArgument, "eigenvalue index out of range");
    const double lg = sd.lambdas[global];
    if (!(std::abs(lg) < 2.0))
        throw Error(ErrorKind::OnBranchCut, "eigenvalue outside (-2, 2)", static_cast<std::int64_t>(global));
    const double tol = pole_tolerance(sd);
    CompensatedSum sum;
    for (std::size_t k = 0; k < sd.size(); ++k) {
        if (k == global) continue;
        const double d = sd.lambdas[k] - lg;
        if (std::abs(d) <= tol)
            throw Error(ErrorKind::PoleHit, "coincident eigenvalues", static_cast<std::int64_t>(k));
        sum.add(sd.weights_end[k] / d);
    }
    const Complex alpha = sum.value() + exp_minus_i_theta(Complex(lg, 0.0));
    const Complex offset = sd.weights_end[global] / alpha;
    return {alpha, lg + offset, offset};
}

NewtonResult newton_refine(const SpectralData& sd, Complex seed, const NewtonOptions& opts) {
    const std::size_t anchor = nearest_eigenvalue(sd, seed.real());
    return newton_refine_anchored(sd, anchor, seed - sd.lambdas[anchor], opts);
}

NewtonResult newton_refine_anchored(const SpectralData& sd, std::size_t anchor, Complex offset,
                                    const NewtonOptions& opts) {
    if (!(offset.imag() < 0.0)) throw Error(ErrorKind::InvalidArgument, "Newton seed must lie below the real axis");
    NewtonResult r;
    r.anchor = anchor;
    r.offset = offset;
    FValue fv = f_and_fprime_anchored(sd, r.anchor, r.offset);
    r.residual = std::abs(fv.f);
    for (;;) {
        r.z = sd.lambdas[r.anchor] + r.offset;
        if (r.residual <= opts.tol) return r;
        if (r.iters >= opts.max_iter)
            throw NoConvergenceError("Newton iteration did not reach |f| <= " + std::to_string(opts.tol), r.z,
                                     r.residual);
        ++r.iters;
        const Complex step = -fv.f / fv.fprime;
        Complex next = r.offset;
        FValue next_fv = fv;
        double t = 1.0;
        for (int halving = 0; halving <= 8; ++halving, t *= 0.5) {
            next = r.offset + t * step;
            if (!(next.imag() < 0.0)) next.imag(0.5 * r.offset.imag());
            next_fv = f_and_fprime_anchored(sd, r.anchor, next);
            if (std::abs(next_fv.f) < r.residual) break;
        }
        // Re-anchor when the iterate has moved closer to another eigenvalue.
        const std::size_t nearest = nearest_eigenvalue(sd, sd.lambdas[r.anchor] + next.real());
        if (nearest != r.anchor) {
            next += sd.lambdas[r.anchor] - sd.lambdas[nearest];
            r.anchor = nearest;
            next_fv = f_and_fprime_anchored(sd, r.anchor, next);
        }
        r.offset = next;
        fv = next_fv;
        r.residual = std::abs(fv.f);
    }
}

std::string_view to_string(BoxConvention c) {
    switch (c) {
        case BoxConvention::EdgeReflected: return "edge-reflected";
        case BoxConvention::EpsShifted: return "eps-shifted";
        case BoxConvention::Explicit: return "explicit";
    }
    return "unknown";
}

int winding_count(const SpectralData& sd, const Rect& rect, const WindingOptions& opts) {
    if (rect.y_lo == 0.0 || rect.y_hi == 0.0)
        throw Error(ErrorKind::InvalidArgument, "contour side lies on the real axis");
    if (rect.y_lo < 0.0 && rect.y_hi > 0.0) {
        for (double x : {rect.x_lo, rect.x_hi}) {
            if (!(std::abs(x) < 2.0))
                throw Error(ErrorKind::OnBranchCut, "contour crosses the real axis outside (-2, 2)");
            const double tol = 1e-10 * std::max(1.0, sd.spectral_radius());
            const std::size_t k = nearest_eigenvalue(sd, x);
            if (std::abs(sd.lambdas[k] - x) <= tol)
                throw Error(ErrorKind::EdgeTooCloseToEigenvalue,
                            "contour side passes through eigenvalue " + std::to_string(k),
                            static_cast<std::int64_t>(k));
        }
    }
    return winding_count([&sd](Complex e) { return f_value(sd, e); }, rect, opts);
}

int count_in_box(const SpectralData& sd, const ResonanceBox& box, double delta, const WindingOptions& opts) {
    if (!(box.x_lo < box.x_hi) || !(box.depth > 0.0))
        throw Error(ErrorKind::InvalidArgument, "box must have positive width and depth");
    int poles = 0;
    double nearest_side = std::numeric_limits<double>::infinity();
    for (double x : sd.lambdas) {
        if (x > box.x_lo && x < box.x_hi) {
            ++poles;
            nearest_side = std::min({nearest_side, x - box.x_lo, box.x_hi - x});
        }
    }
    if (!(delta > 0.0)) delta = poles > 0 ? 0.1 * nearest_side : std::min(box.depth, 0.1 * (box.x_hi - box.x_lo));
    const int w = winding_count(sd, Rect{box.x_lo, box.x_hi, -box.depth, delta}, opts);
    return w + poles;
}

ResonanceBox resonance_box(const SpectralData& sd, const EdgeData& edge, int n, double eps,
                           BoxConvention convention) {
    if (n < 0) throw Error(ErrorKind::InvalidArgument, "box index must be non-negative");
    const auto idx = edge_local_indices(sd, edge);
    if (static_cast<std::size_t>(n) + 1 >= idx.size())
        throw Error(ErrorKind::InvalidArgument,
                    "band holds only " + std::to_string(idx.size()) + " eigenvalues near the edge",
                    static_cast<std::int64_t>(n));
    const double outward = edge.side == EdgeSide::Left ? -1.0 : 1.0;
    const double ln = sd.lambdas[idx[static_cast<std::size_t>(n)]];
    const double next = sd.lambdas[idx[static_cast<std::size_t>(n) + 1]];
    double prev = 0.0;
    if (n > 0) {
        prev = sd.lambdas[idx[static_cast<std::size_t>(n) - 1]];
    } else if (convention == BoxConvention::EpsShifted) {
        prev = 2.0 * (edge.e0 + outward * eps) - ln;
    } else {
        convention = BoxConvention::EdgeReflected;
        prev = 2.0 * edge.e0 - ln;
    }
    if (n > 0) convention = BoxConvention::EdgeReflected;
    const double m1 = 0.5 * (prev + ln);
    const double m2 = 0.5 * (ln + next);
    return {std::min(m1, m2), std::max(m1, m2), std::pow(eps, 5), n, convention};
}

Resonance resonance_at(const SpectralData& sd, const EdgeData& edge, int n, const SweepOptions& opts) {
    Resonance r;
    r.band = edge.band_index;
    r.n = n;
    r.box = resonance_box(sd, edge, n, opts.eps);
    r.shallow_box = r.box;
    r.shallow_box.depth = opts.C0 * (n + 1) / (static_cast<double>(sd.L) * sd.L);
    r.global = edge_local_indices(sd, edge)[static_cast<std::size_t>(n)];
    r.lambda_n = sd.lambdas[r.global];
    r.a_n = sd.weights_end[r.global];
    const AlphaSeed as = alpha_and_seed(sd, r.global);
    r.alpha_n = as.alpha;
    r.seed = as.seed;
    r.seed_offset = as.seed_offset;
    const NewtonResult nr = newton_refine_anchored(sd, r.global, as.seed_offset, opts.newton);
    r.z = nr.z;
    r.offset = nr.z - r.lambda_n;
    if (nr.anchor == r.global) r.offset = nr.offset;
    r.residual = nr.residual;
    r.newton_iters = nr.iters;
    r.box_count = count_in_box(sd, r.box, 0.0, opts.winding);
    if (r.box_count != 1 && opts.fail_on_count_mismatch)
        throw Error(ErrorKind::UniquenessFailed,
                    "box " + std::to_string(n) + " holds " + std::to_string(r.box_count) + " zeros",
                    static_cast<std::int64_t>(n));
    r.winding_verified = r.box_count == 1 && r.box.contains(r.z);
    r.in_shallow_box = r.shallow_box.contains(r.z);
    return r;
}

std::vector<Resonance> sweep_band_edge(const SpectralData& sd, const EdgeData& edge, const SweepOptions& opts) {
    if (!edge.is_generic())
        throw Error(ErrorKind::NonGenericEdge,
                    "edge " + std::to_string(edge.e0) + " is " + std::string(to_string(edge.classification)));
    if (!(opts.eps > 0.0 && opts.eps <= 0.3)) throw Error(ErrorKind::InvalidArgument, "eps must lie in (0, 0.3]");
    if (!(opts.C0 > 0.0 && opts.C1 > 0.0)) throw Error(ErrorKind::InvalidArgument, "C0 and C1 must be positive");
    const double reach = sd.L * opts.eps / opts.C1;
    if (reach < 3.0) throw Error(ErrorKind::InvalidArgument, "L * eps / C1 must be at least 3");
    const auto count = static_cast<std::size_t>(std::floor(reach)) + 1;
    std::vector<Resonance> out(count);
    parallel_for(count, [&](std::size_t n) { out[n] = resonance_at(sd, edge, static_cast<int>(n), opts); });
    return out;
}

FreeRegionReport free_region_report(const SpectralData& sd, const BandStructure& bs, const EdgeData& edge,
                                    double eps, const WindingOptions& opts) {
    if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be positive");
    const auto& bands = bs.bands();
    const auto b = static_cast<std::size_t>(edge.band_index);
    FreeRegionReport rep;
    if (edge.side == EdgeSide::Left) {
        if (b > 0 && edge.e0 - bands[b - 1].hi < eps)
            throw Error(ErrorKind::InvalidArgument, "gap below the edge is narrower than eps");
        rep.box = {edge.e0 - eps, edge.e0, std::pow(eps, 5), 0, BoxConvention::Explicit};
    } else {
        if (b + 1 < bands.size() && bands[b + 1].lo - edge.e0 < eps)
            throw Error(ErrorKind::InvalidArgument, "gap above the edge is narrower than eps");
        rep.box = {edge.e0, edge.e0 + eps, std::pow(eps, 5), 0, BoxConvention::Explicit};
    }
    for (std::size_t k = 0; k < sd.size(); ++k)
        if (sd.lambdas[k] >= rep.box.x_lo - 1e-10 && sd.lambdas[k] <= rep.box.x_hi + 1e-10)
            throw Error(ErrorKind::EigenvalueInInterval,
                        "eigenvalue " + std::to_string(sd.lambdas[k]) + " lies in the region",
                        static_cast<std::int64_t>(k));
    rep.count = count_in_box(sd, rep.box, 0.0, opts);
    rep.free = rep.count == 0;
    rep.shifted_box_count = count_in_box(sd, resonance_box(sd, edge, 0, eps, BoxConvention::EpsShifted), 0.0, opts);
    return rep;
}

bool free_region_check(const SpectralData& sd, const BandStructure& bs, const EdgeData& edge, double eps) {
    return free_region_report(sd, bs, edge, eps).free;
}

ImSGrid im_s_grid(const SpectralData& sd, const EdgeData& edge, int n, double eps, double C0, int grid) {
    if (grid < 2) throw Error(ErrorKind::InvalidArgument, "grid must have at least 2 points per side");
    const ResonanceBox box = resonance_box(sd, edge, n, eps);
    ImSGrid out;
    out.depth_lo = C0 * (n + 1) / (static_cast<double>(sd.L) * sd.L);
    out.depth_hi = box.depth;
    if (!(out.depth_lo < out.depth_hi))
        throw Error(ErrorKind::EmptyRegion,
                    "C0 (n+1) / L^2 = " + std::to_string(out.depth_lo) + " is not below eps^5 = " +
                        std::to_string(out.depth_hi),
                    static_cast<std::int64_t>(n));
    out.min_abs_im_exp = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i) {
        const double x = box.x_lo + (box.x_hi - box.x_lo) * i / (grid - 1);
        for (int k = 0; k < grid; ++k) {
            const double y = -(out.depth_lo + (out.depth_hi - out.depth_lo) * k / (grid - 1));
            const Complex e(x, y);
            out.max_abs_im_s = std::max(out.max_abs_im_s, std::abs(s_l(sd, e).imag()));
            out.min_abs_im_exp = std::min(out.min_abs_im_exp, std::abs(exp_minus_i_theta(e).imag()));
        }
    }
    return out;
}

}  // namespace edgewatch

#include "edgewatch/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "edgewatch/error.hpp"

namespace edgewatch {

namespace {

constexpr double kPi = std::numbers::pi;

// Approximate roots of Delta -/+ 2 closer than this are treated as a
// candidate closed gap.
constexpr double kClusterTol = 1e-6;
// Diagonal-monodromy and |Delta| = 2 tests at a closed gap.
constexpr double kClosedGapTol = 1e-8;
constexpr double kEdgeResidualTol = 1e-12;

std::string describe(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

// Reduce an angle to (-pi/2, pi/2].
double wrap_half_pi(double a) {
    a = std::remainder(a, kPi);
    if (a <= -kPi / 2) a += kPi;
    return a;
}

double refine_critical_point(const Polynomial& d1, const Polynomial& d2, double x) {
    for (int it = 0; it < 60; ++it) {
        const double g = d1(x);
        const double gp = d2(x);
        if (gp == 0.0) break;
        const double next = x - g / gp;
        if (next == x) break;
        x = next;
    }
    return x;
}

}  // namespace

PeriodicPotential::PeriodicPotential(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw Error(ErrorKind::InvalidArgument, "potential needs at least one value");
    for (double x : values_)
        if (!std::isfinite(x)) throw Error(ErrorKind::InvalidArgument, "potential values must be finite");
}

double PeriodicPotential::max_abs() const noexcept {
    double m = 0.0;
    for (double x : values_) m = std::max(m, std::abs(x));
    return m;
}

double Matrix2::max_abs() const {
    return std::max({std::abs(m11), std::abs(m12), std::abs(m21), std::abs(m22)});
}

Matrix2 operator*(const Matrix2& a, const Matrix2& b) {
    return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
            a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
}

Matrix2 transfer_matrix(const PeriodicPotential& v, Complex e, std::int64_t l) {
    if (l < 0) throw Error(ErrorKind::InvalidArgument, "transfer matrix index must be non-negative");
    return {e - v.at(l), -1.0, 1.0, 0.0};
}

Matrix2 product_matrix(const PeriodicPotential& v, Complex e, int k) {
    if (k < 0 || k > v.period())
        throw Error(ErrorKind::InvalidArgument, "product index " + std::to_string(k) + " outside [0, p]");
    Matrix2 m = Matrix2::identity();
    for (int l = 0; l < k; ++l) m = transfer_matrix(v, e, l) * m;
    return m;
}

Matrix2 monodromy(const PeriodicPotential& v, Complex e, int k) {
    if (k < 0 || k >= v.period())
        throw Error(ErrorKind::InvalidArgument, "monodromy index " + std::to_string(k) + " outside [0, p-1]");
    Matrix2 m = Matrix2::identity();
    for (int l = k; l < k + v.period(); ++l) m = transfer_matrix(v, e, l) * m;
    return m;
}

Complex discriminant(const PeriodicPotential& v, Complex e) { return monodromy(v, e, 0).trace(); }

namespace {

PolyMatrix2 poly_product(const PeriodicPotential& v, int first, int count) {
    PolyMatrix2 m;
    for (int l = first; l < first + count; ++l) {
        const Polynomial diag = Polynomial::monomial_shift(v.at(l));
        // [[E - v, -1], [1, 0]] * m
        PolyMatrix2 next;
        next.m11 = diag * m.m11 - m.m21;
        next.m12 = diag * m.m12 - m.m22;
        next.m21 = m.m11;
        next.m22 = m.m12;
        m = std::move(next);
    }
    return m;
}

}  // namespace

PolyMatrix2 product_polynomials(const PeriodicPotential& v, int k) {
    if (k < 0 || k > v.period())
        throw Error(ErrorKind::InvalidArgument, "product index " + std::to_string(k) + " outside [0, p]");
    return poly_product(v, 0, k);
}

PolyMatrix2 monodromy_polynomials(const PeriodicPotential& v, int k) {
    if (k < 0 || k >= v.period())
        throw Error(ErrorKind::InvalidArgument, "monodromy index " + std::to_string(k) + " outside [0, p-1]");
    return poly_product(v, k, v.period());
}

BandStructure::BandStructure(int period, Polynomial discriminant, std::vector<double> elementary_edges,
                             std::vector<Band> bands)
    : period_(period),
      discriminant_(std::move(discriminant)),
      elementary_(std::move(elementary_edges)),
      bands_(std::move(bands)) {
    for (std::size_t i = 0; i < bands_.size(); ++i) {
        edges_.push_back({bands_[i].lo, static_cast<int>(i), EdgeSide::Left});
        edges_.push_back({bands_[i].hi, static_cast<int>(i), EdgeSide::Right});
    }
}

std::vector<int> BandStructure::closed_gap_counts() const {
    std::vector<int> c;
    c.reserve(bands_.size());
    for (const auto& b : bands_) c.push_back(b.closed_gaps);
    return c;
}

int BandStructure::band_of(double e, double tol) const {
    for (std::size_t i = 0; i < bands_.size(); ++i)
        if (bands_[i].contains(e, tol)) return static_cast<int>(i);
    return -1;
}

int BandStructure::elementary_band_of(double e) const {
    const int p = period_;
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int m = 0; m < p; ++m) {
        const double lo = elementary_[static_cast<std::size_t>(2 * m)];
        const double hi = elementary_[static_cast<std::size_t>(2 * m + 1)];
        if (e >= lo && e <= hi) return m;
        const double dist = e < lo ? lo - e : e - hi;
        if (dist < best_dist) {
            best_dist = dist;
            best = m;
        }
    }
    return best;
}

BandStructure band_structure(const PeriodicPotential& v) {
    const int p = v.period();
    const PolyMatrix2 mono = monodromy_polynomials(v, 0);
    const Polynomial delta = mono.m11 + mono.m22;
    const Polynomial d1 = delta.derivative();
    const Polynomial d2 = d1.derivative();

    struct Root {
        double x;
        double target;  // +2 or -2
    };
    std::vector<Root> roots;
    roots.reserve(static_cast<std::size_t>(2 * p));
    for (double target : {2.0, -2.0}) {
        const Polynomial shifted = delta - Polynomial::constant(target);
        // All roots are real (periodic / antiperiodic eigenvalues of a
        // symmetric matrix); tiny imaginary parts come from double roots.
        for (const auto& z : companion_roots(shifted))
            roots.push_back({polish_real_root(shifted, z.real()), target});
    }
    std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) { return a.x < b.x; });

    std::vector<double> r(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i) r[i] = roots[i].x;

    // Inner pairs (r_{2m+1}, r_{2m+2}) bound the gaps; a coinciding pair with
    // diagonal monodromy is a closed gap inside a band.
    std::vector<bool> closed(static_cast<std::size_t>(std::max(p - 1, 0)), false);
    for (int m = 0; m + 1 < p; ++m) {
        const auto i = static_cast<std::size_t>(2 * m + 1);
        const double scale = 1.0 + std::abs(r[i]);
        if (r[i + 1] - r[i] > kClusterTol * scale) continue;
        const double x = refine_critical_point(d1, d2, 0.5 * (r[i] + r[i + 1]));
        const double mag = delta.magnitude_at(x);
        const Matrix2 mx = mono.at(x);
        const bool at_two = std::abs(std::abs(delta(x)) - 2.0) <= kClosedGapTol * mag;
        const bool diagonal = std::abs(mx.m12) <= kClosedGapTol * mag && std::abs(mx.m21) <= kClosedGapTol * mag;
        if (at_two && diagonal) {
            r[i] = x;
            r[i + 1] = x;
            closed[static_cast<std::size_t>(m)] = true;
        }
    }

    for (std::size_t i = 0; i < roots.size(); ++i) {
        const bool is_closed_gap = (i % 2 == 1 && i / 2 < closed.size() && closed[i / 2]) ||
                                   (i % 2 == 0 && i > 0 && closed[i / 2 - 1]);
        if (is_closed_gap) continue;
        const double res = std::abs(delta(r[i]) - roots[i].target);
        if (res > kEdgeResidualTol * delta.magnitude_at(r[i]))
            throw Error(ErrorKind::RootFindingFailure,
                        "band edge " + describe(r[i]) + " has residual " + describe(res));
    }

    std::vector<Band> bands;
    Band current{r[0], r[1], 0, {}};
    for (int m = 0; m + 1 < p; ++m) {
        const auto i = static_cast<std::size_t>(2 * m + 2);
        if (closed[static_cast<std::size_t>(m)]) {
            current.closed_gaps += 1;
            current.closed_gap_points.push_back(r[i]);
            current.hi = r[i + 1];
        } else {
            bands.push_back(current);
            current = Band{r[i], r[i + 1], 0, {}};
        }
    }
    bands.push_back(current);
    for (std::size_t i = 1; i < bands.size(); ++i)
        if (!(bands[i].lo > bands[i - 1].hi))
            throw Error(ErrorKind::RootFindingFailure, "bands overlap near " + describe(bands[i].lo));

    return BandStructure(p, delta, std::move(r), std::move(bands));
}

double quasi_momentum(const BandStructure& bs, double e) {
    constexpr double tol = 1e-12;
    if (bs.band_of(e, tol) < 0)
        throw Error(ErrorKind::OutsideSpectrum, "energy " + describe(e) + " is not in the spectrum");
    const int p = bs.period();
    const int m = bs.elementary_band_of(e);
    const double sign = ((m + p) % 2 == 0) ? 1.0 : -1.0;
    const double c = std::clamp(sign * bs.discriminant()(e) / 2.0, -1.0, 1.0);
    return (m * kPi + std::acos(c)) / p;
}

double density_of_states(const BandStructure& bs, double e) {
    if (bs.band_of(e, 0.0) < 0)
        throw Error(ErrorKind::OutsideSpectrum, "energy " + describe(e) + " is not in the spectrum");
    const auto [d, dp] = bs.discriminant().eval_with_derivative(e);
    const double gap = 4.0 - d * d;
    if (gap <= 1e-14)
        throw Error(ErrorKind::EdgeSingularity, "density of states diverges at " + describe(e));
    return std::abs(dp) / (bs.period() * kPi * std::sqrt(gap));
}

Complex phase_numerator(const PeriodicPotential& v, const BandStructure& bs, int j, double e) {
    const int p = v.period();
    if (j < 0 || j >= p) throw Error(ErrorKind::InvalidArgument, "residue j must lie in [0, p-1]");
    const Matrix2 mono = monodromy(v, e, 0);
    const Matrix2 prod = product_matrix(v, e, j + 1);
    // Delta = (-1)^p 2 cos(p theta), so the Floquet multiplier carries the sign.
    const double sign = p % 2 == 0 ? 1.0 : -1.0;
    const Complex rho = sign * std::polar(1.0, p * quasi_momentum(bs, e));
    return prod.m11 * (rho - mono.m11) - prod.m12 * mono.m21;
}

namespace {

class PhaseTracker {
public:
    PhaseTracker(const PeriodicPotential& v, const BandStructure& bs, int j, double lo)
        : v_(v), bs_(bs), j_(j), lo_(lo) {}

    double arg_at_t(double t) const { return std::arg(phase_numerator(v_, bs_, j_, lo_ + t * t)); }

    // Continued phase increment from t0 to t1, subdividing until every
    // mod-pi increment is below pi/4.
    double increment(double t0, double a0, double t1, double a1, int depth = 0) const {
        const double jump = wrap_half_pi(a1 - a0);
        if (std::abs(jump) <= kPi / 4 || depth >= 40) return jump;
        const double tm = 0.5 * (t0 + t1);
        const double am = arg_at_t(tm);
        return increment(t0, a0, tm, am, depth + 1) + increment(tm, am, t1, a1, depth + 1);
    }

private:
    const PeriodicPotential& v_;
    const BandStructure& bs_;
    int j_;
    double lo_;
};

}  // namespace

std::vector<double> h_j_along(const PeriodicPotential& v, const BandStructure& bs, int j,
                              std::span<const double> energies) {
    std::vector<double> out;
    if (energies.empty()) return out;
    const int band = bs.band_of(energies.front(), 0.0);
    if (band < 0)
        throw Error(ErrorKind::OutsideSpectrum, "energy " + describe(energies.front()) + " is not in the spectrum");
    const Band& b = bs.bands()[static_cast<std::size_t>(band)];
    const int p = v.period();

    PhaseTracker tracker(v, bs, j, b.lo);
    // Start just inside the left edge; h is analytic in t = sqrt(E - lo).
    double t_prev = 1e-6 * std::sqrt(b.width());
    double a_prev = tracker.arg_at_t(t_prev);
    double h = wrap_half_pi(a_prev);

    out.reserve(energies.size());
    double e_prev = b.lo;
    for (double e : energies) {
        if (!(e > b.lo && e < b.hi))
            throw Error(ErrorKind::InvalidArgument, "energy " + describe(e) + " is not strictly inside band " +
                                                        std::to_string(band));
        if (e < e_prev) throw Error(ErrorKind::InvalidArgument, "energies must be increasing");
        const Complex s = phase_numerator(v, bs, j, e);
        if (std::abs(s) <= 1e-13 * std::pow(1.0 + std::abs(e), p))
            throw Error(ErrorKind::DegenerateS, "phase numerator vanishes at " + describe(e));
        const double t = std::sqrt(e - b.lo);
        const double a = std::arg(s);
        // Uniform sub-steps in t keep the adaptive recursion shallow.
        constexpr int kSubSteps = 4;
        double tc = t_prev;
        double ac = a_prev;
        for (int s_i = 1; s_i <= kSubSteps; ++s_i) {
            const double tn = s_i == kSubSteps ? t : t_prev + (t - t_prev) * s_i / kSubSteps;
            const double an = s_i == kSubSteps ? a : tracker.arg_at_t(tn);
            h += tracker.increment(tc, ac, tn, an);
            tc = tn;
            ac = an;
        }
        out.push_back(h);
        t_prev = t;
        a_prev = a;
        e_prev = e;
    }
    return out;
}

double h_j(const PeriodicPotential& v, const BandStructure& bs, int j, double e) {
    const double one[1] = {e};
    return h_j_along(v, bs, j, one).front();
}

std::string_view to_string(EdgeClass c) {
    switch (c) {
        case EdgeClass::GenericA: return "GenericA";
        case EdgeClass::GenericB: return "GenericB";
        case EdgeClass::NonGeneric: return "NonGeneric";
        case EdgeClass::EdgeEigenvalue: return "EdgeEigenvalue";
    }
    return "Unknown";
}

std::string_view to_string(EdgeSide s) { return s == EdgeSide::Left ? "left" : "right"; }

double edge_d(double a_j1, double a0_p, double rho, double b_j1, double a0_p_minus_1) {
    return a_j1 * (a0_p - rho) + b_j1 * a0_p_minus_1;
}

const EdgePoint& find_edge(const BandStructure& bs, double e, double tol) {
    const EdgePoint* best = nullptr;
    for (const auto& ep : bs.edge_points())
        if (std::abs(ep.energy - e) <= tol && (!best || std::abs(ep.energy - e) < std::abs(best->energy - e)))
            best = &ep;
    if (!best) throw Error(ErrorKind::NotAnEdge, describe(e) + " is not a band edge");
    return *best;
}

EdgeData classify_edge(const PeriodicPotential& v, const BandStructure& bs, double e0, int j) {
    const int p = v.period();
    if (j < 0 || j >= p) throw Error(ErrorKind::InvalidArgument, "residue j must lie in [0, p-1]");
    const EdgePoint& ep = find_edge(bs, e0, 1e-9);

    EdgeData d;
    d.e0 = ep.energy;
    d.side = ep.side;
    d.band_index = ep.band;
    d.j = j;

    const Matrix2 mono = monodromy(v, d.e0, 0);
    const Matrix2 prod = product_matrix(v, d.e0, j + 1);
    d.a0_p = mono.m11.real();
    d.a0_p_minus_1 = mono.m21.real();
    d.rho = bs.discriminant()(d.e0) >= 0.0 ? 1.0 : -1.0;
    d.a_j1 = prod.m11.real();
    d.b_j1 = prod.m12.real();
    d.d_j1 = edge_d(d.a_j1, d.a0_p, d.rho, d.b_j1, d.a0_p_minus_1);
    d.zero_tolerance = 1e-9 * std::pow(1.0 + std::abs(d.e0), p);

    const double tol = d.zero_tolerance;
    const bool a0_zero = std::abs(d.a0_p_minus_1) <= tol;
    const bool d_zero = std::abs(d.d_j1) <= tol;
    const bool a_zero = std::abs(d.a_j1) <= tol;
    if (!a0_zero)
        d.classification = d_zero ? EdgeClass::NonGeneric : EdgeClass::GenericA;
    else
        d.classification = a_zero ? EdgeClass::EdgeEigenvalue : EdgeClass::GenericB;

    auto borderline = [&](double x, const char* name) {
        const double ax = std::abs(x);
        if (ax > tol * 0.1 && ax < tol * 10.0)
            d.warnings.push_back(std::string(name) + " = " + describe(x) + " is within 10x of the zero tolerance");
    };
    borderline(d.a0_p_minus_1, "a0_p_minus_1");
    if (a0_zero)
        borderline(d.a_j1, "a_j1");
    else
        borderline(d.d_j1, "d_j1");
    return d;
}

}  // namespace edgewatch

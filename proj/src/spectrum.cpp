#include "edgewatch/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "edgewatch/error.hpp"
#include "edgewatch/parallel.hpp"

namespace edgewatch {

namespace {

constexpr double kBandTol = 1e-9;
constexpr double kMinGap = 1e-12;
constexpr double kResidualTol = 1e-8;

// Number of eigenvalues strictly below x (Sturm sequence via LDL^T pivots).
std::size_t sturm_count(const Tridiagonal& h, double x, double pivmin) {
    std::size_t count = 0;
    double q = h.diag[0] - x;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0) ++count;
    for (std::size_t i = 1; i < h.size(); ++i) {
        const double e = h.offdiag[i - 1];
        q = h.diag[i] - x - e * e / q;
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0) ++count;
    }
    return count;
}

// Newton correction from the pivot recurrence: d/dx log det(H - x) = sum q_i'/q_i.
// Returns nan when x is an exact eigenvalue of the recurrence.
double newton_step(const Tridiagonal& h, double x) {
    double q = h.diag[0] - x;
    double dq = -1.0;
    if (q == 0.0) return std::numeric_limits<double>::quiet_NaN();
    double logderiv = dq / q;
    for (std::size_t i = 1; i < h.size(); ++i) {
        const double e2 = h.offdiag[i - 1] * h.offdiag[i - 1];
        const double q_prev = q;
        q = h.diag[i] - x - e2 / q_prev;
        dq = -1.0 + e2 * dq / (q_prev * q_prev);
        if (q == 0.0) return std::numeric_limits<double>::quiet_NaN();
        logderiv += dq / q;
    }
    return -1.0 / logderiv;
}

struct Bounds {
    double lo;
    double hi;
    double radius;
};

Bounds gershgorin(const Tridiagonal& h) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < h.size(); ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(h.offdiag[i - 1]);
        if (i + 1 < h.size()) r += std::abs(h.offdiag[i]);
        lo = std::min(lo, h.diag[i] - r);
        hi = std::max(hi, h.diag[i] + r);
    }
    return {lo, hi, std::max(std::abs(lo), std::abs(hi))};
}

double kth_eigenvalue(const Tridiagonal& h, std::size_t k, const Bounds& b, double abstol, double pivmin) {
    double lo = b.lo;
    double hi = b.hi;
    while (hi - lo > abstol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (sturm_count(h, mid, pivmin) >= k + 1)
            hi = mid;
        else
            lo = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) {
        const double step = newton_step(h, x);
        if (!std::isfinite(step)) break;
        const double next = x + step;
        if (next <= lo || next >= hi || next == x) break;
        x = next;
    }
    return x;
}

// LU with partial pivoting of the tridiagonal H - shift (LAPACK dgttrf layout).
class ShiftedTridiagonalLU {
public:
    ShiftedTridiagonalLU(const Tridiagonal& h, double shift, double tiny)
        : n_(h.size()), dl_(h.offdiag), d_(h.diag), du_(h.offdiag), du2_(n_, 0.0), ipiv_(n_) {
        for (auto& x : d_) x -= shift;
        for (std::size_t i = 0; i < n_; ++i) ipiv_[i] = i;
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            if (std::abs(d_[i]) >= std::abs(dl_[i])) {
                if (d_[i] == 0.0) d_[i] = tiny;
                const double fact = dl_[i] / d_[i];
                dl_[i] = fact;
                d_[i + 1] -= fact * du_[i];
            } else {
                const double fact = d_[i] / dl_[i];
                d_[i] = dl_[i];
                dl_[i] = fact;
                const double temp = du_[i];
                du_[i] = d_[i + 1];
                d_[i + 1] = temp - fact * d_[i + 1];
                if (i + 2 < n_) {
                    du2_[i] = du_[i + 1];
                    du_[i + 1] = -fact * du_[i + 1];
                }
                ipiv_[i] = i + 1;
            }
        }
        for (auto& x : d_)
            if (std::abs(x) < tiny) x = x < 0 ? -tiny : tiny;
    }

    void solve(std::vector<double>& b) const {
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            if (ipiv_[i] == i) {
                b[i + 1] -= dl_[i] * b[i];
            } else {
                const double temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - dl_[i] * b[i];
            }
        }
        const std::size_t n = n_;
        b[n - 1] /= d_[n - 1];
        if (n > 1) b[n - 2] = (b[n - 2] - du_[n - 2] * b[n - 1]) / d_[n - 2];
        for (std::size_t ii = n; ii-- > 2;) {
            const std::size_t i = ii - 2;
            b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
        }
    }

private:
    std::size_t n_;
    std::vector<double> dl_, d_, du_, du2_;
    std::vector<std::size_t> ipiv_;
};

void normalize(std::vector<double>& x) {
    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    for (double& v : x) v /= scale;
    double norm2 = 0.0;
    for (double v : x) norm2 += v * v;
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& v : x) v *= inv;
}

double residual_inf(const Tridiagonal& h, double lambda, const std::vector<double>& x) {
    double r = 0.0;
    const std::size_t n = h.size();
    for (std::size_t i = 0; i < n; ++i) {
        double y = (h.diag[i] - lambda) * x[i];
        if (i > 0) y += h.offdiag[i - 1] * x[i - 1];
        if (i + 1 < n) y += h.offdiag[i] * x[i + 1];
        r = std::max(r, std::abs(y));
    }
    return r;
}

std::vector<double> inverse_iteration(const Tridiagonal& h, double lambda, std::uint64_t seed, double tiny,
                                      std::size_t k) {
    const ShiftedTridiagonalLU lu(h, lambda, tiny);
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + k * 2 + static_cast<std::uint64_t>(attempt));
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        std::vector<double> x(h.size());
        for (double& v : x) v = unif(rng);
        normalize(x);
        for (int it = 0; it < 2; ++it) {
            lu.solve(x);
            normalize(x);
        }
        if (residual_inf(h, lambda, x) <= kResidualTol) return x;
    }
    throw Error(ErrorKind::ConvergenceFailure,
                "inverse iteration did not converge for eigenvalue " + std::to_string(k),
                static_cast<std::int64_t>(k));
}

}  // namespace

Tridiagonal assemble(const PeriodicPotential& v, int L) {
    if (L < 1) throw Error(ErrorKind::InvalidArgument, "L must be at least 1");
    Tridiagonal h;
    h.period = v.period();
    h.diag.resize(static_cast<std::size_t>(L) + 1);
    for (int n = 0; n <= L; ++n) h.diag[static_cast<std::size_t>(n)] = v.at(n);
    h.offdiag.assign(static_cast<std::size_t>(L), 1.0);
    return h;
}

std::vector<double> tridiagonal_eigenvalues(const Tridiagonal& h, double tol) {
    if (h.size() == 0) return {};
    if (h.offdiag.size() + 1 != h.size())
        throw Error(ErrorKind::InvalidArgument, "off-diagonal must have n-1 entries");
    const Bounds b = gershgorin(h);
    const double scale = std::max(1.0, b.radius);
    const double abstol = tol * scale;
    const double pivmin = std::numeric_limits<double>::min() * scale;
    std::vector<double> lambdas(h.size());
    parallel_for(h.size(), [&](std::size_t k) { lambdas[k] = kth_eigenvalue(h, k, b, abstol, pivmin); });
    return lambdas;
}

SpectralData eigensystem(const Tridiagonal& h, const EigensystemOptions& opts) {
    if (opts.tol < 1e-14) throw Error(ErrorKind::InvalidArgument, "eigensystem tolerance must be >= 1e-14");
    if (h.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least two sites");

    SpectralData sd;
    sd.L = static_cast<int>(h.size()) - 1;
    sd.p = h.period;
    sd.j = sd.L % sd.p;
    sd.N = sd.L / sd.p;
    sd.lambdas = tridiagonal_eigenvalues(h, opts.tol);

    for (std::size_t k = 0; k + 1 < sd.lambdas.size(); ++k)
        if (!(sd.lambdas[k + 1] - sd.lambdas[k] > kMinGap))
            throw Error(ErrorKind::ConvergenceFailure,
                        "eigenvalues " + std::to_string(k) + " and " + std::to_string(k + 1) + " collide",
                        static_cast<std::int64_t>(k));

    const double tiny = std::numeric_limits<double>::epsilon() * std::max(1.0, gershgorin(h).radius);
    const std::size_t n = h.size();
    sd.weights_end.resize(n);
    sd.weights_start.resize(n);
    parallel_for(n, [&](std::size_t k) {
        const auto x = inverse_iteration(h, sd.lambdas[k], opts.seed, tiny, k);
        sd.weights_start[k] = x.front() * x.front();
        sd.weights_end[k] = x.back() * x.back();
    });
    sd.band_of.assign(n, kOutsideSpectrum);
    sd.local_index.assign(n, -1);
    return sd;
}

std::vector<std::size_t> SpectralData::outside_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < band_of.size(); ++k)
        if (band_of[k] == kOutsideSpectrum) out.push_back(k);
    return out;
}

double SpectralData::spectral_radius() const {
    if (lambdas.empty()) return 0.0;
    return std::max(std::abs(lambdas.front()), std::abs(lambdas.back()));
}

SpectralData band_enumerate(SpectralData sd, const BandStructure& bs) {
    const std::size_t n = sd.size();
    sd.band_of.assign(n, kOutsideSpectrum);
    sd.local_index.assign(n, -1);
    std::vector<int> counters(bs.bands().size(), 0);
    for (std::size_t k = 0; k < n; ++k) {
        int found = kOutsideSpectrum;
        for (std::size_t b = 0; b < bs.bands().size(); ++b) {
            if (!bs.bands()[b].contains(sd.lambdas[k], kBandTol)) continue;
            if (found != kOutsideSpectrum)
                throw Error(ErrorKind::AmbiguousAssignment,
                            "eigenvalue " + std::to_string(k) + " is within tolerance of two bands",
                            static_cast<std::int64_t>(k));
            found = static_cast<int>(b);
        }
        sd.band_of[k] = found;
        if (found != kOutsideSpectrum) sd.local_index[k] = counters[static_cast<std::size_t>(found)]++;
    }
    return sd;
}

SpectralData compute_spectral_data(const PeriodicPotential& v, int L, const BandStructure& bs,
                                   const EigensystemOptions& opts) {
    return band_enumerate(eigensystem(assemble(v, L), opts), bs);
}

std::vector<QuantizationResidual> quantization_residuals(const SpectralData& sd, const BandStructure& bs,
                                                         const PeriodicPotential& v) {
    std::vector<QuantizationResidual> out;
    const double scale = static_cast<double>(sd.L - sd.j);
    for (std::size_t b = 0; b < bs.bands().size(); ++b) {
        const Band& band = bs.bands()[b];
        std::vector<double> inner;
        for (std::size_t k = 0; k < sd.size(); ++k) {
            const double x = sd.lambdas[k];
            if (sd.band_of[k] == static_cast<int>(b) && x - band.lo > kBandTol && band.hi - x > kBandTol)
                inner.push_back(x);
        }
        if (inner.size() < 2) continue;
        const auto h = h_j_along(v, bs, sd.j, inner);
        for (std::size_t k = 0; k + 1 < inner.size(); ++k) {
            const double dtheta = quasi_momentum(bs, inner[k + 1]) - quasi_momentum(bs, inner[k]);
            const double r = scale * dtheta - (h[k + 1] - h[k]) - std::numbers::pi;
            out.push_back({static_cast<int>(b), static_cast<int>(k), inner[k], inner[k + 1], r});
        }
    }
    if (out.empty()) throw Error(ErrorKind::TooFewPoints, "no band holds two interior eigenvalues");
    return out;
}

std::vector<std::size_t> edge_local_indices(const SpectralData& sd, const EdgeData& edge) {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < sd.size(); ++k)
        if (sd.band_of[k] == edge.band_index && std::abs(sd.lambdas[k] - edge.e0) > kBandTol) idx.push_back(k);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(sd.lambdas[a] - edge.e0) < std::abs(sd.lambdas[b] - edge.e0);
    });
    return idx;
}

std::vector<WeightRow> weight_profile(const SpectralData& sd, const EdgeData& edge, double eps) {
    if (!(eps > 0.0 && eps < 0.5)) throw Error(ErrorKind::InvalidArgument, "eps must lie in (0, 0.5)");
    const double window = eps * eps;
    std::vector<WeightRow> rows;
    const auto idx = edge_local_indices(sd, edge);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const std::size_t g = idx[r];
        const double dist = std::abs(sd.lambdas[g] - edge.e0);
        if (dist > window) break;
        rows.push_back({static_cast<int>(r), g, dist, sd.weights_end[g], sd.weights_start[g]});
    }
    if (rows.size() < 5)
        throw Error(ErrorKind::TooFewPoints,
                    "only " + std::to_string(rows.size()) + " eigenvalues within eps^2 of the edge");
    return rows;
}

}  // namespace edgewatch

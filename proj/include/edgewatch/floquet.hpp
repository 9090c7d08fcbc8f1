#pragma once

// Transfer-matrix algebra of the periodic Jacobi operator
//   (Hu)(n) = u(n-1) + u(n+1) + v(n) u(n),   v(n + p) = v(n).
//
// Entry convention for products of transfer matrices:
//   T_{k-1}...T_0      = [[a_k, b_k], [a_{k-1}, b_{k-1}]]
//   T_{k+p-1}...T_k    = [[a^k_p, b^k_p], [a^k_{p-1}, b^k_{p-1}]]
// so the monodromy at k = 0 coincides with the product of the first p factors.

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "edgewatch/polynomial.hpp"

namespace edgewatch {

using Complex = std::complex<double>;

class PeriodicPotential {
public:
    /// Throws InvalidArgument on an empty or non-finite value list.
    explicit PeriodicPotential(std::vector<double> values);

    int period() const noexcept { return static_cast<int>(values_.size()); }
    std::span<const double> values() const noexcept { return values_; }
    double at(std::int64_t site) const noexcept {
        const auto p = static_cast<std::int64_t>(values_.size());
        return values_[static_cast<std::size_t>(((site % p) + p) % p)];
    }
    double max_abs() const noexcept;

private:
    std::vector<double> values_;
};

struct Matrix2 {
    Complex m11{1.0}, m12{0.0}, m21{0.0}, m22{1.0};

    static Matrix2 identity() { return {}; }
    Complex det() const { return m11 * m22 - m12 * m21; }
    Complex trace() const { return m11 + m22; }
    double max_abs() const;
    friend Matrix2 operator*(const Matrix2& a, const Matrix2& b);
};

/// 2x2 matrix with real polynomial entries in E.
struct PolyMatrix2 {
    Polynomial m11{Polynomial::constant(1.0)}, m12{Polynomial::constant(0.0)};
    Polynomial m21{Polynomial::constant(0.0)}, m22{Polynomial::constant(1.0)};

    Matrix2 at(Complex e) const { return {m11(e), m12(e), m21(e), m22(e)}; }
};

Matrix2 transfer_matrix(const PeriodicPotential& v, Complex e, std::int64_t l);

/// T_{k-1}(E)...T_0(E); k = 0 is the identity. Rejects k outside [0, p].
Matrix2 product_matrix(const PeriodicPotential& v, Complex e, int k);

/// T_{k+p-1}(E)...T_k(E). Rejects k outside [0, p-1].
Matrix2 monodromy(const PeriodicPotential& v, Complex e, int k);

Complex discriminant(const PeriodicPotential& v, Complex e);

/// Exact-coefficient polynomial versions of the products above.
PolyMatrix2 product_polynomials(const PeriodicPotential& v, int k);
PolyMatrix2 monodromy_polynomials(const PeriodicPotential& v, int k);

enum class EdgeSide { Left, Right };

struct Band {
    double lo = 0.0;
    double hi = 0.0;
    int closed_gaps = 0;
    std::vector<double> closed_gap_points;

    bool contains(double e, double tol = 0.0) const { return e >= lo - tol && e <= hi + tol; }
    double width() const { return hi - lo; }
};

struct EdgePoint {
    double energy = 0.0;
    int band = 0;
    EdgeSide side = EdgeSide::Left;
};

/// Spectrum of the periodic operator on Z: the set where |Delta| <= 2.
class BandStructure {
public:
    BandStructure(int period, Polynomial discriminant, std::vector<double> elementary_edges,
                  std::vector<Band> bands);

    int period() const noexcept { return period_; }
    const std::vector<Band>& bands() const noexcept { return bands_; }
    const Polynomial& discriminant() const noexcept { return discriminant_; }
    std::span<const double> discriminant_coeffs() const noexcept { return discriminant_.coeffs(); }
    std::vector<int> closed_gap_counts() const;
    const std::vector<EdgePoint>& edge_points() const noexcept { return edges_; }

    /// Roots of Delta^2 - 4 in increasing order, with multiplicity (2p values).
    /// Elementary band m is [r_{2m}, r_{2m+1}].
    std::span<const double> elementary_edges() const noexcept { return elementary_; }

    /// Index of the band containing e (within tol), or -1.
    int band_of(double e, double tol) const;
    /// Elementary band containing e, assuming e lies in the spectrum.
    int elementary_band_of(double e) const;

    double inf() const { return bands_.front().lo; }
    double sup() const { return bands_.back().hi; }

private:
    int period_;
    Polynomial discriminant_;
    std::vector<double> elementary_;
    std::vector<Band> bands_;
    std::vector<EdgePoint> edges_;
};

BandStructure band_structure(const PeriodicPotential& v);

/// Floquet quasi-momentum: non-decreasing, 0 at inf of the spectrum, pi at sup.
double quasi_momentum(const BandStructure& bs, double e);

/// Density of states n(E) = theta_p'(E) / pi, for E strictly inside a band.
double density_of_states(const BandStructure& bs, double e);

/// s(E) = a_{j+1}(E) (rho(E) - a^0_p(E)) - b_{j+1}(E) a^0_{p-1}(E), with rho = (-1)^p exp(i p theta_p(E))
/// an eigenvalue of the monodromy matrix.
Complex phase_numerator(const PeriodicPotential& v, const BandStructure& bs, int j, double e);

/// arg s(E) continued along the band from its left edge. Defined modulo pi;
/// only differences along a band are meaningful.
double h_j(const PeriodicPotential& v, const BandStructure& bs, int j, double e);

/// h_j at increasing energies inside one band, unwrapped continuously.
std::vector<double> h_j_along(const PeriodicPotential& v, const BandStructure& bs, int j,
                              std::span<const double> energies);

enum class EdgeClass { GenericA, GenericB, NonGeneric, EdgeEigenvalue };

std::string_view to_string(EdgeClass c);
std::string_view to_string(EdgeSide s);

struct EdgeData {
    double e0 = 0.0;
    EdgeSide side = EdgeSide::Left;
    int band_index = 0;
    int j = 0;
    double a0_p_minus_1 = 0.0;
    double a0_p = 0.0;
    double rho = 1.0;
    double a_j1 = 0.0;
    double b_j1 = 0.0;
    double d_j1 = 0.0;
    EdgeClass classification = EdgeClass::GenericA;
    double zero_tolerance = 0.0;
    /// Non-empty when a tested quantity is within 10x of the zero tolerance.
    std::vector<std::string> warnings;

    bool is_generic() const {
        return classification == EdgeClass::GenericA || classification == EdgeClass::GenericB;
    }
};

/// d_{j+1} from its four ingredients; classify_edge stores exactly this value.
double edge_d(double a_j1, double a0_p, double rho, double b_j1, double a0_p_minus_1);

EdgeData classify_edge(const PeriodicPotential& v, const BandStructure& bs, double e0, int j);

/// Nearest recorded edge to `e` within `tol`; throws NotAnEdge otherwise.
const EdgePoint& find_edge(const BandStructure& bs, double e, double tol);

}  // namespace edgewatch

#pragma once

// Dirichlet section H_L of the periodic operator on {0, ..., L} and its
// boundary spectral data: eigenvalues lambda_k with a_k = |phi_k(L)|^2 and
// |phi_k(0)|^2 of the normalized eigenvectors.

#include <cstdint>
#include <vector>

#include "edgewatch/floquet.hpp"

namespace edgewatch {

/// Symmetric tridiagonal matrix. Off-diagonal couplings are all 1 for
/// sections produced by assemble(); eigensystem() accepts any values.
struct Tridiagonal {
    std::vector<double> diag;
    std::vector<double> offdiag;
    int period = 1;

    std::size_t size() const noexcept { return diag.size(); }
};

Tridiagonal assemble(const PeriodicPotential& v, int L);

inline constexpr int kOutsideSpectrum = -1;

struct SpectralData {
    int L = 0;
    int p = 1;
    int j = 0;
    int N = 0;
    std::vector<double> lambdas;
    std::vector<double> weights_end;    // a_k = |phi_k(L)|^2
    std::vector<double> weights_start;  // |phi_k(0)|^2
    std::vector<int> band_of;           // kOutsideSpectrum when not within 1e-9 of a band
    std::vector<int> local_index;       // index within its band, by energy; -1 outside

    std::size_t size() const noexcept { return lambdas.size(); }
    std::vector<std::size_t> outside_indices() const;
    /// Largest |lambda|, bounded by 2 + max|v|.
    double spectral_radius() const;
};

struct EigensystemOptions {
    double tol = 1e-13;
    std::uint64_t seed = 0;
};

SpectralData eigensystem(const Tridiagonal& h, const EigensystemOptions& opts = {});

SpectralData band_enumerate(SpectralData sd, const BandStructure& bs);

/// assemble + eigensystem + band_enumerate.
SpectralData compute_spectral_data(const PeriodicPotential& v, int L, const BandStructure& bs,
                                   const EigensystemOptions& opts = {});

/// Eigenvalues of a symmetric tridiagonal matrix only, by Sturm bisection.
std::vector<double> tridiagonal_eigenvalues(const Tridiagonal& h, double tol = 1e-13);

struct QuantizationResidual {
    int band = 0;
    int k = 0;  // pair (k, k+1) among interior eigenvalues of the band
    double lambda_lo = 0.0;
    double lambda_hi = 0.0;
    double value = 0.0;
};

/// (L - j) * [theta_{p,L}(lambda_{k+1}) - theta_{p,L}(lambda_k)] - pi for
/// consecutive eigenvalues strictly inside each band, with
/// theta_{p,L} = theta_p - h_j / (L - j).
std::vector<QuantizationResidual> quantization_residuals(const SpectralData& sd, const BandStructure& bs,
                                                         const PeriodicPotential& v);

/// Global indices of eigenvalues strictly inside the edge's band (farther
/// than 1e-9 from the edge), ordered by distance from the edge.
std::vector<std::size_t> edge_local_indices(const SpectralData& sd, const EdgeData& edge);

struct WeightRow {
    int k = 0;               // edge-local index
    std::size_t global = 0;  // index into SpectralData
    double distance = 0.0;   // |lambda - E0|
    double a_end = 0.0;
    double a_start = 0.0;
};

/// Near-edge rows with |lambda - E0| <= eps^2. Throws TooFewPoints below 5 rows.
std::vector<WeightRow> weight_profile(const SpectralData& sd, const EdgeData& edge, double eps);

}  // namespace edgewatch

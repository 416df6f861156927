#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mixed_hk/dynamics.hpp"
#include "mixed_hk/linalg.hpp"
#include "mixed_hk/profile.hpp"

namespace mixed_hk {

/// Largest graph accepted by the exhaustive subset search.
inline constexpr std::size_t kCheegerMaxVertices = 16;

/// L = D - A for a simple graph.
Matrix laplacian(const Graph& graph);
inline Matrix laplacian(const Profile& profile) { return laplacian(profile.graph); }

/// Symmetric M with M_xy < 0 on edges, M_xy == 0 on non-edges, any diagonal.
/// Throws PreconditionError if M is not symmetric within 1e-12.
bool is_generalized_laplacian(const Matrix& m, const Graph& graph);

struct EigenSystem {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column k pairs with values[k]
};

/// Full symmetric eigendecomposition by cyclic Jacobi rotations. Each
/// eigenvector is signed so its largest-magnitude entry is positive.
EigenSystem eigh(const Matrix& m);

/// Isoperimetric number min |dS| / |S| over 0 < |S| <= n/2, by exhaustive
/// search. Infinity for a single vertex. OpenMP-parallel over subsets.
double cheeger_constant(const Graph& graph);
/// Single-threaded reference for cheeger_constant.
double cheeger_constant_serial(const Graph& graph);

struct SpectralReport {
    Matrix laplacian;
    std::vector<double> eigenvalues;
    double lambda2 = 0.0;
    double cheeger = 0.0;
    std::size_t max_degree = 0;
    std::size_t components = 0;
    std::map<std::string, bool> verdicts;
    std::vector<std::string> notes;

    bool all_pass() const;
};

/// Eigen-spectrum, Cheeger constant and the sandwich 2i >= lambda2 >= i^2/(2 Delta),
/// plus the connected-graph floor lambda2 > 2/n^3. Requires 2 <= n <= 16.
SpectralReport check_cheeger(const Graph& graph);

/// B = diag(alpha) + (I - diag(alpha)) A for the state's averaging matrix A.
Matrix update_matrix(const OpinionState& state, std::span<const double> alpha);

struct UpdateFactorization {
    Matrix i_minus_b;
    std::vector<double> stubborn_factor;  // 1 - alpha_i
    std::vector<double> degree_factor;    // 1 / (1 + d_i)
    Matrix laplacian;
    double residual = 0.0;                // max |(I - B) - diag(stubborn) diag(degree) L|
};

/// Requires every alpha_i < 1.
UpdateFactorization update_factorization(const OpinionState& state, std::span<const double> alpha);

struct ChainCheck {
    double lambda2_laplacian = 0.0;
    double lambda2_qtq = 0.0;
    double chain_bound = 0.0;      // ((1 - max alpha) / n)^2 lambda2(L)^2
    double min_rayleigh = 0.0;     // smallest sampled x'Q'Qx over unit x orthogonal to 1
    std::map<std::string, bool> verdicts;

    bool all_pass() const;
};

/// Numerical checks on Q = I - B for a connected profile: 0 is a simple
/// eigenvalue of Q'Q with eigenvector 1; the lambda2(Q'Q) lower bound;
/// Perron-Frobenius simplicity and positivity for the Laplacian (and for a
/// seeded random generalized Laplacian of the same graph); and a sampled
/// Courant-Fischer check. Requires connectivity, alpha_i < 1 and n <= 16.
ChainCheck lambda2_chain_check(const OpinionState& state, std::span<const double> alpha, std::uint64_t seed = 1,
                               std::size_t samples = 1000);

}  // namespace mixed_hk

#include "mixed_hk/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mixed_hk/errors.hpp"
#include "mixed_hk/rng.hpp"

namespace mixed_hk {

Matrix laplacian(const Graph& graph) {
    const std::size_t n = graph.size();
    Matrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        l(i, i) = static_cast<double>(graph.degree(i));
        for (std::size_t j = 0; j < n; ++j)
            if (graph.has_edge(i, j)) l(i, j) = -1.0;
    }
    return l;
}

bool is_generalized_laplacian(const Matrix& m, const Graph& graph) {
    if (m.rows() != m.cols() || m.rows() != graph.size()) {
        throw PreconditionError("is_generalized_laplacian: matrix and graph sizes differ");
    }
    if (m.asymmetry() > 1e-12) throw PreconditionError("is_generalized_laplacian: matrix is not symmetric");
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (i == j) continue;
            if (graph.has_edge(i, j) ? !(m(i, j) < 0.0) : m(i, j) != 0.0) return false;
        }
    }
    return true;
}

EigenSystem eigh(const Matrix& m) {
    const std::size_t n = m.rows();
    if (m.cols() != n) throw PreconditionError("eigh: matrix is not square");
    const double scale = m.max_abs();
    if (m.asymmetry() > 1e-10 * std::max(1.0, scale)) throw PreconditionError("eigh: matrix is not symmetric");

    Matrix a = m;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (m(i, j) + m(j, i));
    Matrix v = Matrix::identity(n);
    const double fro = a.frobenius_norm();

    constexpr int kMaxSweeps = 100;
    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (std::sqrt(2.0 * off) <= 1e-15 * fro || off == 0.0) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                if (std::abs(apq) <= 1e-18 * (std::abs(app) + std::abs(aqq))) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = a(p, k) = c * akp - s * akq;
                    a(k, q) = a(q, k) = s * akp + c * akq;
                }
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (!converged) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        throw NumericalFailure("eigh: Jacobi sweeps did not converge", std::sqrt(2.0 * off), std::sqrt(2.0 * off));
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&a](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    EigenSystem out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        out.values[k] = a(src, src);
        std::size_t lead = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::abs(v(i, src)) > std::abs(v(lead, src))) lead = i;
        const double sign = v(lead, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = sign * v(i, src);
    }
    return out;
}

bool SpectralReport::all_pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& kv) { return kv.second; });
}

SpectralReport check_cheeger(const Graph& graph) {
    const std::size_t n = graph.size();
    if (n < 2) throw DomainError("check_cheeger needs at least two vertices");
    if (n > kCheegerMaxVertices) {
        throw SizeLimitError("check_cheeger: exhaustive search is limited to n <= 16; skip this check for larger profiles");
    }
    SpectralReport r;
    r.laplacian = laplacian(graph);
    const auto eig = eigh(r.laplacian);
    r.eigenvalues = eig.values;
    r.lambda2 = eig.values[1];
    r.cheeger = cheeger_constant(graph);
    r.max_degree = graph.max_degree();
    r.components = graph.component_count();

    constexpr double tol = 1e-9;
    const double i = r.cheeger;
    const double lower = r.max_degree == 0 ? 0.0 : i * i / (2.0 * static_cast<double>(r.max_degree));
    r.verdicts["cheeger_upper"] = 2.0 * i >= r.lambda2 - tol;
    r.verdicts["cheeger_lower"] = r.lambda2 >= lower - tol;
    r.verdicts["psd"] = std::all_of(r.eigenvalues.begin(), r.eigenvalues.end(), [](double e) { return e >= -1e-10; });
    const auto zeros = static_cast<std::size_t>(
        std::count_if(r.eigenvalues.begin(), r.eigenvalues.end(), [](double e) { return std::abs(e) <= 1e-9; }));
    r.verdicts["zero_multiplicity"] = zeros == r.components;

    if (r.components == 1) {
        const double nd = static_cast<double>(n);
        const double gap_floor = 2.0 / (nd * nd * nd);
        if (n == 2) {
            r.verdicts["theorem3_gap"] = r.lambda2 >= gap_floor - tol;
            r.notes.push_back("n = 2: the isoperimetric floor i(G) >= 2/n holds with equality; gap checked non-strictly");
        } else {
            r.verdicts["theorem3_gap"] = r.lambda2 > gap_floor;
        }
        // |dS| >= 1 and |S| <= n/2 give i(G) >= 2/n; equality occurs for even n
        // when a single edge splits the graph in half.
        r.verdicts["isoperimetric_floor"] = i >= 2.0 / nd - 1e-12;
        if (std::abs(i - 2.0 / nd) <= 1e-12) r.notes.push_back("i(G) attains the floor 2/n (balanced single-edge cut)");
    } else {
        r.notes.push_back("graph is disconnected: connected-graph floors not applicable");
    }
    return r;
}

Matrix update_matrix(const OpinionState& state, std::span<const double> alpha) {
    if (alpha.size() != state.n()) throw ConfigError("update_matrix: alpha has the wrong length");
    Matrix b = averaging_matrix(state);
    for (std::size_t i = 0; i < state.n(); ++i) {
        for (std::size_t j = 0; j < state.n(); ++j) b(i, j) *= (1.0 - alpha[i]);
        b(i, i) += alpha[i];
    }
    return b;
}

UpdateFactorization update_factorization(const OpinionState& state, std::span<const double> alpha) {
    const std::size_t n = state.n();
    if (alpha.size() != n) throw ConfigError("update_factorization: alpha has the wrong length");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(alpha[i] < 1.0)) {
            throw PreconditionError("update_factorization requires alpha_i < 1 for every agent (agent " +
                                    std::to_string(i) + " is absolutely stubborn)");
        }
    }
    UpdateFactorization f;
    f.i_minus_b = Matrix::identity(n) - update_matrix(state, alpha);
    const Profile profile = build_profile(state);
    f.laplacian = laplacian(profile);
    f.stubborn_factor.resize(n);
    f.degree_factor.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        f.stubborn_factor[i] = 1.0 - alpha[i];
        f.degree_factor[i] = 1.0 / (1.0 + static_cast<double>(profile.graph.degree(i)));
    }
    const Matrix product =
        Matrix::diagonal(f.stubborn_factor) * (Matrix::diagonal(f.degree_factor) * f.laplacian);
    f.residual = (f.i_minus_b - product).max_abs();
    return f;
}

bool ChainCheck::all_pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& kv) { return kv.second; });
}

namespace {

// Smallest eigenvalue simple and its eigenvector strictly positive.
bool perron_frobenius_holds(const Matrix& m) {
    const auto eig = eigh(m);
    const double spread = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
    const double tol = 1e-12 * std::max(spread, std::numeric_limits<double>::min());
    if (eig.values.size() > 1 && !(eig.values[1] - eig.values[0] > tol)) return false;
    for (std::size_t i = 0; i < m.rows(); ++i)
        if (!(eig.vectors(i, 0) > 0.0)) return false;
    return true;
}

}  // namespace

ChainCheck lambda2_chain_check(const OpinionState& state, std::span<const double> alpha, std::uint64_t seed,
                               std::size_t samples) {
    const std::size_t n = state.n();
    if (n > kCheegerMaxVertices) throw SizeLimitError("lambda2_chain_check is limited to n <= 16");
    const Profile profile = build_profile(state);
    if (!profile.connected()) {
        throw PreconditionError("lambda2_chain_check requires a connected profile (zero eigenvalue would not be simple)");
    }
    const UpdateFactorization f = update_factorization(state, alpha);
    const Matrix& q = f.i_minus_b;
    const Matrix qtq = q.transpose() * q;
    const auto eig_q = eigh(qtq);
    const auto eig_l = eigh(f.laplacian);

    ChainCheck c;
    c.lambda2_laplacian = n > 1 ? eig_l.values[1] : 0.0;
    c.lambda2_qtq = n > 1 ? eig_q.values[1] : 0.0;
    const double max_alpha = *std::max_element(alpha.begin(), alpha.end());
    const double s = (1.0 - max_alpha) / static_cast<double>(n);
    c.chain_bound = s * s * c.lambda2_laplacian * c.lambda2_laplacian;

    const double top = std::max(eig_q.values.back(), std::numeric_limits<double>::min());
    const double zero_tol = 1e-12 * top;
    const std::vector<double> ones(n, 1.0);
    const auto q_ones = qtq * std::span<const double>(ones);
    const bool ones_in_kernel = norm(q_ones) <= 1e-9 * top * std::sqrt(static_cast<double>(n));
    if (n == 1) {
        c.verdicts["zero_simple"] = std::abs(eig_q.values[0]) <= 1e-9 && ones_in_kernel;
    } else {
        c.verdicts["zero_simple"] =
            std::abs(eig_q.values[0]) <= zero_tol && eig_q.values[1] > zero_tol && ones_in_kernel;
    }
    c.verdicts["chain_bound"] = c.lambda2_qtq >= c.chain_bound * (1.0 - 1e-9) - 1e-14 * top;

    c.verdicts["perron_frobenius"] = perron_frobenius_holds(f.laplacian);
    CounterRng rng(seed, 0x9e11);
    Matrix generalized(n, n);
    for (const auto& [i, j] : profile.graph.edges()) generalized(i, j) = generalized(j, i) = -(0.1 + rng.uniform());
    for (std::size_t i = 0; i < n; ++i) generalized(i, i) = 4.0 * rng.uniform() - 2.0;
    c.verdicts["perron_frobenius_generalized"] = perron_frobenius_holds(generalized);

    // Courant-Fischer: x'Q'Qx >= lambda2(Q'Q) on unit vectors orthogonal to 1.
    double min_rayleigh = std::numeric_limits<double>::infinity();
    if (n > 1) {
        std::vector<double> x(n);
        for (std::size_t k = 0; k < samples; ++k) {
            double mean = 0.0;
            for (auto& xi : x) {
                xi = 2.0 * rng.uniform() - 1.0;
                mean += xi;
            }
            mean /= static_cast<double>(n);
            for (auto& xi : x) xi -= mean;
            const double len = norm(x);
            if (len == 0.0) continue;
            for (auto& xi : x) xi /= len;
            const auto qx = q * std::span<const double>(x);
            min_rayleigh = std::min(min_rayleigh, dot(qx, qx));
        }
    }
    c.min_rayleigh = min_rayleigh;
    c.verdicts["courant_fischer"] = n == 1 || min_rayleigh >= c.lambda2_qtq - 1e-9;
    return c;
}

}  // namespace mixed_hk

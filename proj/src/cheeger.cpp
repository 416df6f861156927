#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <vector>

#include "mixed_hk/errors.hpp"
#include "mixed_hk/spectral.hpp"

namespace mixed_hk {

namespace {

std::vector<std::uint32_t> adjacency_masks(const Graph& graph) {
    const std::size_t n = graph.size();
    if (n == 0) throw DomainError("cheeger_constant of an empty graph");
    if (n > kCheegerMaxVertices) {
        throw SizeLimitError("cheeger_constant: exhaustive search is limited to n <= 16; skip this check for larger profiles");
    }
    std::vector<std::uint32_t> masks(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (graph.has_edge(i, j)) masks[i] |= (1u << j);
    return masks;
}

inline double subset_ratio(std::uint32_t subset, const std::vector<std::uint32_t>& masks) {
    const std::uint32_t outside = ~subset;
    int boundary = 0;
    for (std::uint32_t rest = subset; rest != 0; rest &= rest - 1) {
        boundary += std::popcount(masks[static_cast<std::size_t>(std::countr_zero(rest))] & outside);
    }
    return static_cast<double>(boundary) / static_cast<double>(std::popcount(subset));
}

}  // namespace

double cheeger_constant_serial(const Graph& graph) {
    const auto masks = adjacency_masks(graph);
    const auto n = static_cast<int>(masks.size());
    const std::uint32_t limit = 1u << n;
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t subset = 1; subset < limit; ++subset) {
        if (2 * std::popcount(subset) > n) continue;
        best = std::min(best, subset_ratio(subset, masks));
    }
    return best;
}

double cheeger_constant(const Graph& graph) {
    const auto masks = adjacency_masks(graph);
    const auto n = static_cast<int>(masks.size());
    const std::int64_t limit = std::int64_t{1} << n;
    double best = std::numeric_limits<double>::infinity();
#pragma omp parallel for reduction(min : best) schedule(static)
    for (std::int64_t s = 1; s < limit; ++s) {
        const auto subset = static_cast<std::uint32_t>(s);
        if (2 * std::popcount(subset) > n) continue;
        best = std::min(best, subset_ratio(subset, masks));
    }
    return best;
}

}  // namespace mixed_hk

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mixed_hk/linalg.hpp"

namespace mixed_hk {

/// One term c * (x_plus - x_minus) of a matched form, c >= 0.
struct MatchedTerm {
    double c = 0.0;
    std::size_t plus = 0;
    std::size_t minus = 0;
};

/// sum_i lambda_i x_i rewritten as a nonnegative combination of differences.
struct MatchedForm {
    std::vector<MatchedTerm> terms;
    double positive_mass = 0.0;
};

/// Pairs the positive coefficients of a zero-sum vector with the negative
/// ones: repeatedly take the most negative entry -L, consume the largest
/// positive entries until their running sum reaches L, emit one difference
/// term per consumed entry, and continue on what is left.
///
/// Throws PreconditionError unless |sum lambda| <= 1e-12 * sum |lambda|.
MatchedForm match_decomposition(std::span<const double> lambda);

/// Overload taking the points only to check that the shapes agree.
MatchedForm match_decomposition(std::span<const double> lambda, const Matrix& points);

struct DecompositionCheck {
    bool ok = false;
    double residual = 0.0;     // |sum lambda_i x_i - sum c (x_plus - x_minus)|
    double mass_error = 0.0;   // |positive_mass - sum_{lambda_j >= 0} lambda_j|
};

DecompositionCheck verify_decomposition(std::span<const double> lambda, const Matrix& points, const MatchedForm& form);

}  // namespace mixed_hk

#include "mixed_hk/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mixed_hk/errors.hpp"
#include "mixed_hk/profile.hpp"

namespace mixed_hk {

namespace {

struct Entry {
    double value;
    std::size_t index;
};

}  // namespace

MatchedForm match_decomposition(std::span<const double> lambda) {
    if (lambda.empty()) throw PreconditionError("match_decomposition needs n >= 1");
    double sum = 0.0, total_abs = 0.0;
    for (double v : lambda) {
        if (!std::isfinite(v)) throw PreconditionError("match_decomposition: coefficients must be finite");
        sum += v;
        total_abs += std::abs(v);
    }
    if (std::abs(sum) > 1e-12 * total_abs) {
        std::ostringstream msg;
        msg << "match_decomposition: coefficients sum to " << sum << ", not zero";
        throw PreconditionError(msg.str());
    }

    std::vector<Entry> work;
    work.reserve(lambda.size());
    for (std::size_t i = 0; i < lambda.size(); ++i) work.push_back({lambda[i], i});

    // Absorb the floating drift into the largest-magnitude coefficient.
    if (sum != 0.0 && !work.empty()) {
        auto big = std::max_element(work.begin(), work.end(),
                                    [](const Entry& a, const Entry& b) { return std::abs(a.value) < std::abs(b.value); });
        big->value -= sum;
    }

    MatchedForm form;
    while (true) {
        std::erase_if(work, [](const Entry& e) { return e.value == 0.0; });
        if (work.size() < 2) break;
        std::sort(work.begin(), work.end(), [](const Entry& a, const Entry& b) {
            return a.value != b.value ? a.value > b.value : a.index < b.index;
        });
        const Entry sink = work.back();
        if (sink.value >= 0.0 || work.front().value <= 0.0) break;  // rounding leftovers only
        const double target = -sink.value;

        const auto positives = static_cast<std::size_t>(
            std::find_if(work.begin(), work.end(), [](const Entry& e) { return e.value <= 0.0; }) - work.begin());
        double prefix = 0.0;
        std::size_t pivot = positives - 1;
        for (std::size_t m = 0; m < positives; ++m) {
            if (prefix + work[m].value >= target) {
                pivot = m;
                break;
            }
            prefix += work[m].value;
        }
        if (pivot == positives - 1) {
            // Recompute the prefix up to the pivot for the fallback path.
            prefix = 0.0;
            for (std::size_t m = 0; m < pivot; ++m) prefix += work[m].value;
        }

        for (std::size_t k = 0; k < pivot; ++k) form.terms.push_back({work[k].value, work[k].index, sink.index});
        form.terms.push_back({target - prefix, work[pivot].index, sink.index});

        std::vector<Entry> rest;
        rest.reserve(work.size());
        rest.push_back({std::max(0.0, prefix + work[pivot].value - target), work[pivot].index});
        for (std::size_t k = pivot + 1; k + 1 < work.size(); ++k) rest.push_back(work[k]);
        work = std::move(rest);
    }

    for (const auto& term : form.terms) form.positive_mass += term.c;
    return form;
}

MatchedForm match_decomposition(std::span<const double> lambda, const Matrix& points) {
    if (points.rows() != lambda.size()) throw ConfigError("match_decomposition: one point per coefficient expected");
    return match_decomposition(lambda);
}

DecompositionCheck verify_decomposition(std::span<const double> lambda, const Matrix& points, const MatchedForm& form) {
    if (points.rows() != lambda.size()) throw ConfigError("verify_decomposition: one point per coefficient expected");
    const std::size_t d = points.cols();
    std::vector<double> r(d, 0.0);
    double sum = 0.0, total_abs = 0.0, positive = 0.0, max_norm = 0.0;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        sum += lambda[i];
        total_abs += std::abs(lambda[i]);
        if (lambda[i] >= 0.0) positive += lambda[i];
        max_norm = std::max(max_norm, norm(points.row(i)));
        for (std::size_t k = 0; k < d; ++k) r[k] += lambda[i] * points(i, k);
    }
    double mass = 0.0;
    for (const auto& term : form.terms) {
        if (term.plus >= points.rows() || term.minus >= points.rows()) {
            return {false, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        }
        for (std::size_t k = 0; k < d; ++k) r[k] -= term.c * (points(term.plus, k) - points(term.minus, k));
        mass += term.c;
    }

    DecompositionCheck check;
    check.residual = norm(r);
    check.mass_error = std::abs(form.positive_mass - positive);
    const double diam = lambda.empty() ? 0.0 : diameter(points);
    // The zero-sum drift times a point location cannot be written as differences.
    const double allowed = 1e-10 * total_abs * diam +
                           (std::abs(sum) + 64.0 * std::numeric_limits<double>::epsilon() * total_abs) * max_norm;
    const double mass_allowed = 1e-10 * std::max(1.0, total_abs);
    const bool terms_consistent = std::abs(mass - form.positive_mass) <= mass_allowed;
    const bool nonnegative = std::all_of(form.terms.begin(), form.terms.end(),
                                         [](const MatchedTerm& t) { return t.c >= -1e-15; });
    check.ok = check.residual <= allowed && check.mass_error <= mass_allowed && terms_consistent && nonnegative;
    return check;
}

}  // namespace mixed_hk

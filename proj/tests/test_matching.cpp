#include <doctest.h>

#include <cmath>

#include "mixed_hk/errors.hpp"
#include "mixed_hk/matching.hpp"
#include "mixed_hk/profile.hpp"
#include "mixed_hk/rng.hpp"
#include "mixed_hk/simulate.hpp"

using namespace mixed_hk;

namespace {

std::vector<double> zero_sum(CounterRng& rng, std::size_t n) {
    std::vector<double> l(n);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto pick = rng.below(5);
        l[i] = pick == 0 ? 0.0 : pick == 1 ? std::round(rng.uniform() * 4 - 2) : rng.uniform() * 2 - 1;
        sum += l[i];
    }
    l[n - 1] = -sum;
    return l;
}

}  // namespace

TEST_CASE("two-term base case") {
    const std::vector<double> l{1, -1};
    const MatchedForm f = match_decomposition(l);
    REQUIRE(f.terms.size() == 1);
    CHECK(f.terms[0].c == 1.0);
    CHECK(f.terms[0].plus == 0);
    CHECK(f.terms[0].minus == 1);
    CHECK(f.positive_mass == 1.0);
}

TEST_CASE("one positive against two negatives") {
    const std::vector<double> l{2, -1, -1};
    const MatchedForm f = match_decomposition(l);
    REQUIRE(f.terms.size() == 2);
    CHECK(f.positive_mass == 2.0);
    for (const auto& t : f.terms) {
        CHECK(t.c == 1.0);
        CHECK(t.plus == 0);
    }
    CHECK(f.terms[0].minus != f.terms[1].minus);
    const Matrix pts(3, 2, {0, 0, 1, 0, 0, 1});
    CHECK(verify_decomposition(l, pts, f).ok);
}

TEST_CASE("all-zero input gives the empty form") {
    const std::vector<double> l(3, 0.0);
    const MatchedForm f = match_decomposition(l);
    CHECK(f.terms.empty());
    CHECK(f.positive_mass == 0.0);
    CHECK(verify_decomposition(l, Matrix(3, 1, {1, 2, 3}), f).ok);
}

TEST_CASE("non-zero-sum input is rejected") {
    const std::vector<double> l{1, -0.5};
    CHECK_THROWS_AS(match_decomposition(l), PreconditionError);
    const std::vector<double> none;
    CHECK_THROWS_AS(match_decomposition(none), PreconditionError);
}

TEST_CASE("tampered coefficient is detected") {
    const std::vector<double> l{0.5, 0.25, -0.75};
    const Matrix pts(3, 1, {0, 1, 3});
    MatchedForm f = match_decomposition(l);
    REQUIRE(verify_decomposition(l, pts, f).ok);
    f.terms[0].c += 0.1;
    const DecompositionCheck bad = verify_decomposition(l, pts, f);
    CHECK_FALSE(bad.ok);
    CHECK(bad.residual > 0.0);
}

TEST_CASE("random zero-sum decompositions verify") {
    CounterRng rng(101);
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n = 1 + rng.below(12);
        const std::size_t d = 1 + rng.below(4);
        const auto l = zero_sum(rng, n);
        const Matrix pts = random_opinions(n, d, rng.next(), -3, 3);
        const MatchedForm f = match_decomposition(l, pts);
        const DecompositionCheck chk = verify_decomposition(l, pts, f);
        REQUIRE(chk.ok);
        CHECK(f.terms.size() <= 2 * n);
        double mass = 0.0, abs_sum = 0.0;
        for (const auto& t : f.terms) {
            CHECK(t.c >= -1e-15);
            mass += t.c;
        }
        for (double v : l) abs_sum += std::abs(v);
        CHECK(std::abs(mass - f.positive_mass) <= 1e-12 * std::max(1.0, abs_sum));

        // |sum lambda_i x_i| <= positive mass * diameter
        std::vector<double> combo(d, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < d; ++k) combo[k] += l[i] * pts(i, k);
        if (n >= 1) CHECK(norm(combo) <= f.positive_mass * diameter(pts) + 1e-12 * std::max(1.0, abs_sum));
    }
}

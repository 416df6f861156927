#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mixed_hk/errors.hpp"
#include "mixed_hk/monitors.hpp"
#include "mixed_hk/profile.hpp"
#include "mixed_hk/rng.hpp"
#include "mixed_hk/simulate.hpp"

using namespace mixed_hk;

namespace {

OpinionState make(std::size_t n, std::size_t d, std::vector<double> x, double eps) {
    return {0, Matrix(n, d, std::move(x)), eps};
}

// Direct evaluation of the definition over ordered distinct pairs.
double beta_oracle(const std::vector<double>& a) {
    double best = -1.0;
    const double n = static_cast<double>(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if (i != j && a[i] >= a[j]) best = std::max(best, a[i] - (a[i] - a[j]) / n);
    return best;
}

double energy_oracle(const OpinionState& s) {
    double z = 0.0;
    for (std::size_t i = 0; i < s.n(); ++i)
        for (std::size_t j = 0; j < s.n(); ++j) z += std::min(squared_distance(s.x.row(i), s.x.row(j)), s.epsilon * s.epsilon);
    return z;
}

Trajectory run(std::size_t n, std::size_t d, double eps, Matrix x, StubbornnessSchedule schedule, std::size_t steps,
               double tol = 1e-12) {
    ModelConfig c;
    c.n = n;
    c.d = d;
    c.epsilon = eps;
    c.max_steps = steps;
    c.consensus_tol = tol;
    c.initial.coords = std::move(x);
    c.schedule = std::move(schedule);
    return simulate(c);
}

}  // namespace

TEST_CASE("energy") {
    CHECK(energy(make(2, 1, {0, 2}, 1.0)) == 2.0);
    CHECK(energy(make(3, 2, {1, 1, 1, 1, 1, 1}, 0.3)) == 0.0);
    CHECK(energy(make(2, 1, {0, 0.75}, 0.75)) == 2 * 0.75 * 0.75);
    CounterRng rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(10);
        const OpinionState s{0, random_opinions(n, 3, rng.next()), 0.1 + rng.uniform()};
        const double z = energy(s);
        CHECK(z == doctest::Approx(energy_oracle(s)).epsilon(1e-12));
        CHECK(z >= 0.0);
        CHECK(z <= static_cast<double>(n * n) * s.epsilon * s.epsilon);
    }
}

TEST_CASE("energy descent lower bound") {
    const OpinionState s = make(2, 1, {0, 1}, 1.0);
    const std::vector<double> half{0.5, 0.5};
    const OpinionState next = step(s, half);
    CHECK(nl8_lower_bound(s, next, half) == 1.5);
    CHECK(energy(s) - energy(next) == 1.5);

    const std::vector<double> ones{1, 1};
    CHECK(nl8_lower_bound(s, step(s, ones), ones) == 0.0);

    const OpinionState r = make(3, 1, {0, 0.2, 0.9}, 0.5);
    const std::vector<double> zero(3, 0.0);
    const OpinionState rn = step(r, zero);
    double disp = 0.0;
    for (double v : displacement_sq(r, rn)) disp += v;
    CHECK(nl8_lower_bound(r, rn, zero) == doctest::Approx(4 * disp));
}

TEST_CASE("energy never increases and dominates the bound on random steps") {
    CounterRng rng(2);
    for (int trial = 0; trial < 3000; ++trial) {
        const std::size_t n = 1 + rng.below(10);
        const std::size_t d = 1 + rng.below(3);
        const OpinionState s{0, random_opinions(n, d, rng.next()), 0.05 + rng.uniform()};
        std::vector<double> alpha(n);
        for (auto& a : alpha) a = rng.below(4) == 0 ? static_cast<double>(rng.below(2)) : rng.uniform();
        const StepMetrics m = step_metrics(s, step(s, alpha), alpha, s.epsilon / 4);
        CHECK(m.nl8_ok);
        CHECK(m.energy_monotone);
        CHECK(m.non_expansion_ok);
    }
}

TEST_CASE("beta") {
    const std::vector<double> same(4, 0.3);
    CHECK(beta(same) == doctest::Approx(0.3));
    const std::vector<double> three{0.9, 0.5, 0.1};
    CHECK(beta(three) == doctest::Approx(0.9 - 0.4 / 3));
    const std::vector<double> two{1, 0};
    CHECK(beta(two) == 0.5);
    const std::vector<double> one{0.4};
    CHECK_THROWS_AS(beta(one), DomainError);
    CHECK(beta_including_self_pairs(three) == 0.9);

    CounterRng rng(3);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<double> a(2 + rng.below(9));
        for (auto& v : a) v = rng.below(3) == 0 ? static_cast<double>(rng.below(2)) : rng.uniform();
        CHECK(beta(a) == doctest::Approx(beta_oracle(a)).epsilon(1e-15));
        CHECK(beta(a) <= 1.0);
    }
}

TEST_CASE("contraction check") {
    const OpinionState s = make(2, 1, {0, 1}, 1.0);
    const std::vector<double> half{0.5, 0.5};
    const ContractionVerdict v = contraction_check(s, step(s, half), half);
    CHECK(v.contraction == Verdict::pass);
    CHECK(v.beta == 0.5);
    CHECK(v.diam_after == 0.5 * v.diam_before);

    const OpinionState t = make(4, 2, {0, 0, 0.1, 0, 0, 0.2, 0.3, 0.3}, 1.0);
    const std::vector<double> zero(4, 0.0);
    const ContractionVerdict sync = contraction_check(t, step(t, zero), zero);
    CHECK(sync.beta == 0.0);
    CHECK(sync.diam_after <= 1e-15);

    const std::vector<double> ones(4, 1.0);
    const ContractionVerdict frozen = contraction_check(t, step(t, ones), ones);
    CHECK(frozen.beta == 1.0);
    CHECK(frozen.diam_after == frozen.diam_before);

    const OpinionState apart = make(2, 1, {0, 3}, 1.0);
    CHECK(contraction_check(apart, step(apart, half), half).contraction == Verdict::not_applicable);
}

TEST_CASE("consensus envelope") {
    CounterRng rng(4);
    const Trajectory t = run(5, 2, 1.0, random_opinions(5, 2, 99, 0, 0.5), StubbornnessSchedule::constant_alpha(std::vector<double>(5, 0.5)), 60);
    const Theorem1Verdict v = theorem1_monitor(t, 0.99);
    CHECK(v.applicable);
    CHECK(v.start == 0);
    CHECK(v.hypothesis_met);
    CHECK(v.ok());
    const double d0 = diameter(t.states[0]);
    for (std::size_t k = 0; k < t.states.size(); ++k)
        CHECK(diameter(t.states[k]) <= std::pow(0.5, static_cast<double>(k)) * d0 + 1e-15);

    // Frozen steps end a simulation, so the alternating run is built by hand.
    Trajectory alt;
    alt.header = {1, 3, 1, 1.0, "table", 0};
    alt.states.push_back(Matrix(3, 1, {0, 0.4, 0.9}));
    for (int k = 0; k < 20; ++k) {
        const std::vector<double> a(3, k % 2 == 0 ? 1.0 : 0.5);
        alt.alphas.push_back(a);
        alt.states.push_back(step(alt.state(static_cast<std::size_t>(k)), a).x);
    }
    const Theorem1Verdict av = theorem1_monitor(alt, 0.99);
    CHECK(av.ok());
    CHECK(av.contracting_steps == 10);
    for (std::size_t k = 0; k < alt.states.size(); ++k)
        CHECK(diameter(alt.states[k]) <= std::pow(0.5, std::floor(k / 2.0)) * 0.9 + 1e-15);

    const Trajectory stuck = run(3, 1, 1.0, Matrix(3, 1, {0, 0.4, 0.9}), StubbornnessSchedule::constant_alpha({1, 1, 1}), 5);
    const Theorem1Verdict sv = theorem1_monitor(stuck, 0.99);
    CHECK(sv.applicable);
    CHECK_FALSE(sv.hypothesis_met);
}

TEST_CASE("summability terms") {
    const Trajectory iso = run(2, 1, 1.0, Matrix(2, 1, {0, 5}), StubbornnessSchedule::constant_alpha({0.3, 0.3}), 3);
    for (double v : theorem2_terms(iso, 0).terms) CHECK(v == 0.0);

    ModelConfig c;
    c.n = 10;
    c.d = 2;
    c.epsilon = 0.4;
    c.max_steps = 500;
    c.seed = 3;
    c.initial.kind = InitialSource::Kind::random;
    c.schedule = StubbornnessSchedule::power_law(10, 2.0);
    const Trajectory pl = simulate(c);
    for (std::size_t i = 0; i < 10; ++i) {
        const Theorem2Terms t = theorem2_terms(pl, i);
        CHECK(t.violations == 0);
        if (!t.partial_sums.empty()) CHECK(t.partial_sums.back() <= c.epsilon * std::numbers::pi * std::numbers::pi / 6);
    }

    const Trajectory stub = run(2, 1, 1.0, Matrix(2, 1, {0, 0.5}), StubbornnessSchedule::constant_alpha({1, 0}), 4, 1e-300);
    const Theorem2Terms t0 = theorem2_terms(stub, 0);
    for (std::size_t k = 0; k < t0.terms.size(); ++k) {
        CHECK(t0.terms[k] == 0.0);
        CHECK(t0.movements[k] == 0.0);
    }
    CHECK_THROWS_AS(theorem2_terms(stub, 2), ConfigError);
}

TEST_CASE("displacement lower bound") {
    const double eps = 1.0, delta = 0.5;
    const OpinionState s = make(2, 1, {0, eps}, eps);
    const std::vector<double> zero(2, 0.0);
    const Theorem3Verdict v = theorem3_step_bound(s, step(s, zero), zero, delta);
    CHECK(v.verdict == Verdict::pass);
    CHECK(v.lhs == doctest::Approx(eps * eps / 2));
    CHECK(v.rhs == doctest::Approx(2 * delta * delta / 256));

    const std::vector<double> near_one(2, 0.999999);
    CHECK(theorem3_step_bound(s, step(s, near_one), near_one, delta).verdict == Verdict::pass);

    const OpinionState apart = make(2, 1, {0, 3}, eps);
    CHECK(theorem3_step_bound(apart, step(apart, zero), zero, delta).verdict == Verdict::not_applicable);
    const std::vector<double> stubborn{1, 0};
    CHECK(theorem3_step_bound(s, step(s, stubborn), stubborn, delta).verdict == Verdict::not_applicable);
}

TEST_CASE("first delta-trivial time") {
    const Trajectory iso = run(3, 1, 1.0, Matrix(3, 1, {0, 5, 10}), StubbornnessSchedule::synchronous(3), 5);
    CHECK(tau_delta(iso, 0.1) == std::optional<std::size_t>(0));

    const Trajectory halving = run(2, 1, 1.0, Matrix(2, 1, {-0.5, 0.5}), StubbornnessSchedule::constant_alpha({0.5, 0.5}), 10, 1e-300);
    CHECK(tau_delta(halving, 0.25) == std::optional<std::size_t>(2));

    const Trajectory sync = run(4, 1, 1.0, Matrix(4, 1, {0, 0.2, 0.5, 0.9}), StubbornnessSchedule::synchronous(4), 5);
    CHECK(tau_delta(sync, 0.25) == std::optional<std::size_t>(1));

    const Trajectory never = run(2, 1, 1.0, Matrix(2, 1, {0, 1}), StubbornnessSchedule::constant_alpha({1, 1}), 3);
    CHECK_FALSE(tau_delta(never, 0.25).has_value());
}

TEST_CASE("closed-form bounds") {
    const CorollaryBounds b = corollary_bounds(3, 1.0, 0.25, 0.5);
    CHECK(b.tau_bound == doctest::Approx(472392.0).epsilon(1e-15));
    CHECK(b.a_bound == doctest::Approx(118098.0).epsilon(1e-15));
    const CorollaryBounds sync = corollary_bounds(4, 2.0, 0.5, 0.0);
    CHECK(sync.tau_bound == doctest::Approx(std::pow(4.0, 10) * 16 / 8));
    CHECK_THROWS_AS(corollary_bounds(3, 1.0, 0.25, 1.0), DomainError);
    CHECK_THROWS_AS(corollary_bounds(3, 1.0, 2.0, 0.5), DomainError);
}

TEST_CASE("component interaction equivalence") {
    const double eps = 1.0, delta = 0.25;
    const Trajectory far = run(4, 1, eps, Matrix(4, 1, {0, 0.1, 2.5, 2.6}), StubbornnessSchedule::synchronous(4), 5);
    const InteractionReport fr = interaction_equivalence(far, delta);
    REQUIRE_FALSE(fr.steps.empty());
    for (const auto& s : fr.steps) {
        CHECK_FALSE(s.delta_nontrivial_next);
        CHECK_FALSE(s.components_interact);
        CHECK_FALSE(s.half_eps_nontrivial_next);
    }

    // A pair straddling the foot of a third agent: pointwise more than eps
    // apart, hull distance below eps, and merged once the pair collapses.
    const double h = 0.995;
    const Trajectory contact = run(3, 2, eps, Matrix(3, 2, {-delta / 2, 0, delta / 2, 0, 0, h}),
                                   StubbornnessSchedule::synchronous(3), 5);
    REQUIRE(build_profile(contact.state(0)).component_count == 2);
    const InteractionReport cr = interaction_equivalence(contact, delta);
    REQUIRE_FALSE(cr.steps.empty());
    CHECK(cr.steps[0].t == 0);
    CHECK(cr.steps[0].delta_nontrivial_next);
    CHECK(cr.steps[0].components_interact);
    CHECK(cr.steps[0].half_eps_nontrivial_next);
    CHECK(cr.violations == 0);
    CHECK(cr.a_set == std::vector<std::size_t>{1});
    CHECK(cr.a_set_half_eps_violations == 0);
    CHECK(cr.a_bound_ok);

    const Trajectory single = run(3, 1, eps, Matrix(3, 1, {0, 0.1, 0.2}), StubbornnessSchedule::constant_alpha({0.5, 0.5, 0.5}), 5);
    for (const auto& s : interaction_equivalence(single, delta).steps) {
        CHECK_FALSE(s.components_interact);
        CHECK_FALSE(s.delta_nontrivial_next);
        CHECK_FALSE(s.half_eps_nontrivial_next);
    }
    CHECK_THROWS_AS(interaction_equivalence(single, 0.3), DomainError);
}

TEST_CASE("post-hoc check over random runs") {
    CounterRng rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        ModelConfig c;
        c.n = 2 + rng.below(8);
        c.d = 1 + rng.below(2);
        c.epsilon = 0.2 + 0.3 * rng.uniform();
        c.max_steps = 200;
        c.seed = rng.next();
        c.initial.kind = InitialSource::Kind::random;
        std::vector<double> alpha(c.n);
        for (auto& a : alpha) a = 0.9 * rng.uniform();
        c.schedule = trial % 2 == 0 ? StubbornnessSchedule::constant_alpha(alpha) : StubbornnessSchedule::asynchronous(c.n);
        const Trajectory t = simulate(c);
        const CheckReport r = check_trajectory(t);
        INFO("trial " << trial);
        CHECK(r.ok());
        CHECK(r.budget_ok);
        if (c.schedule.kind == ScheduleKind::asynchronous) CHECK(single_mover_violations(t) == 0);
    }
}

TEST_CASE("online monitors match the post-hoc report") {
    ModelConfig c;
    c.n = 8;
    c.d = 2;
    c.epsilon = 0.3;
    c.max_steps = 100;
    c.seed = 17;
    c.initial.kind = InitialSource::Kind::random;
    c.schedule = StubbornnessSchedule::constant_alpha(std::vector<double>(8, 0.4));
    c.monitors = {true, true, true, true, true, true, 0.0};
    const Trajectory t = simulate(c);
    CHECK(t.metrics.size() == t.steps());
    CHECK(t.online_violations == 0);
    const CheckReport r = check_trajectory(t);
    for (std::size_t k = 0; k < t.steps(); ++k) {
        CHECK(t.metrics[k].energy == r.steps[k].energy);
        CHECK(t.metrics[k].nl8_rhs == r.steps[k].nl8_rhs);
    }
}

TEST_CASE("power-law stubbornness settles") {
    ModelConfig c;
    c.n = 20;
    c.d = 2;
    c.epsilon = 0.3;
    c.max_steps = 100000;
    c.consensus_tol = 1e-300;
    c.seed = 13;
    c.initial.kind = InitialSource::Kind::random;
    c.schedule = StubbornnessSchedule::power_law(20, 2.0);
    const Trajectory t = simulate(c);
    const std::size_t last = t.states.size() - 1;
    REQUIRE(last >= 100);
    double tail = 0.0, spread = 0.0;
    for (std::size_t i = 0; i < c.n; ++i) {
        tail = std::max(tail, distance(t.states[last].row(i), t.states[last - 1].row(i)));
        for (std::size_t k = last - 100; k < last; ++k)
            spread = std::max(spread, distance(t.states[last].row(i), t.states[k].row(i)));
    }
    CHECK(tail < 1e-9);
    CHECK(spread < 1e-8);
}

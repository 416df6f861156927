#include "mixed_hk/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mixed_hk/errors.hpp"
#include "mixed_hk/monitors.hpp"
#include "mixed_hk/profile.hpp"
#include "mixed_hk/trajectory_io.hpp"

namespace mixed_hk {

bool ScenarioReport::passed() const {
    return std::all_of(claims.begin(), claims.end(), [](const ScenarioClaim& c) { return c.pass; });
}

std::vector<std::string> scenario_names() {
    return {"example1", "example2", "example3", "sync-hk", "async-hk", "powerlaw-a2"};
}

namespace {

ModelConfig base(std::size_t n, std::size_t d, double eps, std::size_t max_steps) {
    ModelConfig c;
    c.n = n;
    c.d = d;
    c.epsilon = eps;
    c.max_steps = max_steps;
    return c;
}

void set_inline(ModelConfig& c, std::vector<double> coords) {
    c.initial.kind = InitialSource::Kind::inline_coords;
    c.initial.coords = Matrix(c.n, c.d, std::move(coords));
}

void set_random(ModelConfig& c, std::uint64_t seed) {
    c.seed = seed;
    c.initial.kind = InitialSource::Kind::random;
    c.initial.low = 0.0;
    c.initial.high = 1.0;
}

std::string fmt(double v) { return format_double(v); }

std::string fmt_point(std::span<const double> p) {
    std::string out = "(";
    for (std::size_t k = 0; k < p.size(); ++k) out += (k ? ", " : "") + fmt(p[k]);
    return out + ")";
}

struct Claims {
    std::vector<ScenarioClaim> list;
    void add(std::string name, std::string instantiates, std::string expected, std::string observed, bool pass) {
        list.push_back({std::move(name), std::move(instantiates), std::move(expected), std::move(observed), pass});
    }
};

bool monitors_clean(const Trajectory& traj, Claims& claims) {
    const CheckReport report = check_trajectory(traj);
    std::ostringstream obs;
    obs << "nl8=" << report.nl8_violations << " energy=" << report.energy_violations
        << " contraction=" << report.contraction_violations << " lemma3=" << report.lemma3_violations
        << " theorem2=" << report.theorem2_violations << " theorem3=" << report.theorem3_violations
        << " interaction=" << report.interaction_violations << " A_set=" << report.a_set_violations
        << " budget_ok=" << report.budget_ok << " tau_within_bound=" << report.tau_within_bound
        << " theorem1_ok=" << report.theorem1.ok();
    claims.add("monitors_report_no_violations", "every monitored inequality holds along the run", "0 violations",
               obs.str(), report.ok());
    return report.ok();
}

void example1_claims(const ModelConfig& c, const Trajectory& traj, Claims& claims) {
    bool repeated = false;
    for (std::size_t t = 0; t + 1 < traj.states.size(); ++t) repeated = repeated || traj.states[t] == traj.states[t + 1];
    claims.add("no_exact_steady_state_within_horizon", "termination time is not finite",
               "stop=max_steps after " + std::to_string(c.max_steps) + " steps, no repeated state",
               "stop=" + to_string(traj.stop) + " after " + std::to_string(traj.steps()) + " steps" +
                   (repeated ? ", repeated state found" : ""),
               traj.stop == StopReason::max_steps && traj.steps() == c.max_steps && !repeated);

    double worst = 0.0;
    for (std::size_t t = 0; t < traj.states.size(); ++t) {
        const double gap = traj.states[t](1, 0) - traj.states[t](0, 0);
        worst = std::max(worst, std::abs(gap - c.epsilon * std::ldexp(1.0, -static_cast<int>(t))));
    }
    claims.add("gap_halves_every_step", "agents get closer each step but never meet",
               "max |gap(t) - eps/2^t| <= 1e-12", "max deviation " + fmt(worst), worst <= 1e-12);

    claims.add("agents_never_merge", "agents get closer each step but never meet", "no merge events",
               std::to_string(traj.events.size()) + " merge events", traj.events.empty());

    if (traj.steps() >= 1) {
        const OpinionState s0 = traj.state(0), s1 = traj.state(1);
        const double drop = energy(s0) - energy(s1);
        const double rhs = nl8_lower_bound(s0, s1, traj.alphas[0]);
        const double target = 1.5 * c.epsilon * c.epsilon;
        claims.add("energy_descent_tight_at_first_step", "energy descent lower bound",
                   "Z(0)-Z(1) = bound = 1.5 eps^2 within 1e-12", "Z(0)-Z(1)=" + fmt(drop) + " bound=" + fmt(rhs),
                   std::abs(drop - target) <= 1e-12 && std::abs(rhs - target) <= 1e-12);
        const ContractionVerdict cv = contraction_check(s0, s1, traj.alphas[0]);
        claims.add("contraction_tight_at_first_step", "diameter contraction by beta on epsilon-trivial profiles",
                   "diam(1) = beta diam(0) with beta = 1/2",
                   "beta=" + fmt(cv.beta) + " diam(0)=" + fmt(cv.diam_before) + " diam(1)=" + fmt(cv.diam_after),
                   cv.contraction == Verdict::pass && cv.beta == 0.5 &&
                       std::abs(cv.diam_after - 0.5 * cv.diam_before) <= 1e-12);
    }
}

void example2_claims(const ModelConfig& c, const Trajectory& traj, Claims& claims) {
    const auto it = std::find_if(traj.events.begin(), traj.events.end(),
                                 [](const MergeEvent& e) { return e.i == 0 && e.j == 1; });
    const bool merged = it != traj.events.end() && it->t == 1;
    claims.add("agents_0_and_1_merge_at_t1", "agents merging at t may depart at t+1", "merge event (t=1, 0, 1)",
               it == traj.events.end() ? "no merge of (0, 1)" : "merge at t=" + std::to_string(it->t), merged);
    const bool departed = merged && it->departed && it->departed_at == std::optional<std::size_t>(2);
    claims.add("agents_0_and_1_depart_at_t2", "agents merging at t may depart at t+1", "departure at t=2",
               merged && it->departed_at ? "departure at t=" + std::to_string(*it->departed_at) : "no departure",
               departed);

    if (traj.states.size() >= 3) {
        const Profile p1 = build_profile(traj.state(1));
        const bool trivial = p1.graph.edge_count() == 3;
        const bool moved = !(traj.states[2] == traj.states[1]);
        claims.add("epsilon_trivial_profile_without_steady_state",
                   "an epsilon-trivial profile need not be followed by a steady state",
                   "profile complete at t=1 and x(2) != x(1)",
                   std::string("complete=") + (trivial ? "yes" : "no") + " moved=" + (moved ? "yes" : "no"),
                   trivial && moved);

        const double e = c.epsilon;
        const Matrix& x = traj.states[2];
        const double want[3][2] = {{e / 2, 2 * e / 9}, {e / 2, e / 6}, {e / 2, e / 3}};
        double dev = 0.0;
        std::string obs;
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t k = 0; k < 2; ++k) dev = std::max(dev, std::abs(x(i, k) - want[i][k]));
            obs += (i ? " " : "") + fmt_point(x.row(i));
        }
        claims.add("positions_at_t2", "agents merging at t may depart at t+1",
                   "(eps/2, 2eps/9) (eps/2, eps/6) (eps/2, eps/3) within 1e-15", obs, dev <= 1e-15);
    } else {
        claims.add("positions_at_t2", "agents merging at t may depart at t+1", "three recorded states",
                   std::to_string(traj.states.size()) + " states", false);
    }
}

void example3_claims(const ModelConfig& c, const Trajectory& traj, Claims& claims) {
    const double e = c.epsilon;
    std::size_t found = 0, disagreements = 0;
    for (std::size_t t = 0; t < traj.states.size(); ++t) {
        for (double delta : {e, e / 2, e / 10}) {
            const auto fast = check_delta_equilibrium(traj.state(t), delta);
            const auto full = check_delta_equilibrium_exhaustive(traj.state(t), delta);
            if (fast.exists) ++found;
            if (fast.exists != full.exists) ++disagreements;
        }
    }
    claims.add("no_delta_equilibrium_at_any_time", "a delta-equilibrium may not exist for any 0 < delta <= eps",
               "no equilibrium for delta in {eps, eps/2, eps/10} at every t",
               std::to_string(found) + " (t, delta) pairs admit one; " + std::to_string(disagreements) +
                   " exhaustive disagreements",
               found == 0 && disagreements == 0);

    std::size_t touched = 0;
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < traj.states.size(); ++t) {
        const auto nbrs = neighborhoods(traj.state(t));
        if (nbrs[2].size() != 1) ++touched;
        const std::size_t pair[] = {0, 1};
        const std::size_t third[] = {2};
        min_gap = std::min(min_gap, hull_distance(traj.states[t], pair, third));
    }
    claims.add("vertex_2_isolated_throughout", "the third vertex is isolated all the time",
               "agent 2 has no neighbor at every t", std::to_string(touched) + " times with a neighbor", touched == 0);
    claims.add("hull_gap_is_exactly_epsilon", "a delta-equilibrium may not exist for any 0 < delta <= eps",
               "hull distance between {0,1} and {2} equals eps within 1e-9",
               "smallest hull distance " + fmt(min_gap), std::abs(min_gap - e) <= 1e-9 * e);
}

void sync_claims(const ModelConfig& c, const Trajectory& traj, Claims& claims) {
    const OpinionState last = traj.state(traj.states.size() - 1);
    const std::vector<double> zero(c.n, 0.0);
    const OpinionState after = step(last, zero);
    double drift = 0.0;
    for (double v : displacement_sq(last, after)) drift = std::max(drift, std::sqrt(v));
    claims.add("freezes_in_finite_time", "synchronous dynamics terminate in finite time",
               "stops before " + std::to_string(c.max_steps) + " steps and a further step moves no agent by more than " +
                   fmt(c.consensus_tol),
               "stop=" + to_string(traj.stop) + " after " + std::to_string(traj.steps()) + " steps, further drift " +
                   fmt(drift),
               traj.stop != StopReason::max_steps && drift <= c.consensus_tol);
    const auto verdict = check_delta_equilibrium(traj.state(traj.states.size() - 1), c.epsilon / 4);
    claims.add("final_state_is_delta_equilibrium", "limit clusters are more than eps apart",
               "delta-equilibrium exists for delta = eps/4", verdict.exists ? "exists" : "does not exist",
               verdict.exists);
    monitors_clean(traj, claims);
}

void async_claims(const ModelConfig&, const Trajectory& traj, Claims& claims) {
    const std::size_t bad = single_mover_violations(traj);
    claims.add("one_agent_updates_per_step", "asynchronous model is the alpha = 1 except one agent case",
               "0 steps where a second agent moves", std::to_string(bad) + " offending steps", bad == 0);
    std::size_t mismatch = 0;
    for (std::size_t t = 0; t < traj.steps(); ++t) {
        const auto& alpha = traj.alphas[t];
        const std::size_t i = static_cast<std::size_t>(std::find(alpha.begin(), alpha.end(), 0.0) - alpha.begin());
        if (i >= alpha.size()) {
            ++mismatch;
            continue;
        }
        const OpinionState s = traj.state(t);
        const auto nbrs = neighborhoods(s);
        for (std::size_t k = 0; k < s.d(); ++k) {
            double sum = 0.0;
            for (std::size_t j : nbrs[i]) sum += s.x(j, k);
            if (traj.states[t + 1](i, k) != sum / static_cast<double>(nbrs[i].size())) ++mismatch;
        }
    }
    claims.add("mover_jumps_to_neighbor_mean", "asynchronous model is the alpha = 1 except one agent case",
               "updated agent equals its neighborhood mean bitwise", std::to_string(mismatch) + " mismatches",
               mismatch == 0);
    monitors_clean(traj, claims);
}

void powerlaw_claims(const ModelConfig& c, const Trajectory& traj, Claims& claims) {
    const double e = c.epsilon;
    const double sum_bound = e * std::numbers::pi * std::numbers::pi / 6.0;
    std::size_t stepwise = 0;
    double largest_sum = 0.0;
    double late_move = 0.0;
    for (std::size_t i = 0; i < c.n; ++i) {
        const Theorem2Terms terms = theorem2_terms(traj, i);
        stepwise += terms.violations;
        if (!terms.partial_sums.empty()) largest_sum = std::max(largest_sum, terms.partial_sums.back());
        for (std::size_t t = 1000; t < terms.movements.size(); ++t) late_move = std::max(late_move, terms.movements[t]);
    }
    claims.add("movement_bounded_by_summand", "summable openness gives convergence",
               "|x_i(t+1) - x_i(t)| <= (1 - alpha_i)(1 - 1/|N_i|) d_t^i at every step",
               std::to_string(stepwise) + " violations", stepwise == 0);
    claims.add("partial_sums_bounded", "summable openness gives convergence", "every partial sum <= eps pi^2/6 = " + fmt(sum_bound),
               "largest partial sum " + fmt(largest_sum), largest_sum <= sum_bound);
    claims.add("late_movement_small", "summable openness gives convergence", "movement after t=1000 < 1e-6 eps",
               "largest late movement " + fmt(late_move), late_move < 1e-6 * e);
    monitors_clean(traj, claims);
}

}  // namespace

Scenario builtin_scenario(const std::string& name) {
    Scenario s;
    s.name = name;
    if (name == "example1") {
        // Translated to (-eps/2, eps/2) so the halving gap stays exact in
        // binary floating point for the whole horizon.
        s.description = "two agents with alpha = 1/2 approach forever without meeting";
        s.config = base(2, 1, 1.0, 200);
        s.config.consensus_tol = 1e-300;
        set_inline(s.config, {-0.5, 0.5});
        s.config.schedule = StubbornnessSchedule::constant_alpha({0.5, 0.5});
    } else if (name == "example2") {
        s.description = "agents 0 and 1 merge at t=1 and separate at t=2";
        s.config = base(3, 2, 1.0, 2);
        set_inline(s.config, {0.0, 0.0, 1.0, 0.0, 0.5, 1.0});
        s.config.schedule = StubbornnessSchedule::from_table({{0.0, 0.0, 0.0}, {1.0 / 3.0, 0.5, 0.0}});
    } else if (name == "example3") {
        // Past t ~ 26 the squared distance to agent 2 rounds to exactly eps^2
        // and the agent stops being isolated, so the horizon stays below that.
        s.description = "two agents converge at distance eps from a third; no delta-equilibrium exists";
        s.config = base(3, 2, 1.0, 24);
        s.config.consensus_tol = 1e-300;
        set_inline(s.config, {0.0, 0.0, 1.0, 0.0, 0.5, 1.0});
        s.config.schedule = StubbornnessSchedule::constant_alpha({0.5, 0.5, 0.0});
    } else if (name == "sync-hk") {
        s.description = "synchronous HK from random opinions in the unit square";
        s.config = base(10, 2, 0.3, 200);
        set_random(s.config, 7);
        s.config.schedule = StubbornnessSchedule::synchronous(10);
    } else if (name == "async-hk") {
        s.description = "asynchronous HK, one uniformly chosen agent updates per step";
        s.config = base(8, 1, 0.3, 400);
        set_random(s.config, 11);
        s.config.schedule = StubbornnessSchedule::asynchronous(8);
    } else if (name == "powerlaw-a2") {
        s.description = "alpha(t) = 1 - 1/(t+1)^2 for every agent";
        s.config = base(20, 2, 0.3, 2000);
        set_random(s.config, 13);
        s.config.schedule = StubbornnessSchedule::power_law(20, 2.0);
    } else {
        throw ConfigError("unknown scenario '" + name + "'");
    }
    s.config.validate();
    return s;
}

ScenarioReport run_scenario(const Scenario& scenario) {
    ScenarioReport report;
    report.name = scenario.name;
    report.trajectory = simulate(scenario.config);
    Claims claims;
    const auto& c = scenario.config;
    const auto& traj = report.trajectory;
    if (scenario.name == "example1") example1_claims(c, traj, claims);
    else if (scenario.name == "example2") example2_claims(c, traj, claims);
    else if (scenario.name == "example3") example3_claims(c, traj, claims);
    else if (scenario.name == "sync-hk") sync_claims(c, traj, claims);
    else if (scenario.name == "async-hk") async_claims(c, traj, claims);
    else if (scenario.name == "powerlaw-a2") powerlaw_claims(c, traj, claims);
    else monitors_clean(traj, claims);
    report.claims = std::move(claims.list);
    return report;
}

ScenarioReport run_scenario(const std::string& name, std::optional<std::uint64_t> seed) {
    Scenario s = builtin_scenario(name);
    if (seed) s.config.seed = *seed;
    return run_scenario(s);
}

}  // namespace mixed_hk

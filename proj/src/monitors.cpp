#include "mixed_hk/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mixed_hk/errors.hpp"
#include "mixed_hk/profile.hpp"

namespace mixed_hk {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::not_applicable: return "not_applicable";
    }
    return "unknown";
}

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::max_steps: return "max_steps";
        case StopReason::steady_state: return "steady_state";
        case StopReason::consensus: return "consensus";
    }
    return "unknown";
}

StopReason stop_reason_from_string(const std::string& s) {
    for (auto r : {StopReason::max_steps, StopReason::steady_state, StopReason::consensus})
        if (to_string(r) == s) return r;
    throw IntegrityError("unknown stop reason '" + s + "'");
}

double energy(const OpinionState& state) {
    const double cap = state.epsilon * state.epsilon;
    double z = 0.0;
    for (std::size_t i = 0; i < state.n(); ++i)
        for (std::size_t j = i + 1; j < state.n(); ++j)
            z += std::min(squared_distance(state.x.row(i), state.x.row(j)), cap);
    return 2.0 * z;
}

std::vector<double> displacement_sq(const OpinionState& state, const OpinionState& next) {
    std::vector<double> out(state.n());
    for (std::size_t i = 0; i < state.n(); ++i) out[i] = squared_distance(state.x.row(i), next.x.row(i));
    return out;
}

double nl8_lower_bound(const OpinionState& state, const OpinionState& next, std::span<const double> alpha) {
    if (alpha.size() != state.n()) throw ConfigError("nl8_lower_bound: alpha has the wrong length");
    const auto nbrs = neighborhoods(state);
    const auto disp = displacement_sq(state, next);
    double sum = 0.0;
    for (std::size_t i = 0; i < state.n(); ++i) {
        double coeff = 1.0;
        if (alpha[i] < 1.0) coeff += static_cast<double>(nbrs[i].size()) * alpha[i] / (1.0 - alpha[i]);
        sum += coeff * disp[i];
    }
    return 4.0 * sum;
}

double beta(std::span<const double> alpha) {
    const std::size_t n = alpha.size();
    if (n < 2) throw DomainError("beta needs at least two agents");
    // The maximizing pair takes the largest alpha as i and the next largest as j.
    double first = -std::numeric_limits<double>::infinity(), second = first;
    for (double a : alpha) {
        if (a > first) {
            second = first;
            first = a;
        } else if (a > second) {
            second = a;
        }
    }
    return first - (first - second) / static_cast<double>(n);
}

double beta_including_self_pairs(std::span<const double> alpha) {
    if (alpha.empty()) throw DomainError("beta needs at least one agent");
    return *std::max_element(alpha.begin(), alpha.end());
}

ContractionVerdict contraction_check(const OpinionState& state, const OpinionState& next, std::span<const double> alpha) {
    ContractionVerdict v;
    v.diam_before = diameter(state.x);
    v.diam_after = diameter(next.x);
    const double slack = kDiameterSlack * std::max(1.0, v.diam_before);
    v.non_expanding = v.diam_after <= v.diam_before + slack;
    if (state.n() < 2) return v;
    v.beta = beta(alpha);
    const Profile profile = build_profile(state);
    if (profile.graph.edge_count() == state.n() * (state.n() - 1) / 2) {
        v.contraction = v.diam_after <= v.beta * v.diam_before + slack ? Verdict::pass : Verdict::fail;
    }
    return v;
}

Theorem1Verdict theorem1_monitor(const Trajectory& trajectory, double delta_cap, double consensus_tol) {
    Theorem1Verdict v;
    if (trajectory.states.empty()) return v;
    const std::size_t n = trajectory.header.n;

    std::size_t start = trajectory.states.size();
    for (std::size_t t = 0; t < trajectory.states.size(); ++t) {
        const Profile p = build_profile(trajectory.state(t));
        if (p.graph.edge_count() == n * (n - 1) / 2) {
            start = t;
            break;
        }
    }
    v.final_diam = diameter(trajectory.states.back());
    v.reached_tolerance = v.final_diam <= consensus_tol;
    if (start == trajectory.states.size()) return v;

    v.applicable = true;
    v.start = start;
    const double d0 = diameter(trajectory.states[start]);
    double envelope = d0;
    double geometric = d0;
    for (std::size_t s = start; s < trajectory.steps(); ++s) {
        const double b = n >= 2 ? beta(trajectory.alphas[s]) : 0.0;
        envelope *= b;
        if (b <= delta_cap) {
            ++v.contracting_steps;
            geometric *= delta_cap;
        }
        const double ds = diameter(trajectory.states[s + 1]);
        const double slack = kDiameterSlack * std::max(1.0, d0);
        if (ds > envelope + slack) ++v.envelope_violations;
        if (ds > geometric + slack) ++v.geometric_violations;
    }
    v.hypothesis_met = v.contracting_steps > 0;
    v.consensus_expected = v.hypothesis_met && geometric <= consensus_tol;
    return v;
}

Theorem2Terms theorem2_terms(const Trajectory& trajectory, std::size_t agent) {
    if (agent >= trajectory.header.n) throw ConfigError("theorem2_terms: agent index out of range");
    Theorem2Terms out;
    const double slack = kMovementSlack * std::max(1.0, trajectory.header.epsilon);
    double running = 0.0;
    for (std::size_t t = 0; t < trajectory.steps(); ++t) {
        const OpinionState s = trajectory.state(t);
        const auto nbrs = neighborhoods(s);
        const auto& ni = nbrs[agent];
        double spread = 0.0;
        for (std::size_t j : ni) spread = std::max(spread, distance(s.x.row(agent), s.x.row(j)));
        const double a = trajectory.alphas[t][agent];
        const double term = (1.0 - a) * (1.0 - 1.0 / static_cast<double>(ni.size())) * spread;
        const double moved = distance(s.x.row(agent), trajectory.states[t + 1].row(agent));
        running += term;
        out.terms.push_back(term);
        out.partial_sums.push_back(running);
        out.movements.push_back(moved);
        if (moved > term + slack) ++out.violations;
    }
    return out;
}

Theorem3Verdict theorem3_step_bound(const OpinionState& state, const OpinionState& next,
                                    std::span<const double> alpha, double delta) {
    Theorem3Verdict v;
    const std::size_t n = state.n();
    const auto disp = displacement_sq(state, next);
    for (double d : disp) v.lhs += d;
    const double max_alpha = alpha.empty() ? 0.0 : *std::max_element(alpha.begin(), alpha.end());
    const double nd = static_cast<double>(n);
    v.rhs = 2.0 * delta * delta * (1.0 - max_alpha) * (1.0 - max_alpha) / std::pow(nd, 8);

    if (!(max_alpha < 1.0)) return v;
    if (!build_profile(state).connected()) return v;
    if (is_delta_trivial(state.x, delta)) return v;
    v.verdict = v.lhs >= v.rhs * (1.0 - kRelativeSlack) ? Verdict::pass : Verdict::fail;
    return v;
}

namespace {

double max_component_diameter(const OpinionState& s) {
    const Profile p = build_profile(s);
    double worst = 0.0;
    for (double d : component_diameters(s.x, p)) worst = std::max(worst, d);
    return worst;
}

}  // namespace

std::optional<std::size_t> tau_delta(const Trajectory& trajectory, double delta) {
    for (std::size_t t = 0; t < trajectory.states.size(); ++t)
        if (max_component_diameter(trajectory.state(t)) <= delta) return t;
    return std::nullopt;
}

CorollaryBounds corollary_bounds(std::size_t n, double epsilon, double delta, double sup_alpha) {
    if (!(sup_alpha < 1.0)) throw DomainError("corollary bounds need sup alpha < 1");
    if (!(delta > 0.0) || !(delta <= epsilon)) throw DomainError("corollary bounds need 0 < delta <= epsilon");
    const double n10 = std::pow(static_cast<double>(n), 10);
    const double open = (1.0 - sup_alpha) * (1.0 - sup_alpha);
    const double ratio = epsilon / delta;
    return {n10 * ratio * ratio / (8.0 * open), n10 / (2.0 * open)};
}

bool components_interact(const OpinionState& state, const OpinionState& next) {
    const Profile before = build_profile(state);
    const Profile after = build_profile(next);
    for (const auto& [i, j] : after.graph.edges())
        if (before.component_ids[i] != before.component_ids[j]) return true;
    return false;
}

InteractionReport interaction_equivalence(const Trajectory& trajectory, double delta, std::size_t max_level) {
    const double eps = trajectory.header.epsilon;
    if (!(delta > 0.0) || delta > eps / 4.0) throw DomainError("interaction_equivalence needs 0 < delta <= eps/4");
    InteractionReport r;
    const std::size_t count = trajectory.states.size();
    std::vector<double> worst(count);
    for (std::size_t t = 0; t < count; ++t) worst[t] = max_component_diameter(trajectory.state(t));

    for (std::size_t t = 0; t + 1 < count; ++t) {
        if (worst[t] > delta) continue;
        InteractionStep step;
        step.t = t;
        step.delta_nontrivial_next = worst[t + 1] > delta;
        step.half_eps_nontrivial_next = worst[t + 1] > eps / 2.0;
        step.components_interact = components_interact(trajectory.state(t), trajectory.state(t + 1));
        if (!step.consistent()) ++r.violations;
        r.steps.push_back(step);
    }

    const auto first_trivial = [&](double level) -> std::optional<std::size_t> {
        for (std::size_t t = 0; t < count; ++t)
            if (worst[t] <= level) return t;
        return std::nullopt;
    };
    for (std::size_t m = 4; m <= max_level; ++m) {
        const double level = eps / static_cast<double>(m);
        const auto tau_m = first_trivial(level);
        if (!tau_m) break;
        const auto tau_next = first_trivial(eps / static_cast<double>(m + 1));
        const std::size_t end = tau_next ? *tau_next : count;
        for (std::size_t t = *tau_m; t < end; ++t) {
            if (worst[t] > level) {
                r.a_set.push_back(t);
                r.a_set_levels.push_back(m);
                if (!(worst[t] > eps / 2.0)) ++r.a_set_half_eps_violations;
                break;
            }
        }
    }

    double sup_alpha = 0.0;
    for (const auto& a : trajectory.alphas)
        for (double v : a) sup_alpha = std::max(sup_alpha, v);
    if (sup_alpha < 1.0 && trajectory.header.n > 0) {
        r.a_bound = corollary_bounds(trajectory.header.n, eps, eps, sup_alpha).a_bound;
        r.a_bound_ok = static_cast<double>(r.a_set.size()) <= *r.a_bound;
    }
    return r;
}

std::size_t single_mover_violations(const Trajectory& trajectory) {
    std::size_t bad = 0;
    for (std::size_t t = 0; t < trajectory.steps(); ++t) {
        const auto& alpha = trajectory.alphas[t];
        const auto zeros = std::count(alpha.begin(), alpha.end(), 0.0);
        const auto ones = std::count(alpha.begin(), alpha.end(), 1.0);
        if (zeros != 1 || ones + 1 != static_cast<std::ptrdiff_t>(alpha.size())) {
            ++bad;
            continue;
        }
        const Matrix& x = trajectory.states[t];
        const Matrix& y = trajectory.states[t + 1];
        for (std::size_t i = 0; i < x.rows(); ++i) {
            if (alpha[i] == 0.0) continue;
            const auto a = x.row(i);
            const auto b = y.row(i);
            if (!std::equal(a.begin(), a.end(), b.begin())) {
                ++bad;
                break;
            }
        }
    }
    return bad;
}

StepMetrics step_metrics(const OpinionState& state, const OpinionState& next, std::span<const double> alpha,
                         double delta) {
    StepMetrics m;
    const std::size_t n = state.n();
    const double scale = kEnergySlack * static_cast<double>(n * n) * state.epsilon * state.epsilon;
    m.t = state.t;
    m.energy = energy(state);
    m.energy_next = energy(next);
    m.nl8_lhs = m.energy - m.energy_next;
    m.nl8_rhs = nl8_lower_bound(state, next, alpha);
    m.nl8_ok = m.nl8_lhs >= m.nl8_rhs - scale;
    m.energy_monotone = m.energy_next <= m.energy + scale;
    m.displacement_sq = displacement_sq(state, next);
    m.diam_per_component = component_diameters(state.x, build_profile(state));

    const ContractionVerdict c = contraction_check(state, next, alpha);
    m.beta = c.beta;
    m.diam_global = c.diam_before;
    m.diam_global_next = c.diam_after;
    m.contraction = c.contraction;
    m.non_expansion_ok = c.non_expanding;

    const Theorem3Verdict t3 = theorem3_step_bound(state, next, alpha, delta);
    m.theorem3 = t3.verdict;
    m.theorem3_lhs = t3.lhs;
    m.theorem3_rhs = t3.rhs;
    m.interaction_flag = components_interact(state, next);
    return m;
}

std::size_t CheckReport::total_violations() const {
    return nl8_violations + energy_violations + contraction_violations + lemma3_violations + theorem2_violations +
           theorem3_violations + interaction_violations + a_set_violations + (budget_ok ? 0 : 1) +
           (tau_within_bound ? 0 : 1) + (theorem1.ok() ? 0 : 1);
}

CheckReport check_trajectory(const Trajectory& trajectory, const CheckOptions& options) {
    CheckReport r;
    const double eps = trajectory.header.epsilon;
    const std::size_t n = trajectory.header.n;
    r.delta = options.delta > 0.0 ? options.delta : eps / 4.0;

    double disp_total = 0.0;
    for (std::size_t t = 0; t < trajectory.steps(); ++t) {
        const OpinionState s = trajectory.state(t);
        const OpinionState next = trajectory.state(t + 1);
        StepMetrics m = step_metrics(s, next, trajectory.alphas[t], r.delta);
        if (!m.nl8_ok) ++r.nl8_violations;
        if (!m.energy_monotone) ++r.energy_violations;
        if (m.contraction == Verdict::fail) ++r.contraction_violations;
        if (!m.non_expansion_ok) ++r.lemma3_violations;
        if (m.theorem3 != Verdict::not_applicable) ++r.theorem3_applicable;
        if (m.theorem3 == Verdict::fail) ++r.theorem3_violations;
        for (std::size_t i = 0; i < n; ++i)
            if (trajectory.alphas[t][i] < 1.0) disp_total += m.displacement_sq[i];
        for (double a : trajectory.alphas[t]) r.sup_alpha = std::max(r.sup_alpha, a);
        r.steps.push_back(std::move(m));
    }
    for (std::size_t i = 0; i < n && trajectory.steps() > 0; ++i) r.theorem2_violations += theorem2_terms(trajectory, i).violations;

    if (!trajectory.states.empty()) {
        const double z0 = energy(trajectory.state(0));
        const double cap = static_cast<double>(n * n) * eps * eps;
        r.budget_used = 4.0 * disp_total;
        r.budget_ok = r.budget_used <= z0 + kEnergySlack * cap && z0 <= cap;
    }

    r.tau_delta = tau_delta(trajectory, r.delta);
    if (r.sup_alpha < 1.0 && r.delta <= eps && n > 0) {
        r.bounds = corollary_bounds(n, eps, r.delta, r.sup_alpha);
        if (r.tau_delta) r.tau_within_bound = static_cast<double>(*r.tau_delta) <= r.bounds->tau_bound;
    }
    r.theorem1 = theorem1_monitor(trajectory, options.delta_cap, options.consensus_tol);
    if (r.delta <= eps / 4.0) {
        r.interaction = interaction_equivalence(trajectory, r.delta, options.max_level);
        r.interaction_violations = r.interaction.violations;
        r.a_set_violations = r.interaction.a_set_half_eps_violations + (r.interaction.a_bound_ok ? 0 : 1);
    }
    r.events = detect_merge_events(trajectory.states);
    return r;
}

}  // namespace mixed_hk

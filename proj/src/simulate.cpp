#include "mixed_hk/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "mixed_hk/errors.hpp"
#include "mixed_hk/monitors.hpp"
#include "mixed_hk/profile.hpp"
#include "mixed_hk/rng.hpp"
#include "mixed_hk/trajectory_io.hpp"

namespace mixed_hk {

void ModelConfig::validate() const {
    if (n < 1) throw ConfigError("n must be >= 1");
    if (d < 1) throw ConfigError("d must be >= 1");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be a finite value > 0");
    if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
    if (!(consensus_tol > 0.0)) throw ConfigError("consensus_tol must be > 0");
    if (schedule.n != n) throw ConfigError("schedule length does not match n");
    schedule.validate();
    if (initial.kind == InitialSource::Kind::inline_coords &&
        (initial.coords.rows() != n || initial.coords.cols() != d)) {
        throw ConfigError("initial coordinates must be an n x d block");
    }
    if (initial.kind == InitialSource::Kind::random && !(initial.low < initial.high)) {
        throw ConfigError("random initial range needs low < high");
    }
    if (monitors.delta < 0.0) throw ConfigError("monitors.delta must be >= 0");
}

Matrix random_opinions(std::size_t n, std::size_t d, std::uint64_t seed, double low, double high) {
    CounterRng rng(seed, 0x1417);
    Matrix x(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k) x(i, k) = low + (high - low) * rng.uniform();
    return x;
}

OpinionState initial_state(const ModelConfig& config) {
    OpinionState s;
    s.epsilon = config.epsilon;
    switch (config.initial.kind) {
        case InitialSource::Kind::inline_coords: s.x = config.initial.coords; break;
        case InitialSource::Kind::file: s.x = read_opinions_csv(config.initial.path); break;
        case InitialSource::Kind::random:
            s.x = random_opinions(config.n, config.d, config.seed, config.initial.low, config.initial.high);
            break;
    }
    if (s.n() != config.n || s.d() != config.d) throw ConfigError("initial opinions do not match n and d");
    s.validate();
    return s;
}

Trajectory simulate(const ModelConfig& config) { return simulate(config, initial_state(config)); }

namespace {

bool components_within(const OpinionState& s, double tol) {
    const Profile p = build_profile(s);
    for (double d : component_diameters(s.x, p))
        if (d > tol) return false;
    return true;
}

std::size_t online_check(const MonitorFlags& flags, const StepMetrics& m, const OpinionState& s,
                         const OpinionState& next, std::span<const double> alpha, double delta) {
    std::size_t bad = 0;
    if (flags.energy && !m.energy_monotone) ++bad;
    if (flags.nl8 && !m.nl8_ok) ++bad;
    if (flags.contraction && (m.contraction == Verdict::fail || !m.non_expansion_ok)) ++bad;
    if (flags.theorem3 && m.theorem3 == Verdict::fail) ++bad;
    if (flags.theorem2) {
        const auto nbrs = neighborhoods(s);
        const double slack = kMovementSlack * std::max(1.0, s.epsilon);
        for (std::size_t i = 0; i < s.n(); ++i) {
            double spread = 0.0;
            for (std::size_t j : nbrs[i]) spread = std::max(spread, distance(s.x.row(i), s.x.row(j)));
            const double term = (1.0 - alpha[i]) * (1.0 - 1.0 / static_cast<double>(nbrs[i].size())) * spread;
            if (distance(s.x.row(i), next.x.row(i)) > term + slack) ++bad;
        }
    }
    if (flags.interaction && components_within(s, delta)) {
        const Profile after = build_profile(next);
        double worst = 0.0;
        for (double d : component_diameters(next.x, after)) worst = std::max(worst, d);
        InteractionStep step{s.t, worst > delta, m.interaction_flag, worst > s.epsilon / 2.0};
        if (!step.consistent()) ++bad;
    }
    return bad;
}

}  // namespace

Trajectory simulate(const ModelConfig& config, const OpinionState& start) {
    config.validate();
    start.validate();
    if (start.n() != config.n || start.d() != config.d) throw ConfigError("start state does not match n and d");

    Trajectory traj;
    traj.header = {1, config.n, config.d, config.epsilon, config.schedule.descriptor(), config.seed};
    traj.states.push_back(start.x);
    const double delta = config.monitors.delta > 0.0 ? config.monitors.delta : config.epsilon / 4.0;

    OpinionState current = start;
    current.t = 0;
    traj.stop = StopReason::max_steps;
    for (std::size_t t = 0; t < config.max_steps; ++t) {
        const std::vector<double> alpha = schedule_alpha(config.schedule, t, config.seed);
        OpinionState next = step(current, alpha);
        if (config.monitors.any()) {
            StepMetrics m = step_metrics(current, next, alpha, delta);
            traj.online_violations += online_check(config.monitors, m, current, next, alpha, delta);
            traj.metrics.push_back(std::move(m));
        }
        traj.alphas.push_back(alpha);
        traj.states.push_back(next.x);
        const bool steady = next.x == current.x;
        current = std::move(next);
        if (steady) {
            traj.stop = StopReason::steady_state;
            break;
        }
        if (components_within(current, config.consensus_tol)) {
            traj.stop = StopReason::consensus;
            break;
        }
    }
    traj.events = detect_merge_events(traj.states);
    return traj;
}

}  // namespace mixed_hk

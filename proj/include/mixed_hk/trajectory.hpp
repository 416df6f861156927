#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mixed_hk/dynamics.hpp"
#include "mixed_hk/linalg.hpp"
#include "mixed_hk/profile.hpp"

namespace mixed_hk {

enum class Verdict { pass, fail, not_applicable };
std::string to_string(Verdict v);

/// Per-step quantities for the transition x(t) -> x(t+1).
struct StepMetrics {
    std::size_t t = 0;
    double energy = 0.0;        // Z(t)
    double energy_next = 0.0;   // Z(t+1)
    double beta = 0.0;
    double diam_global = 0.0;
    double diam_global_next = 0.0;
    std::vector<double> diam_per_component;
    std::vector<double> displacement_sq;
    double nl8_lhs = 0.0;       // Z(t) - Z(t+1)
    double nl8_rhs = 0.0;
    bool nl8_ok = true;
    bool energy_monotone = true;
    Verdict contraction = Verdict::not_applicable;
    bool non_expansion_ok = true;
    Verdict theorem3 = Verdict::not_applicable;
    double theorem3_lhs = 0.0;
    double theorem3_rhs = 0.0;
    bool interaction_flag = false;
};

enum class StopReason { max_steps, steady_state, consensus };
std::string to_string(StopReason r);
StopReason stop_reason_from_string(const std::string& s);

struct TrajectoryHeader {
    int version = 1;
    std::size_t n = 0;
    std::size_t d = 0;
    double epsilon = 1.0;
    std::string schedule;
    std::uint64_t seed = 0;

    friend bool operator==(const TrajectoryHeader&, const TrajectoryHeader&) = default;
};

/// x(0..T) with the alpha(t) applied at each transition, optional
/// per-step metrics and detected merge events.
struct Trajectory {
    TrajectoryHeader header;
    std::vector<Matrix> states;
    std::vector<std::vector<double>> alphas;  // alphas[t] maps states[t] to states[t+1]
    StopReason stop = StopReason::max_steps;
    std::vector<StepMetrics> metrics;
    std::vector<MergeEvent> events;
    std::size_t online_violations = 0;

    std::size_t steps() const noexcept { return alphas.size(); }
    OpinionState state(std::size_t t) const { return {t, states.at(t), header.epsilon}; }
};

}  // namespace mixed_hk

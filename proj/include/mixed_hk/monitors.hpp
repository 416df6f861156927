#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mixed_hk/dynamics.hpp"
#include "mixed_hk/trajectory.hpp"

namespace mixed_hk {

// Slack constants for inequality checks; each is scaled by the natural
// magnitude of the quantity compared.
inline constexpr double kEnergySlack = 1e-9;       // times n^2 eps^2
inline constexpr double kDiameterSlack = 1e-12;    // times max(1, diam)
inline constexpr double kMovementSlack = 1e-12;    // times max(1, eps)
inline constexpr double kRelativeSlack = 1e-9;

/// Z = sum over ordered pairs (i, j) of min(|x_i - x_j|^2, eps^2).
double energy(const OpinionState& state);

/// |x_i(t) - x_i(t+1)|^2 per agent.
std::vector<double> displacement_sq(const OpinionState& state, const OpinionState& next);

/// 4 sum_i (1 + |N_i| alpha_i / (1 - alpha_i) 1{alpha_i < 1}) |x_i(t) - x_i(t+1)|^2
double nl8_lower_bound(const OpinionState& state, const OpinionState& next, std::span<const double> alpha);

/// max over distinct i != j with alpha_i >= alpha_j of alpha_i - (alpha_i - alpha_j) / n.
/// Throws DomainError for n < 2.
double beta(std::span<const double> alpha);
/// Same maximum with i == j admitted, which collapses to max alpha.
double beta_including_self_pairs(std::span<const double> alpha);

struct ContractionVerdict {
    Verdict contraction = Verdict::not_applicable;  // only on epsilon-trivial states
    bool non_expanding = true;
    double beta = 0.0;
    double diam_before = 0.0;
    double diam_after = 0.0;
};

ContractionVerdict contraction_check(const OpinionState& state, const OpinionState& next, std::span<const double> alpha);

struct Theorem1Verdict {
    bool applicable = false;          // some recorded state is epsilon-trivial
    std::size_t start = 0;            // first such time
    bool hypothesis_met = false;      // at least one beta <= cap after start
    std::size_t contracting_steps = 0;
    std::size_t envelope_violations = 0;   // diam(s) > prod beta * diam(start)
    std::size_t geometric_violations = 0;  // diam(s) > cap^k(s) * diam(start)
    bool consensus_expected = false;  // cap^k * diam(start) <= consensus_tol
    double final_diam = 0.0;
    bool reached_tolerance = false;

    bool ok() const {
        return envelope_violations == 0 && geometric_violations == 0 && (!consensus_expected || reached_tolerance);
    }
};

/// Finite-horizon check of the consensus statement under beta_t <= cap
/// infinitely often: diameters must stay under the product-of-beta envelope.
Theorem1Verdict theorem1_monitor(const Trajectory& trajectory, double delta_cap, double consensus_tol = 1e-12);

struct Theorem2Terms {
    std::vector<double> terms;         // (1 - alpha_i(t)) (1 - 1/|N_i(t)|) d_t^i
    std::vector<double> partial_sums;
    std::vector<double> movements;     // |x_i(t) - x_i(t+1)|
    std::size_t violations = 0;        // movement > term + slack
};

Theorem2Terms theorem2_terms(const Trajectory& trajectory, std::size_t agent);

struct Theorem3Verdict {
    Verdict verdict = Verdict::not_applicable;
    double lhs = 0.0;  // sum_i |x_i(t) - x_i(t+1)|^2
    double rhs = 0.0;  // 2 delta^2 (1 - max alpha)^2 / n^8
};

/// Applicable only when the profile is connected and delta-nontrivial and
/// every alpha_i < 1.
Theorem3Verdict theorem3_step_bound(const OpinionState& state, const OpinionState& next,
                                    std::span<const double> alpha, double delta);

/// First recorded t at which every component of the profile is delta-trivial.
std::optional<std::size_t> tau_delta(const Trajectory& trajectory, double delta);

struct CorollaryBounds {
    double tau_bound = 0.0;  // n^10 (eps/delta)^2 / (8 (1 - sup alpha)^2)
    double a_bound = 0.0;    // n^10 / (2 (1 - sup alpha)^2)
};

/// Throws DomainError unless sup_alpha < 1 and 0 < delta <= epsilon.
CorollaryBounds corollary_bounds(std::size_t n, double epsilon, double delta, double sup_alpha);

struct InteractionStep {
    std::size_t t = 0;
    bool delta_nontrivial_next = false;     // (1)
    bool components_interact = false;       // (2)
    bool half_eps_nontrivial_next = false;  // (3)
    bool consistent() const {
        return delta_nontrivial_next == components_interact && components_interact == half_eps_nontrivial_next;
    }
};

struct InteractionReport {
    std::vector<InteractionStep> steps;
    std::size_t violations = 0;
    std::vector<std::size_t> a_set;          // first eps/m-nontrivial times after tau_m
    std::vector<std::size_t> a_set_levels;   // the m for each entry of a_set
    std::size_t a_set_half_eps_violations = 0;
    std::optional<double> a_bound;
    bool a_bound_ok = true;
};

/// Evaluates the three-way equivalence at every step where all components
/// are delta-trivial (delta <= eps/4), and builds the set of first
/// re-separation times for levels m = 4..max_level.
InteractionReport interaction_equivalence(const Trajectory& trajectory, double delta, std::size_t max_level = 64);

/// Whether an edge of next's profile joins two different components of state's profile.
bool components_interact(const OpinionState& state, const OpinionState& next);

/// Steps whose alpha is not a single zero among ones, or where an agent
/// other than the zero-alpha one changed. Meant for asynchronous runs.
std::size_t single_mover_violations(const Trajectory& trajectory);

StepMetrics step_metrics(const OpinionState& state, const OpinionState& next, std::span<const double> alpha,
                         double delta);

struct CheckOptions {
    double delta = 0.0;        // 0 selects eps / 4
    double delta_cap = 0.99;   // beta threshold for the consensus envelope
    double consensus_tol = 1e-12;
    std::size_t max_level = 64;
};

struct CheckReport {
    std::vector<StepMetrics> steps;
    double delta = 0.0;
    std::size_t nl8_violations = 0;
    std::size_t energy_violations = 0;
    std::size_t contraction_violations = 0;
    std::size_t lemma3_violations = 0;
    std::size_t theorem2_violations = 0;
    std::size_t theorem3_violations = 0;
    std::size_t theorem3_applicable = 0;
    std::size_t interaction_violations = 0;
    std::size_t a_set_violations = 0;
    bool budget_ok = true;   // 4 sum_t sum_i disp^2 <= Z(0) <= n^2 eps^2
    double budget_used = 0.0;
    std::optional<std::size_t> tau_delta;
    double sup_alpha = 0.0;
    std::optional<CorollaryBounds> bounds;
    bool tau_within_bound = true;
    Theorem1Verdict theorem1;
    InteractionReport interaction;
    std::vector<MergeEvent> events;

    std::size_t total_violations() const;
    bool ok() const { return total_violations() == 0; }
};

/// Post-hoc evaluation of every monitor over a stored trajectory.
CheckReport check_trajectory(const Trajectory& trajectory, const CheckOptions& options = {});

}  // namespace mixed_hk

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mixed_hk/linalg.hpp"

namespace mixed_hk {

/// Opinions of n agents in R^d at time t, with confidence bound epsilon.
struct OpinionState {
    std::size_t t = 0;
    Matrix x;
    double epsilon = 1.0;

    std::size_t n() const noexcept { return x.rows(); }
    std::size_t d() const noexcept { return x.cols(); }

    /// Throws ConfigError unless n >= 1, d >= 1, epsilon > 0 and every coordinate is finite.
    void validate() const;
};

/// Agent index sets; neighbors[i] is sorted ascending and always contains i.
using Neighborhoods = std::vector<std::vector<std::size_t>>;

enum class ScheduleKind { synchronous, asynchronous, constant, power_law, table };

std::string to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string& name);

/// Rule producing the stubbornness vector alpha(t) in [0,1]^n.
struct StubbornnessSchedule {
    ScheduleKind kind = ScheduleKind::synchronous;
    std::size_t n = 0;
    std::vector<double> constant;             // kind == constant
    double exponent = 2.0;                    // kind == power_law, must be > 1
    std::vector<std::vector<double>> table;   // kind == table, one row per t

    static StubbornnessSchedule synchronous(std::size_t n);
    static StubbornnessSchedule asynchronous(std::size_t n);
    static StubbornnessSchedule constant_alpha(std::vector<double> alpha);
    static StubbornnessSchedule power_law(std::size_t n, double exponent);
    static StubbornnessSchedule from_table(std::vector<std::vector<double>> rows);

    void validate() const;
    /// Short human-readable description, e.g. "power_law(a=2)".
    std::string descriptor() const;

    friend bool operator==(const StubbornnessSchedule&, const StubbornnessSchedule&) = default;
};

/// Neighbor predicate: |x_i - x_j|^2 <= epsilon^2 in plain floating point.
bool within_confidence(std::span<const double> a, std::span<const double> b, double epsilon);

Neighborhoods neighborhoods(const OpinionState& state);

/// Row-stochastic A with A_ij = 1{j in N_i} / |N_i|.
Matrix averaging_matrix(const OpinionState& state);

/// One synchronous application of the mixed update. Every agent reads the
/// frozen x(t); agents with alpha_i == 1 or no other neighbor are copied.
OpinionState step(const OpinionState& state, std::span<const double> alpha);
OpinionState step(const OpinionState& state, std::span<const double> alpha, const Neighborhoods& nbrs);

/// The agent chosen to update at time t by the asynchronous schedule.
std::size_t asynchronous_agent(std::uint64_t seed, std::size_t t, std::size_t n);

/// alpha(t) for the given schedule. The asynchronous kind derives its
/// choice from (seed, t) alone, so any step can be replayed in isolation.
std::vector<double> schedule_alpha(const StubbornnessSchedule& schedule, std::size_t t, std::uint64_t seed);

}  // namespace mixed_hk

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mixed_hk/dynamics.hpp"
#include "mixed_hk/linalg.hpp"
#include "mixed_hk/trajectory.hpp"

namespace mixed_hk {

/// Which monitors run online during simulate.
struct MonitorFlags {
    bool energy = false;
    bool nl8 = false;
    bool contraction = false;
    bool theorem2 = false;
    bool theorem3 = false;
    bool interaction = false;
    double delta = 0.0;  // 0 selects eps / 4

    bool any() const { return energy || nl8 || contraction || theorem2 || theorem3 || interaction; }
    friend bool operator==(const MonitorFlags&, const MonitorFlags&) = default;
};

struct InitialSource {
    enum class Kind { inline_coords, file, random };
    Kind kind = Kind::inline_coords;
    Matrix coords;            // inline_coords
    std::string path;         // file
    double low = 0.0;         // random
    double high = 1.0;

    friend bool operator==(const InitialSource&, const InitialSource&) = default;
};

struct ModelConfig {
    std::size_t n = 0;
    std::size_t d = 0;
    double epsilon = 1.0;
    std::size_t max_steps = 100;
    double consensus_tol = 1e-12;
    std::uint64_t seed = 0;
    StubbornnessSchedule schedule;
    InitialSource initial;
    MonitorFlags monitors;

    /// Throws ConfigError naming the violated constraint.
    void validate() const;
    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// n x d opinions drawn uniformly from [low, high)^d, a pure function of the seed.
Matrix random_opinions(std::size_t n, std::size_t d, std::uint64_t seed, double low = 0.0, double high = 1.0);

/// x(0) for the configuration (reads the CSV for file sources).
OpinionState initial_state(const ModelConfig& config);

/// Runs up to max_steps transitions. Stops early on an exact steady state or
/// once every component's diameter is at most consensus_tol.
Trajectory simulate(const ModelConfig& config);
Trajectory simulate(const ModelConfig& config, const OpinionState& start);

}  // namespace mixed_hk

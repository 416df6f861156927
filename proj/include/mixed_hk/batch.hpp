#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mixed_hk/simulate.hpp"
#include "mixed_hk/trajectory.hpp"

namespace mixed_hk {

struct RunSummary {
    std::uint64_t seed = 0;
    std::size_t steps = 0;
    StopReason stop = StopReason::max_steps;
    std::optional<std::size_t> tau_delta;
    double final_diameter = 0.0;
    std::map<std::string, std::size_t> violations;

    std::size_t total_violations() const;
    friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

struct BatchSummary {
    std::vector<RunSummary> runs;  // in seed order
    std::size_t consensus_runs = 0;
    std::size_t steady_runs = 0;
    std::size_t tau_found = 0;
    std::optional<std::size_t> tau_min;
    std::optional<std::size_t> tau_max;
    double tau_mean = 0.0;
    std::map<std::string, std::size_t> violations;

    std::size_t total_violations() const;
    double consensus_rate() const;
    friend bool operator==(const BatchSummary&, const BatchSummary&) = default;
};

/// Simulates the template once with seed `seed` and runs every monitor.
RunSummary run_one(const ModelConfig& config, std::uint64_t seed);

/// num_runs independent runs with seeds seed_base, seed_base + 1, ...
/// The parallel version splits runs across OpenMP threads (capped by the
/// MIXED_HK_THREADS environment variable) and returns the same summary.
BatchSummary batch_run(const ModelConfig& config, std::size_t num_runs, std::uint64_t seed_base);
BatchSummary batch_run_serial(const ModelConfig& config, std::size_t num_runs, std::uint64_t seed_base);

/// Thread count the batch runner will use.
int batch_threads();

}  // namespace mixed_hk

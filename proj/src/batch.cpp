#include "mixed_hk/batch.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mixed_hk/errors.hpp"
#include "mixed_hk/monitors.hpp"
#include "mixed_hk/profile.hpp"

namespace mixed_hk {

std::size_t RunSummary::total_violations() const {
    std::size_t sum = 0;
    for (const auto& [_, v] : violations) sum += v;
    return sum;
}

std::size_t BatchSummary::total_violations() const {
    std::size_t sum = 0;
    for (const auto& [_, v] : violations) sum += v;
    return sum;
}

double BatchSummary::consensus_rate() const {
    return runs.empty() ? 0.0 : static_cast<double>(consensus_runs) / static_cast<double>(runs.size());
}

RunSummary run_one(const ModelConfig& config, std::uint64_t seed) {
    ModelConfig c = config;
    c.seed = seed;
    const Trajectory traj = simulate(c);
    const CheckReport report = check_trajectory(traj);

    RunSummary r;
    r.seed = seed;
    r.steps = traj.steps();
    r.stop = traj.stop;
    r.tau_delta = report.tau_delta;
    r.final_diameter = diameter(traj.states.back());
    r.violations = {
        {"nl8", report.nl8_violations},
        {"energy", report.energy_violations},
        {"contraction", report.contraction_violations},
        {"lemma3", report.lemma3_violations},
        {"theorem2", report.theorem2_violations},
        {"theorem3", report.theorem3_violations},
        {"interaction", report.interaction_violations},
        {"A_set", report.a_set_violations},
        {"budget", report.budget_ok ? 0u : 1u},
        {"tau_bound", report.tau_within_bound ? 0u : 1u},
        {"theorem1", report.theorem1.ok() ? 0u : 1u},
        {"online", traj.online_violations},
    };
    if (c.schedule.kind == ScheduleKind::asynchronous) r.violations["single_mover"] = single_mover_violations(traj);
    return r;
}

namespace {

BatchSummary aggregate(std::vector<RunSummary> runs) {
    BatchSummary s;
    std::size_t tau_total = 0;
    for (const RunSummary& r : runs) {
        if (r.stop == StopReason::consensus) ++s.consensus_runs;
        if (r.stop == StopReason::steady_state) ++s.steady_runs;
        if (r.tau_delta) {
            ++s.tau_found;
            tau_total += *r.tau_delta;
            s.tau_min = std::min(s.tau_min.value_or(*r.tau_delta), *r.tau_delta);
            s.tau_max = std::max(s.tau_max.value_or(*r.tau_delta), *r.tau_delta);
        }
        for (const auto& [k, v] : r.violations) s.violations[k] += v;
    }
    if (s.tau_found) s.tau_mean = static_cast<double>(tau_total) / static_cast<double>(s.tau_found);
    s.runs = std::move(runs);
    return s;
}

void check_count(std::size_t num_runs) {
    if (num_runs < 1) throw ConfigError("batch needs num_runs >= 1");
}

}  // namespace

int batch_threads() {
#ifdef _OPENMP
    int threads = omp_get_max_threads();
#else
    int threads = 1;
#endif
    if (const char* cap = std::getenv("MIXED_HK_THREADS")) {
        const int v = std::atoi(cap);
        if (v >= 1) threads = std::min(threads, v);
    }
    return std::max(threads, 1);
}

BatchSummary batch_run_serial(const ModelConfig& config, std::size_t num_runs, std::uint64_t seed_base) {
    check_count(num_runs);
    std::vector<RunSummary> runs;
    runs.reserve(num_runs);
    for (std::size_t k = 0; k < num_runs; ++k) runs.push_back(run_one(config, seed_base + k));
    return aggregate(std::move(runs));
}

BatchSummary batch_run(const ModelConfig& config, std::size_t num_runs, std::uint64_t seed_base) {
    check_count(num_runs);
    std::vector<RunSummary> runs(num_runs);
    std::vector<std::exception_ptr> errors(num_runs);
    const auto count = static_cast<std::int64_t>(num_runs);
#pragma omp parallel for schedule(dynamic) num_threads(batch_threads())
    for (std::int64_t k = 0; k < count; ++k) {
        try {
            runs[static_cast<std::size_t>(k)] = run_one(config, seed_base + static_cast<std::uint64_t>(k));
        } catch (...) {
            errors[static_cast<std::size_t>(k)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return aggregate(std::move(runs));
}

}  // namespace mixed_hk

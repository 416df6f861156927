#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mixed_hk/simulate.hpp"
#include "mixed_hk/trajectory.hpp"

namespace mixed_hk {

/// One expected-outcome assertion of a scenario.
struct ScenarioClaim {
    std::string name;
    std::string instantiates;  // the model statement the assertion exercises
    std::string expected;
    std::string observed;
    bool pass = false;
};

struct Scenario {
    std::string name;
    std::string description;
    ModelConfig config;
};

struct ScenarioReport {
    std::string name;
    std::vector<ScenarioClaim> claims;
    Trajectory trajectory;

    bool passed() const;
};

std::vector<std::string> scenario_names();

/// Throws ConfigError for an unknown name.
Scenario builtin_scenario(const std::string& name);

ScenarioReport run_scenario(const Scenario& scenario);
ScenarioReport run_scenario(const std::string& name, std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace mixed_hk

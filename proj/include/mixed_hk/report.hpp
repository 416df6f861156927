#pragma once

#include <json.hpp>

#include "mixed_hk/monitors.hpp"
#include "mixed_hk/profile.hpp"
#include "mixed_hk/spectral.hpp"
#include "mixed_hk/trajectory.hpp"

namespace mixed_hk {

nlohmann::json to_json(const StepMetrics& m);
nlohmann::json to_json(const MergeEvent& e);
nlohmann::json to_json(const Theorem1Verdict& v);
nlohmann::json to_json(const InteractionReport& r);
nlohmann::json to_json(const CheckReport& r, bool include_steps = true);
nlohmann::json to_json(const SpectralReport& r);
nlohmann::json to_json(const EquilibriumVerdict& v);

}  // namespace mixed_hk

#include "mixed_hk/report.hpp"

#include <cmath>

namespace mixed_hk {

using nlohmann::json;

namespace {

// JSON has no infinity; unbounded quantities become null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json to_json(const StepMetrics& m) {
    return {
        {"t", m.t},
        {"Z", m.energy},
        {"Z_next", m.energy_next},
        {"beta", m.beta},
        {"diam_global", m.diam_global},
        {"diam_global_next", m.diam_global_next},
        {"diam_per_component", m.diam_per_component},
        {"displacement_sq", m.displacement_sq},
        {"nl8_lhs", m.nl8_lhs},
        {"nl8_rhs", m.nl8_rhs},
        {"nl8_ok", m.nl8_ok},
        {"energy_monotone", m.energy_monotone},
        {"contraction", to_string(m.contraction)},
        {"non_expansion_ok", m.non_expansion_ok},
        {"theorem3", to_string(m.theorem3)},
        {"theorem3_lhs", m.theorem3_lhs},
        {"theorem3_rhs", m.theorem3_rhs},
        {"interaction_flag", m.interaction_flag},
    };
}

json to_json(const MergeEvent& e) {
    json j = {{"type", "merge"}, {"t", e.t}, {"i", e.i}, {"j", e.j}, {"departed", e.departed}};
    j["departed_at"] = e.departed_at ? json(*e.departed_at) : json(nullptr);
    return j;
}

json to_json(const Theorem1Verdict& v) {
    return {
        {"surrogate", true},
        {"applicable", v.applicable},
        {"start", v.start},
        {"hypothesis_met", v.hypothesis_met},
        {"contracting_steps", v.contracting_steps},
        {"envelope_violations", v.envelope_violations},
        {"geometric_violations", v.geometric_violations},
        {"consensus_expected", v.consensus_expected},
        {"final_diam", v.final_diam},
        {"reached_tolerance", v.reached_tolerance},
        {"ok", v.ok()},
    };
}

json to_json(const InteractionReport& r) {
    json steps = json::array();
    for (const auto& s : r.steps) {
        steps.push_back({{"t", s.t},
                         {"delta_nontrivial_next", s.delta_nontrivial_next},
                         {"components_interact", s.components_interact},
                         {"half_eps_nontrivial_next", s.half_eps_nontrivial_next},
                         {"consistent", s.consistent()}});
    }
    json j = {{"steps", steps},
              {"violations", r.violations},
              {"A_set", r.a_set},
              {"A_set_levels", r.a_set_levels},
              {"A_set_half_eps_violations", r.a_set_half_eps_violations},
              {"A_bound_ok", r.a_bound_ok}};
    j["A_bound"] = r.a_bound ? finite_or_null(*r.a_bound) : json(nullptr);
    return j;
}

json to_json(const CheckReport& r, bool include_steps) {
    json j;
    if (include_steps) {
        json steps = json::array();
        for (const auto& m : r.steps) steps.push_back(to_json(m));
        j["steps"] = std::move(steps);
    }
    j["delta"] = r.delta;
    j["nl8_violations"] = r.nl8_violations;
    j["energy_violations"] = r.energy_violations;
    j["contraction_violations"] = r.contraction_violations;
    j["lemma3_violations"] = r.lemma3_violations;
    j["theorem2_violations"] = r.theorem2_violations;
    j["theorem3_violations"] = r.theorem3_violations;
    j["theorem3_applicable_steps"] = r.theorem3_applicable;
    j["interaction_violations"] = r.interaction_violations;
    j["A_set_violations"] = r.a_set_violations;
    j["budget_ok"] = r.budget_ok;
    j["budget_used"] = r.budget_used;
    j["sup_alpha"] = r.sup_alpha;
    j["tau_delta"] = r.tau_delta ? json(*r.tau_delta) : json(nullptr);
    j["tau_bound"] = r.bounds ? finite_or_null(r.bounds->tau_bound) : json(nullptr);
    j["A_bound"] = r.bounds ? finite_or_null(r.bounds->a_bound) : json(nullptr);
    j["tau_within_bound"] = r.tau_within_bound;
    j["A_set"] = r.interaction.a_set;
    j["theorem1"] = to_json(r.theorem1);
    j["interaction"] = to_json(r.interaction);
    json events = json::array();
    for (const auto& e : r.events) events.push_back(to_json(e));
    j["events"] = std::move(events);
    j["total_violations"] = r.total_violations();
    return j;
}

json to_json(const SpectralReport& r) {
    json verdicts = json::object();
    for (const auto& [k, v] : r.verdicts) verdicts[k] = v;
    return {
        {"eigenvalues", r.eigenvalues},
        {"lambda2", r.lambda2},
        {"cheeger", finite_or_null(r.cheeger)},
        {"max_degree", r.max_degree},
        {"components", r.components},
        {"verdicts", verdicts},
        {"notes", r.notes},
    };
}

json to_json(const EquilibriumVerdict& v) {
    json j = {{"exists", v.exists}, {"partition", v.partition}};
    switch (v.failure) {
        case EquilibriumVerdict::Failure::none: j["failure"] = nullptr; break;
        case EquilibriumVerdict::Failure::groups_too_close:
            j["failure"] = {{"kind", "groups_too_close"},
                            {"pair", {v.witness_pair.first, v.witness_pair.second}},
                            {"hull_distance", v.witness_value}};
            break;
        case EquilibriumVerdict::Failure::group_too_wide:
            j["failure"] = {{"kind", "group_too_wide"}, {"group", v.witness_group}, {"diameter", v.witness_value}};
            break;
    }
    return j;
}

}  // namespace mixed_hk

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "mixed_hk/batch.hpp"
#include "mixed_hk/config.hpp"
#include "mixed_hk/errors.hpp"
#include "mixed_hk/monitors.hpp"
#include "mixed_hk/report.hpp"
#include "mixed_hk/scenarios.hpp"
#include "mixed_hk/simulate.hpp"
#include "mixed_hk/spectral.hpp"
#include "mixed_hk/trajectory_io.hpp"

using namespace mixed_hk;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

struct Common {
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "json";
};

void add_common(CLI::App* cmd, Common& c, const std::string& default_format) {
    c.format = default_format;
    cmd->add_option("--seed", c.seed, "RNG seed (overrides the config)");
    cmd->add_option("--out", c.out, "Output path (stdout when omitted)");
    cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

void emit(const Common& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out);
    if (!f) throw ConfigError("cannot write '" + c.out + "'");
    f << text;
}

ModelConfig load_config(const std::string& config_path, const std::string& scenario) {
    if (!config_path.empty() && !scenario.empty()) throw ConfigError("give either --config or --scenario, not both");
    if (!config_path.empty()) return parse_config_file(config_path);
    if (!scenario.empty()) return builtin_scenario(scenario).config;
    throw ConfigError("one of --config or --scenario is required");
}

std::string summary_csv(const json& j) {
    std::ostringstream out;
    out << "key,value\n";
    for (const auto& [k, v] : j.items())
        if (!v.is_structured()) out << k << ',' << v.dump() << '\n';
    return out.str();
}

int run_simulate(const std::string& config_path, const std::string& scenario, const Common& c) {
    ModelConfig config = load_config(config_path, scenario);
    if (c.seed) config.seed = *c.seed;
    const Trajectory traj = simulate(config);
    std::ostringstream text;
    if (c.format == "csv") {
        write_trajectory_csv(traj, text);
        if (!c.out.empty()) write_sidecar(traj, c.out);
    } else {
        write_trajectory_json(traj, text);
    }
    emit(c, text.str());
    std::cerr << "stop=" << to_string(traj.stop) << " steps=" << traj.steps()
              << " online_violations=" << traj.online_violations << '\n';
    return traj.online_violations == 0 ? kOk : kViolation;
}

int run_check(const std::string& path, double delta, bool with_steps, const Common& c) {
    const Trajectory traj = read_trajectory(path);
    CheckOptions options;
    options.delta = delta;
    const CheckReport report = check_trajectory(traj, options);
    const json j = to_json(report, with_steps);
    emit(c, c.format == "csv" ? summary_csv(j) : j.dump(2) + "\n");
    return report.ok() ? kOk : kViolation;
}

Graph read_edge_list(const std::string& path, std::size_t vertices) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::string line;
    std::size_t lineno = 0, top = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        long long i = -1, j = -1;
        std::string extra;
        if (!(ls >> i >> j) || (ls >> extra) || i < 0 || j < 0 || i == j)
            throw ConfigError("edge list line " + std::to_string(lineno) + ": expected two distinct vertex indices");
        edges.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        top = std::max({top, edges.back().first + 1, edges.back().second + 1});
    }
    if (vertices == 0) vertices = top;
    if (top > vertices) throw ConfigError("edge list mentions a vertex beyond --vertices");
    return Graph::from_edges(vertices, edges);
}

int run_spectral(const std::string& trajectory, std::size_t t, const std::string& opinions, double epsilon,
                 const std::string& edges, std::size_t vertices, const Common& c) {
    const int sources = !trajectory.empty() + !opinions.empty() + !edges.empty();
    if (sources != 1) throw ConfigError("give exactly one of --trajectory, --opinions or --edges");
    Graph graph;
    std::optional<OpinionState> state;
    std::optional<std::vector<double>> alpha;
    if (!trajectory.empty()) {
        const Trajectory traj = read_trajectory(trajectory);
        if (t >= traj.states.size()) throw ConfigError("--t is beyond the recorded horizon");
        state = traj.state(t);
        if (t < traj.steps()) alpha = traj.alphas[t];
    } else if (!opinions.empty()) {
        if (!(epsilon > 0.0)) throw ConfigError("--epsilon must be > 0 with --opinions");
        state = OpinionState{0, read_opinions_csv(opinions), epsilon};
        state->validate();
    }
    graph = state ? build_profile(*state).graph : read_edge_list(edges, vertices);

    SpectralReport report;
    if (graph.size() > kCheegerMaxVertices) {
        report.laplacian = laplacian(graph);
        report.eigenvalues = eigh(report.laplacian).values;
        report.lambda2 = report.eigenvalues[1];
        report.cheeger = std::numeric_limits<double>::quiet_NaN();
        report.max_degree = graph.max_degree();
        report.components = graph.component_count();
        report.notes.push_back("cheeger checks skipped: exhaustive search is limited to n <= 16");
    } else {
        report = check_cheeger(graph);
    }
    json j = to_json(report);
    bool ok = report.all_pass();
    if (state && alpha && graph.connected() && graph.size() <= kCheegerMaxVertices &&
        std::all_of(alpha->begin(), alpha->end(), [](double a) { return a < 1.0; })) {
        const ChainCheck chain = lambda2_chain_check(*state, *alpha, c.seed.value_or(1));
        json verdicts = json::object();
        for (const auto& [k, v] : chain.verdicts) verdicts[k] = v;
        j["chain"] = {{"lambda2_laplacian", chain.lambda2_laplacian},
                      {"lambda2_qtq", chain.lambda2_qtq},
                      {"chain_bound", chain.chain_bound},
                      {"min_rayleigh", chain.min_rayleigh},
                      {"verdicts", verdicts}};
        ok = ok && chain.all_pass();
    }
    if (c.format == "csv") {
        std::ostringstream out;
        out << "k,eigenvalue\n";
        for (std::size_t k = 0; k < report.eigenvalues.size(); ++k)
            out << k << ',' << format_double(report.eigenvalues[k]) << '\n';
        emit(c, out.str());
    } else {
        emit(c, j.dump(2) + "\n");
    }
    return ok ? kOk : kViolation;
}

int run_scenario_cmd(const std::string& name, bool list, const Common& c) {
    if (list) {
        for (const auto& s : scenario_names()) std::cout << s << '\n';
        return kOk;
    }
    if (name.empty()) throw ConfigError("scenario name required (or --list)");
    const ScenarioReport report = run_scenario(name, c.seed);
    json claims = json::array();
    std::ostringstream csv;
    csv << "claim,pass,expected,observed\n";
    for (const auto& claim : report.claims) {
        claims.push_back({{"name", claim.name},
                          {"instantiates", claim.instantiates},
                          {"expected", claim.expected},
                          {"observed", claim.observed},
                          {"pass", claim.pass}});
        csv << claim.name << ',' << (claim.pass ? "true" : "false") << ",\"" << claim.expected << "\",\""
            << claim.observed << "\"\n";
        if (!claim.pass) {
            std::cerr << "FAIL " << report.name << ": " << claim.name << "\n  expected: " << claim.expected
                      << "\n  observed: " << claim.observed << '\n';
        }
    }
    const json j = {{"scenario", report.name},
                    {"passed", report.passed()},
                    {"steps", report.trajectory.steps()},
                    {"stop", to_string(report.trajectory.stop)},
                    {"claims", claims}};
    emit(c, c.format == "csv" ? csv.str() : j.dump(2) + "\n");
    return report.passed() ? kOk : kViolation;
}

int run_batch(const std::string& config_path, const std::string& scenario, std::size_t runs, bool serial,
              const Common& c) {
    const ModelConfig config = load_config(config_path, scenario);
    const std::uint64_t base = c.seed.value_or(config.seed);
    const BatchSummary s = serial ? batch_run_serial(config, runs, base) : batch_run(config, runs, base);
    json per_run = json::array();
    std::ostringstream csv;
    csv << "seed,steps,stop,tau_delta,final_diameter,violations\n";
    for (const auto& r : s.runs) {
        per_run.push_back({{"seed", r.seed},
                           {"steps", r.steps},
                           {"stop", to_string(r.stop)},
                           {"tau_delta", r.tau_delta ? json(*r.tau_delta) : json(nullptr)},
                           {"final_diameter", r.final_diameter},
                           {"violations", r.total_violations()}});
        csv << r.seed << ',' << r.steps << ',' << to_string(r.stop) << ','
            << (r.tau_delta ? std::to_string(*r.tau_delta) : "") << ',' << format_double(r.final_diameter) << ','
            << r.total_violations() << '\n';
    }
    const json j = {{"runs", s.runs.size()},
                    {"seed_base", base},
                    {"consensus_runs", s.consensus_runs},
                    {"consensus_rate", s.consensus_rate()},
                    {"steady_runs", s.steady_runs},
                    {"tau_found", s.tau_found},
                    {"tau_min", s.tau_min ? json(*s.tau_min) : json(nullptr)},
                    {"tau_max", s.tau_max ? json(*s.tau_max) : json(nullptr)},
                    {"tau_mean", s.tau_mean},
                    {"violations", s.violations},
                    {"total_violations", s.total_violations()},
                    {"per_run", per_run}};
    emit(c, c.format == "csv" ? csv.str() : j.dump(2) + "\n");
    return s.total_violations() == 0 ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed Hegselmann-Krause opinion dynamics: simulation and verification"};
    app.require_subcommand(1);

    Common sim_c, check_c, spec_c, scen_c, batch_c;
    std::string sim_config, sim_scenario;
    auto* sim = app.add_subcommand("simulate", "Run a configuration and write the trajectory");
    sim->add_option("--config", sim_config, "Model configuration file");
    sim->add_option("--scenario", sim_scenario, "Built-in scenario name");
    add_common(sim, sim_c, "csv");

    std::string check_path;
    double check_delta = 0.0;
    bool check_steps = false;
    auto* check = app.add_subcommand("check", "Evaluate every monitor over a stored trajectory");
    check->add_option("trajectory", check_path, "Trajectory file (.csv or .json)")->required();
    check->add_option("--delta", check_delta, "delta for tau and the interaction checks (default eps/4)");
    check->add_flag("--steps", check_steps, "Include per-step records");
    add_common(check, check_c, "json");

    std::string spec_traj, spec_opinions, spec_edges;
    std::size_t spec_t = 0, spec_vertices = 0;
    double spec_eps = 0.0;
    auto* spectral = app.add_subcommand("spectral", "Laplacian spectrum and Cheeger checks for one profile");
    spectral->add_option("--trajectory", spec_traj, "Trajectory file");
    spectral->add_option("--t", spec_t, "Time index within the trajectory");
    spectral->add_option("--opinions", spec_opinions, "Opinions CSV (agent,coord_0,...)");
    spectral->add_option("--epsilon", spec_eps, "Confidence bound for --opinions");
    spectral->add_option("--edges", spec_edges, "Edge list, one 'i j' pair per line");
    spectral->add_option("--vertices", spec_vertices, "Vertex count for --edges");
    add_common(spectral, spec_c, "json");

    std::string scen_name;
    bool scen_list = false;
    auto* scen = app.add_subcommand("scenario", "Run a built-in scenario and its assertions");
    scen->add_option("name", scen_name, "Scenario name");
    scen->add_flag("--list", scen_list, "List scenario names");
    add_common(scen, scen_c, "json");

    std::string batch_config, batch_scenario;
    std::size_t batch_runs = 10;
    bool batch_serial = false;
    auto* batch = app.add_subcommand("batch", "Monte-Carlo runs with monitors over consecutive seeds");
    batch->add_option("--config", batch_config, "Model configuration file");
    batch->add_option("--scenario", batch_scenario, "Built-in scenario name");
    batch->add_option("--runs", batch_runs, "Number of runs")->check(CLI::PositiveNumber);
    batch->add_flag("--serial", batch_serial, "Use the single-threaded runner");
    add_common(batch, batch_c, "json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*sim) return run_simulate(sim_config, sim_scenario, sim_c);
        if (*check) return run_check(check_path, check_delta, check_steps, check_c);
        if (*spectral) return run_spectral(spec_traj, spec_t, spec_opinions, spec_eps, spec_edges, spec_vertices, spec_c);
        if (*scen) return run_scenario_cmd(scen_name, scen_list, scen_c);
        if (*batch) return run_batch(batch_config, batch_scenario, batch_runs, batch_serial, batch_c);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const IntegrityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kViolation;
    }
    return kUsage;
}

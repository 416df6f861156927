// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "mixed_hk/batch.hpp"
#include "mixed_hk/matching.hpp"
#include "mixed_hk/monitors.hpp"
#include "mixed_hk/profile.hpp"
#include "mixed_hk/rng.hpp"
#include "mixed_hk/scenarios.hpp"
#include "mixed_hk/simulate.hpp"
#include "mixed_hk/spectral.hpp"
#include "mixed_hk/trajectory_io.hpp"

using namespace mixed_hk;

namespace {

// Pinned tolerances and limits.
constexpr double kGapTol = 1e-12;
constexpr double kNl8SlackFactor = 1e-9;  // times n^2 eps^2
constexpr double kNl8EqualityTol = 1e-12;
constexpr double kContractionSlack = 1e-12;
constexpr double kConsensusTarget = 1e-9;
constexpr double kTailFactor = 1e-6;  // times eps
constexpr double kSandwichTol = 1e-9;
constexpr double kFactorizationTol = 1e-12;
constexpr double kDecompositionTol = 1e-10;
constexpr double kCriterion1Seconds = 1.0;
constexpr double kCriterion2Seconds = 10.0;
constexpr double kCriterion6Seconds = 60.0;

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> failures;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (failures.size() < 5) failures.push_back(what);
        }
    }
};

std::vector<double> random_alpha(CounterRng& rng, std::size_t n) {
    std::vector<double> a(n);
    for (auto& v : a) {
        const auto pick = rng.below(5);
        v = pick == 0 ? 0.0 : pick == 1 ? 1.0 : rng.uniform();
    }
    return a;
}

Trajectory simulate_with(std::size_t n, std::size_t d, double eps, Matrix x, StubbornnessSchedule schedule,
                         std::size_t steps, double tol = 1e-12, std::uint64_t seed = 0) {
    ModelConfig c;
    c.n = n;
    c.d = d;
    c.epsilon = eps;
    c.max_steps = steps;
    c.consensus_tol = tol;
    c.seed = seed;
    c.initial.coords = std::move(x);
    c.schedule = std::move(schedule);
    return simulate(c);
}

Outcome counterexamples() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    for (const std::string name : {"example1", "example2", "example3"}) {
        const ScenarioReport r = run_scenario(name);
        for (const auto& c : r.claims)
            o.require(c.pass, name + "/" + c.name + ": expected " + c.expected + ", observed " + c.observed);
    }

    // Restated directly: the halving gap and the merge/departure pair.
    const Trajectory one = run_scenario("example1").trajectory;
    o.require(one.stop == StopReason::max_steps && one.steps() == 200, "example1 stopped early");
    for (std::size_t t = 0; t < one.states.size(); ++t) {
        const double gap = std::abs(one.states[t](1, 0) - one.states[t](0, 0));
        o.require(std::abs(gap - std::ldexp(1.0, -static_cast<int>(t))) <= kGapTol, "example1 gap law at t=" + std::to_string(t));
    }
    const Trajectory two = run_scenario("example2").trajectory;
    const std::vector<MergeEvent> events = detect_merge_events(two.states);
    o.require(std::any_of(events.begin(), events.end(),
                          [](const MergeEvent& e) { return e.t == 1 && e.departed && e.departed_at == 2u; }),
              "example2 lacks merge@1 / depart@2");
    const Trajectory three = run_scenario("example3").trajectory;
    for (double delta : {1.0, 0.5, 0.1}) {
        bool any = false;
        for (std::size_t t = 0; t < three.states.size(); ++t) any |= check_delta_equilibrium(three.state(t), delta).exists;
        o.require(!any, "example3 reached a delta-equilibrium for delta=" + std::to_string(delta));
    }

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs < kCriterion1Seconds, "runtime " + std::to_string(secs) + " s");
    o.detail = "3 scenarios, " + std::to_string(secs) + " s";
    return o;
}

Outcome energy_descent() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    CounterRng rng(0xac02);
    std::size_t violations = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n = 1 + rng.below(10);
        const std::size_t d = 1 + rng.below(3);
        const double eps = 0.05 + rng.uniform();
        const OpinionState s{0, random_opinions(n, d, rng.next()), eps};
        const std::vector<double> alpha = random_alpha(rng, n);
        const OpinionState next = step(s, alpha);
        const double drop = energy(s) - energy(next);
        const double slack = kNl8SlackFactor * static_cast<double>(n * n) * eps * eps;
        if (drop < nl8_lower_bound(s, next, alpha) - slack) ++violations;
    }
    o.require(violations == 0, std::to_string(violations) + " violations");

    const OpinionState ex{0, Matrix(2, 1, {0, 1}), 1.0};
    const std::vector<double> half{0.5, 0.5};
    const OpinionState ex_next = step(ex, half);
    const double drop = energy(ex) - energy(ex_next);
    const double rhs = nl8_lower_bound(ex, ex_next, half);
    o.require(std::abs(drop - rhs) <= kNl8EqualityTol && std::abs(rhs - 1.5) <= kNl8EqualityTol, "equality case");

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs < kCriterion2Seconds, "runtime " + std::to_string(secs) + " s");
    o.detail = "10000 steps, " + std::to_string(violations) + " violations, equality " + std::to_string(rhs) + ", " +
               std::to_string(secs) + " s";
    return o;
}

Outcome contraction() {
    Outcome o;
    CounterRng rng(0xac03);
    std::size_t beta_violations = 0, growth_violations = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n = 2 + rng.below(9);
        const std::size_t d = 1 + rng.below(3);
        const Matrix x = random_opinions(n, d, rng.next());
        const double diam = diameter(x);
        const std::vector<double> alpha = random_alpha(rng, n);

        // epsilon-trivial: every pair within confidence
        const OpinionState s{0, x, std::max(diam, 1e-3) * (1.0 + rng.uniform())};
        const double after = diameter(step(s, alpha).x);
        if (after > beta(alpha) * diam + kContractionSlack) ++beta_violations;

        const OpinionState a{0, x, 0.05 + 0.5 * rng.uniform()};
        if (diameter(step(a, alpha).x) > diam + kContractionSlack) ++growth_violations;
    }
    o.require(beta_violations == 0, std::to_string(beta_violations) + " contraction violations");
    o.require(growth_violations == 0, std::to_string(growth_violations) + " diameter increases");
    o.detail = "10000 trivial + 10000 arbitrary states, " + std::to_string(beta_violations + growth_violations) +
               " violations";
    return o;
}

Outcome consensus_rate() {
    Outcome o;
    CounterRng rng(0xac04);
    std::size_t worst_margin = 1000;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(9);
        const std::size_t d = 1 + rng.below(3);
        Matrix x = random_opinions(n, d, rng.next());
        const double diam0 = diameter(x);
        const double eps = diam0 * (1.0 + rng.uniform()) + 1e-6;
        const auto allowed =
            static_cast<std::size_t>(std::ceil(std::log(kConsensusTarget / diam0) / std::log(0.5))) + 2;
        const Trajectory t = simulate_with(n, d, eps, std::move(x), StubbornnessSchedule::constant_alpha(std::vector<double>(n, 0.5)),
                                           allowed, 1e-300);
        std::size_t reached = t.states.size();
        for (std::size_t k = 0; k < t.states.size(); ++k)
            if (diameter(t.states[k]) <= kConsensusTarget) {
                reached = k;
                break;
            }
        o.require(reached < t.states.size(), "trial " + std::to_string(trial) + " missed the target");
        if (reached < t.states.size()) worst_margin = std::min(worst_margin, allowed - reached);
    }
    o.detail = "100 starts, smallest margin " + std::to_string(worst_margin) + " steps";
    return o;
}

Outcome summable_stubbornness() {
    Outcome o;
    double worst_tail = 0.0;
    std::size_t violations = 0;
    constexpr std::size_t runs = 20;
    for (std::size_t r = 0; r < runs; ++r) {
        ModelConfig c;
        c.n = 20;
        c.d = 2;
        c.epsilon = 0.3;
        c.max_steps = 2000;
        c.seed = 1000 + r;
        c.initial.kind = InitialSource::Kind::random;
        c.schedule = StubbornnessSchedule::power_law(20, 2.0);
        const Trajectory t = simulate(c);
        for (std::size_t i = 0; i < c.n; ++i) {
            const Theorem2Terms terms = theorem2_terms(t, i);
            violations += terms.violations;
            for (std::size_t k = 1000; k < terms.movements.size(); ++k) worst_tail = std::max(worst_tail, terms.movements[k]);
            if (!terms.partial_sums.empty() &&
                terms.partial_sums.back() > c.epsilon * std::numbers::pi * std::numbers::pi / 6 + 1e-12)
                ++violations;
        }
        o.require(worst_tail < kTailFactor * c.epsilon, "run " + std::to_string(r) + " tail " + std::to_string(worst_tail));
    }
    o.require(violations == 0, std::to_string(violations) + " step-wise violations");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", worst_tail);
    o.detail = std::to_string(runs) + " runs, worst tail " + buf + ", " + std::to_string(violations) + " violations";
    return o;
}

Outcome finite_delta_time() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    CounterRng rng(0xac06);
    std::size_t applicable = 0, violations = 0, worst_tau = 0;
    for (double cap : {0.0, 0.3, 0.9}) {
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t n = 2 + rng.below(9);
            const std::size_t d = 1 + rng.below(2);
            std::vector<double> alpha(n);
            for (auto& a : alpha) a = cap * rng.uniform();
            alpha[rng.below(n)] = cap;
            const double eps = 0.2 + 0.4 * rng.uniform();
            const Trajectory t = simulate_with(n, d, eps, random_opinions(n, d, rng.next()),
                                               StubbornnessSchedule::constant_alpha(alpha), 20000, 1e-12);
            const double delta = eps / 4;
            const CheckReport r = check_trajectory(t, {delta});
            const std::string tag = "cap " + std::to_string(cap) + " trial " + std::to_string(trial);
            o.require(r.tau_delta.has_value(), tag + ": tau not found");
            o.require(r.tau_within_bound, tag + ": tau above bound");
            const CorollaryBounds b = corollary_bounds(n, eps, delta, cap);
            if (r.tau_delta) {
                o.require(static_cast<double>(*r.tau_delta) <= b.tau_bound, tag + ": tau above closed form");
                worst_tau = std::max(worst_tau, *r.tau_delta);
            }
            applicable += r.theorem3_applicable;
            violations += r.theorem3_violations;
        }
    }
    o.require(violations == 0, std::to_string(violations) + " displacement violations");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs < kCriterion6Seconds, "runtime " + std::to_string(secs) + " s");
    o.detail = "300 runs, max tau " + std::to_string(worst_tau) + ", " + std::to_string(applicable) +
               " applicable steps, " + std::to_string(violations) + " violations, " + std::to_string(secs) + " s";
    return o;
}

Graph graph_from_mask(std::size_t n, std::uint64_t mask) {
    Graph g(n);
    std::size_t bit = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j, ++bit)
            if (mask >> bit & 1u) g.add_edge(i, j);
    return g;
}

// Places the vertices of g so that the epsilon-profile is exactly g: one
// coordinate per non-edge (+1/-1 at its ends) and one padding coordinate
// per vertex equalizing squared norms. Edges then sit at squared distance
// 2M and non-edges at 2M + 2, with epsilon^2 = 2M + 1.
OpinionState realize(const Graph& g) {
    const std::size_t n = g.size();
    std::vector<std::pair<std::size_t, std::size_t>> missing;
    std::vector<std::size_t> non_degree(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (!g.has_edge(i, j)) {
                missing.emplace_back(i, j);
                ++non_degree[i];
                ++non_degree[j];
            }
    const std::size_t m = n == 0 ? 0 : *std::max_element(non_degree.begin(), non_degree.end());
    Matrix x(n, missing.size() + n);
    for (std::size_t k = 0; k < missing.size(); ++k) {
        x(missing[k].first, k) = 1.0;
        x(missing[k].second, k) = -1.0;
    }
    for (std::size_t i = 0; i < n; ++i) x(i, missing.size() + i) = std::sqrt(static_cast<double>(m - non_degree[i]));
    return {0, std::move(x), std::sqrt(2.0 * static_cast<double>(m) + 1.0)};
}

Outcome spectral_suite() {
    Outcome o;
    CounterRng rng(0xac07);
    std::size_t graphs = 0, connected = 0;
    auto check_graph = [&](const Graph& g, const std::string& tag) {
        ++graphs;
        const SpectralReport r = check_cheeger(g);
        o.require(r.verdicts.at("zero_multiplicity"), tag + ": zero multiplicity");
        if (!g.connected()) return;
        ++connected;
        const double i = r.cheeger;
        o.require(2.0 * i >= r.lambda2 - kSandwichTol, tag + ": upper Cheeger");
        o.require(r.lambda2 >= i * i / (2.0 * static_cast<double>(r.max_degree)) - kSandwichTol, tag + ": lower Cheeger");
        o.require(r.all_pass(), tag + ": spectral report");

        const OpinionState s = realize(g);
        o.require(build_profile(s).graph == g, tag + ": realization");
        std::vector<double> alpha(g.size());
        for (auto& a : alpha) a = 0.9 * rng.uniform();
        o.require(update_factorization(s, alpha).residual <= kFactorizationTol, tag + ": factorization residual");
        const ChainCheck c = lambda2_chain_check(s, alpha, rng.next(), 64);
        o.require(c.verdicts.at("chain_bound"), tag + ": chain bound");
        o.require(c.verdicts.at("zero_simple"), tag + ": zero simple");
        o.require(c.verdicts.at("perron_frobenius") && c.verdicts.at("perron_frobenius_generalized"),
                  tag + ": smallest eigenvalue simple with positive vector");
    };
    for (std::size_t n = 2; n <= 6; ++n) {
        const std::size_t pairs = n * (n - 1) / 2;
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs); ++mask) {
            const Graph g = graph_from_mask(n, mask);
            if (g.connected()) check_graph(g, "n=" + std::to_string(n) + " mask=" + std::to_string(mask));
        }
    }
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = 2 + rng.below(11);
        const double p = rng.uniform();
        Graph g(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (rng.uniform() < p) g.add_edge(i, j);
        check_graph(g, "random graph " + std::to_string(k));
    }
    o.detail = std::to_string(graphs) + " graphs, " + std::to_string(connected) + " connected";
    return o;
}

Outcome zero_sum_decomposition() {
    Outcome o;
    CounterRng rng(0xac08);
    double worst_residual = 0.0, worst_mass = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n = 1 + rng.below(12);
        const std::size_t d = 1 + rng.below(3);
        std::vector<double> lambda(n);
        double sum = 0.0;
        for (auto& v : lambda) {
            v = rng.below(6) == 0 ? 0.0 : 2.0 * rng.uniform() - 1.0;
            sum += v;
        }
        lambda[rng.below(n)] -= sum;
        const Matrix points = random_opinions(n, d, rng.next(), -5, 5);
        double positive = 0.0;
        for (double v : lambda)
            if (v > 0.0) positive += v;
        const MatchedForm form = match_decomposition(lambda, points);
        const DecompositionCheck check = verify_decomposition(lambda, points, form);
        worst_residual = std::max(worst_residual, check.residual);
        worst_mass = std::max(worst_mass, std::abs(form.positive_mass - positive));
        o.require(check.ok, "trial " + std::to_string(trial) + " rejected");
    }
    o.require(worst_residual <= kDecompositionTol, "residual " + std::to_string(worst_residual));
    o.require(worst_mass <= kDecompositionTol, "mass " + std::to_string(worst_mass));
    char buf[96];
    std::snprintf(buf, sizeof buf, "10000 decompositions, max residual %.3g, max mass error %.3g", worst_residual, worst_mass);
    o.detail = buf;
    return o;
}

// Plain bounded-confidence step written without the library.
Matrix plain_hk(const Matrix& x, double eps) {
    const std::size_t n = x.rows(), d = x.cols();
    Matrix out(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> acc(d, 0.0);
        std::size_t count = 0;
        for (std::size_t j = 0; j < n; ++j) {
            double sq = 0.0;
            for (std::size_t k = 0; k < d; ++k) sq += (x(i, k) - x(j, k)) * (x(i, k) - x(j, k));
            if (sq > eps * eps) continue;
            for (std::size_t k = 0; k < d; ++k) acc[k] += x(j, k);
            ++count;
        }
        for (std::size_t k = 0; k < d; ++k) out(i, k) = acc[k] / static_cast<double>(count);
    }
    return out;
}

Outcome reduction() {
    Outcome o;
    CounterRng rng(0xac09);
    std::size_t mismatches = 0, async_steps = 0, multi_movers = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.below(15);
        const std::size_t d = 1 + rng.below(3);
        const double eps = 0.05 + 0.5 * rng.uniform();
        const Trajectory t =
            simulate_with(n, d, eps, random_opinions(n, d, rng.next()), StubbornnessSchedule::synchronous(n), 50);
        Matrix x = t.states[0];
        for (std::size_t k = 1; k < t.states.size(); ++k) {
            x = plain_hk(x, eps);
            if (!(x == t.states[k])) {
                ++mismatches;
                break;
            }
        }
    }
    o.require(mismatches == 0, std::to_string(mismatches) + " synchronous mismatches");

    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(10);
        const std::size_t d = 1 + rng.below(2);
        const double eps = 0.1 + 0.5 * rng.uniform();
        const Trajectory t = simulate_with(n, d, eps, random_opinions(n, d, rng.next()), StubbornnessSchedule::asynchronous(n),
                                           100, 1e-12, rng.next());
        o.require(single_mover_violations(t) == 0, "async trial " + std::to_string(trial));
        for (std::size_t k = 0; k + 1 < t.states.size(); ++k) {
            ++async_steps;
            std::size_t moved = 0;
            for (std::size_t i = 0; i < n; ++i) moved += !same_opinion(t.states[k].row(i), t.states[k + 1].row(i));
            if (moved > 1) ++multi_movers;
            const Matrix oracle = plain_hk(t.states[k], eps);
            for (std::size_t i = 0; i < n; ++i)
                if (t.alphas[k][i] == 0.0 && !same_opinion(t.states[k + 1].row(i), oracle.row(i))) ++multi_movers;
        }
    }
    o.require(multi_movers == 0, std::to_string(multi_movers) + " async steps moved the wrong agents");
    o.detail = "100 synchronous runs bitwise equal, " + std::to_string(async_steps) + " asynchronous steps single-mover";
    return o;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome persistence() {
    Outcome o;
    const auto dir = std::filesystem::temp_directory_path() / "mixed_hk_acceptance";
    std::filesystem::create_directories(dir);
    std::size_t files = 0;
    for (const auto& name : scenario_names()) {
        const ModelConfig c = builtin_scenario(name).config;
        for (const std::string ext : {".csv", ".json"}) {
            const auto a = dir / (name + "_a" + ext), b = dir / (name + "_b" + ext);
            const Trajectory first = simulate(c);
            write_trajectory(first, a.string());
            write_trajectory(simulate(c), b.string());
            o.require(slurp(a) == slurp(b), name + ext + ": files differ");
            const Trajectory back = read_trajectory(a.string());
            o.require(back.header == first.header && back.states == first.states && back.alphas == first.alphas &&
                          back.stop == first.stop,
                      name + ext + ": round trip");
            files += 2;
        }
    }
    std::filesystem::remove_all(dir);
    o.detail = std::to_string(files) + " files, bitwise identical and exact round trip";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"counterexample scenarios", counterexamples},
        {"energy descent bound", energy_descent},
        {"diameter contraction and non-expansion", contraction},
        {"geometric consensus under constant stubbornness", consensus_rate},
        {"convergence under summable openness", summable_stubbornness},
        {"finite delta-trivial time and displacement bound", finite_delta_time},
        {"spectral suite", spectral_suite},
        {"zero-sum matching decomposition", zero_sum_decomposition},
        {"reduction to bounded-confidence dynamics", reduction},
        {"determinism and persistence", persistence},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.detail.c_str());
        for (const auto& f : o.failures) std::printf("       %s\n", f.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed;
}

#include "mixed_hk/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <sstream>

#include "mixed_hk/errors.hpp"

namespace mixed_hk {

Graph Graph::from_edges(std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> edges) {
    Graph g(n);
    for (const auto& [i, j] : edges) g.add_edge(i, j);
    return g;
}

void Graph::add_edge(std::size_t i, std::size_t j) {
    if (i >= n_ || j >= n_ || i == j) throw ConfigError("graph edge endpoints must be distinct vertices");
    if (has_edge(i, j)) return;
    adj_[i * n_ + j] = 1;
    adj_[j * n_ + i] = 1;
    ++degree_[i];
    ++degree_[j];
}

std::size_t Graph::max_degree() const {
    return degree_.empty() ? 0 : *std::max_element(degree_.begin(), degree_.end());
}

std::size_t Graph::edge_count() const {
    return std::accumulate(degree_.begin(), degree_.end(), std::size_t{0}) / 2;
}

std::vector<std::pair<std::size_t, std::size_t>> Graph::edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i + 1; j < n_; ++j)
            if (has_edge(i, j)) out.emplace_back(i, j);
    return out;
}

std::vector<std::size_t> Graph::component_labels() const {
    constexpr auto unset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> label(n_, unset);
    std::vector<std::size_t> stack;
    std::size_t next = 0;
    for (std::size_t root = 0; root < n_; ++root) {
        if (label[root] != unset) continue;
        label[root] = next;
        stack.push_back(root);
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            for (std::size_t w = 0; w < n_; ++w) {
                if (has_edge(v, w) && label[w] == unset) {
                    label[w] = next;
                    stack.push_back(w);
                }
            }
        }
        ++next;
    }
    return label;
}

std::size_t Graph::component_count() const {
    const auto labels = component_labels();
    return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

std::vector<std::vector<std::size_t>> Profile::components() const {
    std::vector<std::vector<std::size_t>> out(component_count);
    for (std::size_t i = 0; i < component_ids.size(); ++i) out[component_ids[i]].push_back(i);
    return out;
}

Profile build_profile(const OpinionState& state) {
    Profile p;
    p.t = state.t;
    p.graph = Graph(state.n());
    for (std::size_t i = 0; i < state.n(); ++i)
        for (std::size_t j = i + 1; j < state.n(); ++j)
            if (within_confidence(state.x.row(i), state.x.row(j), state.epsilon)) p.graph.add_edge(i, j);
    p.component_ids = p.graph.component_labels();
    p.component_count =
        p.component_ids.empty() ? 0 : *std::max_element(p.component_ids.begin(), p.component_ids.end()) + 1;
    return p;
}

double diameter(const Matrix& points) {
    if (points.rows() == 0) throw DomainError("diameter of an empty point set");
    double best = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i)
        for (std::size_t j = i + 1; j < points.rows(); ++j)
            best = std::max(best, squared_distance(points.row(i), points.row(j)));
    return std::sqrt(best);
}

double diameter(const Matrix& points, std::span<const std::size_t> subset) {
    if (subset.empty()) throw DomainError("diameter of an empty point set");
    double best = 0.0;
    for (std::size_t a = 0; a < subset.size(); ++a)
        for (std::size_t b = a + 1; b < subset.size(); ++b)
            best = std::max(best, squared_distance(points.row(subset[a]), points.row(subset[b])));
    return std::sqrt(best);
}

bool is_delta_trivial(const Matrix& points, double delta) { return diameter(points) <= delta; }

bool is_delta_trivial(const Matrix& points, std::span<const std::size_t> subset, double delta) {
    return diameter(points, subset) <= delta;
}

std::vector<double> component_diameters(const Matrix& points, const Profile& profile) {
    std::vector<double> out;
    for (const auto& comp : profile.components()) out.push_back(diameter(points, comp));
    return out;
}

namespace {

Matrix select_rows(const Matrix& points, std::span<const std::size_t> rows) {
    Matrix out(rows.size(), points.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto src = points.row(rows[r]);
        std::copy(src.begin(), src.end(), out.row(r).begin());
    }
    return out;
}

}  // namespace

namespace {

// Solves [G 1; 1' 0][v; m] = [0; 1] by Gaussian elimination with partial
// pivoting; v are the affine weights of the min-norm point of the active set.
bool affine_min_norm(const std::vector<std::vector<double>>& gram, std::vector<double>& v) {
    const std::size_t k = gram.size();
    const std::size_t m = k + 1;
    std::vector<double> a(m * (m + 1), 0.0);
    auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * (m + 1) + c]; };
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < k; ++c) at(r, c) = gram[r][c];
        at(r, k) = 1.0;
        at(k, r) = 1.0;
    }
    at(k, m) = 1.0;
    double scale = 0.0;
    for (std::size_t r = 0; r < k; ++r) scale = std::max(scale, std::abs(gram[r][r]));
    for (std::size_t c = 0; c < m; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < m; ++r)
            if (std::abs(at(r, c)) > std::abs(at(piv, c))) piv = r;
        if (std::abs(at(piv, c)) <= 1e-14 * std::max(1.0, scale)) return false;
        if (piv != c)
            for (std::size_t j = 0; j <= m; ++j) std::swap(at(c, j), at(piv, j));
        for (std::size_t r = 0; r < m; ++r) {
            if (r == c) continue;
            const double f = at(r, c) / at(c, c);
            if (f == 0.0) continue;
            for (std::size_t j = c; j <= m; ++j) at(r, j) -= f * at(c, j);
        }
    }
    v.assign(k, 0.0);
    for (std::size_t r = 0; r < k; ++r) v[r] = at(r, m) / at(r, r);
    return true;
}

}  // namespace

double hull_distance(const Matrix& p, const Matrix& q, const HullDistanceOptions& options) {
    if (p.rows() == 0 || q.rows() == 0) throw DomainError("hull_distance needs two nonempty point sets");
    if (p.cols() != q.cols()) throw ConfigError("hull_distance: point dimensions differ");
    const std::size_t d = p.cols();

    // Nearest point to the origin in conv(P - Q), by Wolfe's active-set method
    // over the pairwise difference vectors.
    const std::size_t count = p.rows() * q.rows();
    Matrix w(count, d);
    for (std::size_t a = 0; a < p.rows(); ++a)
        for (std::size_t b = 0; b < q.rows(); ++b)
            for (std::size_t k = 0; k < d; ++k) w(a * q.rows() + b, k) = p(a, k) - q(b, k);

    std::size_t first = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < count; ++j) {
        const double s = dot(w.row(j), w.row(j));
        if (s < best) best = s, first = j;
    }
    if (best == 0.0) return 0.0;

    std::vector<std::size_t> active{first};
    std::vector<double> weight{1.0};
    std::vector<double> x(w.row(first).begin(), w.row(first).end());
    double upper = std::sqrt(best), lower = 0.0;

    const auto rebuild_x = [&] {
        std::fill(x.begin(), x.end(), 0.0);
        for (std::size_t r = 0; r < active.size(); ++r)
            for (std::size_t k = 0; k < d; ++k) x[k] += weight[r] * w(active[r], k);
    };

    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        upper = norm(x);
        std::size_t enter = 0;
        double smallest = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < count; ++j) {
            const double g = dot(x, w.row(j));
            if (g < smallest) smallest = g, enter = j;
        }
        // Every point y of the hull has <x, y> >= smallest, so |y| >= smallest / |x|.
        lower = upper > 0.0 ? std::max(0.0, smallest / upper) : 0.0;
        if (upper <= options.tolerance) return 0.0;
        if (upper - lower <= options.tolerance) return upper;
        if (std::find(active.begin(), active.end(), enter) != active.end()) break;

        active.push_back(enter);
        weight.push_back(0.0);
        while (true) {
            ++iter;
            std::vector<std::vector<double>> gram(active.size(), std::vector<double>(active.size()));
            for (std::size_t r = 0; r < active.size(); ++r)
                for (std::size_t c = 0; c < active.size(); ++c) gram[r][c] = dot(w.row(active[r]), w.row(active[c]));
            std::vector<double> v;
            if (!affine_min_norm(gram, v)) {
                // Affinely dependent set: drop the entering point and stop refining.
                active.pop_back();
                weight.pop_back();
                rebuild_x();
                iter = options.max_iterations;
                break;
            }
            if (std::all_of(v.begin(), v.end(), [](double t) { return t > 0.0; })) {
                weight = v;
                rebuild_x();
                break;
            }
            double theta = 1.0;
            for (std::size_t r = 0; r < v.size(); ++r)
                if (v[r] <= 0.0 && weight[r] - v[r] > 0.0) theta = std::min(theta, weight[r] / (weight[r] - v[r]));
            for (std::size_t r = 0; r < v.size(); ++r) weight[r] += theta * (v[r] - weight[r]);
            std::vector<std::size_t> keep_idx;
            std::vector<double> keep_w;
            for (std::size_t r = 0; r < active.size(); ++r) {
                if (weight[r] > 1e-15) {
                    keep_idx.push_back(active[r]);
                    keep_w.push_back(weight[r]);
                }
            }
            double total = 0.0;
            for (double t : keep_w) total += t;
            for (double& t : keep_w) t /= total;
            active = std::move(keep_idx);
            weight = std::move(keep_w);
            rebuild_x();
            if (active.size() == 1) break;
        }
    }

    // Rounding stalled progress; accept when the certificate is still tight.
    upper = norm(x);
    double smallest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < count; ++j) smallest = std::min(smallest, dot(x, w.row(j)));
    lower = upper > 0.0 ? std::max(0.0, smallest / upper) : 0.0;
    if (upper <= options.tolerance && lower <= options.tolerance) return 0.0;
    if (upper - lower <= 1e3 * options.tolerance) return upper;
    std::ostringstream msg;
    msg << "hull_distance did not converge (best " << upper << ", lower bound " << lower << ")";
    throw NumericalFailure(msg.str(), upper, upper - lower);
}

double hull_distance(const Matrix& points, std::span<const std::size_t> a, std::span<const std::size_t> b,
                     const HullDistanceOptions& options) {
    return hull_distance(select_rows(points, a), select_rows(points, b), options);
}

bool exceeds_confidence(double dist, double epsilon) { return dist > epsilon * (1.0 + kSeparationGuard); }

EquilibriumVerdict check_delta_equilibrium(const OpinionState& state, double delta) {
    if (!(delta > 0.0)) throw DomainError("delta must be positive");
    const Profile profile = build_profile(state);
    auto groups = profile.components();

    EquilibriumVerdict verdict;
    bool have_close_witness = false;
    for (bool merged = true; merged;) {
        merged = false;
        for (std::size_t a = 0; a < groups.size() && !merged; ++a) {
            for (std::size_t b = a + 1; b < groups.size() && !merged; ++b) {
                const double hd = hull_distance(state.x, groups[a], groups[b]);
                if (exceeds_confidence(hd, state.epsilon)) continue;
                if (!have_close_witness) {
                    have_close_witness = true;
                    verdict.witness_pair = {groups[a].front(), groups[b].front()};
                    verdict.witness_value = hd;
                }
                groups[a].insert(groups[a].end(), groups[b].begin(), groups[b].end());
                std::sort(groups[a].begin(), groups[a].end());
                groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(b));
                merged = true;
            }
        }
    }
    std::sort(groups.begin(), groups.end());
    verdict.partition = groups;

    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double diam = diameter(state.x, groups[g]);
        if (diam > delta) {
            verdict.exists = false;
            verdict.witness_group = g;
            if (!have_close_witness) {
                verdict.failure = EquilibriumVerdict::Failure::group_too_wide;
                verdict.witness_value = diam;
            } else {
                verdict.failure = EquilibriumVerdict::Failure::groups_too_close;
            }
            return verdict;
        }
    }
    verdict.exists = true;
    verdict.failure = EquilibriumVerdict::Failure::none;
    return verdict;
}

EquilibriumVerdict check_delta_equilibrium_exhaustive(const OpinionState& state, double delta) {
    if (!(delta > 0.0)) throw DomainError("delta must be positive");
    const std::size_t n = state.n();
    if (n > 10) throw SizeLimitError("exhaustive partition search is limited to n <= 10");

    // Restricted growth strings enumerate every set partition once:
    // label[0] = 0 and label[i] <= 1 + max(label[0..i-1]).
    std::vector<std::size_t> label(n, 0);
    const auto advance = [&label, n]() {
        for (std::size_t i = n; i-- > 1;) {
            const std::size_t prefix_max = *std::max_element(label.begin(), label.begin() + static_cast<std::ptrdiff_t>(i));
            if (label[i] <= prefix_max) {
                ++label[i];
                std::fill(label.begin() + static_cast<std::ptrdiff_t>(i) + 1, label.end(), 0);
                return true;
            }
        }
        return false;
    };

    EquilibriumVerdict verdict;
    do {
        const std::size_t m = *std::max_element(label.begin(), label.end()) + 1;
        std::vector<std::vector<std::size_t>> groups(m);
        for (std::size_t i = 0; i < n; ++i) groups[label[i]].push_back(i);

        bool ok = std::all_of(groups.begin(), groups.end(),
                              [&](const auto& g) { return diameter(state.x, g) <= delta; });
        for (std::size_t a = 0; ok && a < m; ++a)
            for (std::size_t b = a + 1; ok && b < m; ++b)
                if (!exceeds_confidence(hull_distance(state.x, groups[a], groups[b]), state.epsilon)) ok = false;
        if (ok) {
            verdict.exists = true;
            verdict.partition = groups;
            return verdict;
        }
    } while (advance());
    return verdict;
}

bool same_opinion(std::span<const double> a, std::span<const double> b) {
    if (a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0) return true;
    double diff = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        diff = std::max(diff, std::abs(a[k] - b[k]));
        scale = std::max({scale, std::abs(a[k]), std::abs(b[k])});
    }
    return diff <= 1e-14 * scale;
}

std::vector<MergeEvent> detect_merge_events(std::span<const Matrix> states) {
    std::vector<MergeEvent> events;
    if (states.size() < 2) return events;
    const std::size_t n = states.front().rows();
    for (std::size_t t = 1; t < states.size(); ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!same_opinion(states[t].row(i), states[t].row(j))) continue;
                if (same_opinion(states[t - 1].row(i), states[t - 1].row(j))) continue;
                MergeEvent ev{t, i, j, false, std::nullopt};
                for (std::size_t s = t + 1; s < states.size(); ++s) {
                    if (!same_opinion(states[s].row(i), states[s].row(j))) {
                        ev.departed = true;
                        ev.departed_at = s;
                        break;
                    }
                }
                events.push_back(ev);
            }
        }
    }
    return events;
}

}  // namespace mixed_hk

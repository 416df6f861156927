#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mixed_hk/dynamics.hpp"
#include "mixed_hk/linalg.hpp"

namespace mixed_hk {

/// Simple undirected graph on vertices 0..n-1 with a dense adjacency table.
class Graph {
public:
    Graph() = default;
    explicit Graph(std::size_t n) : n_(n), adj_(n * n, 0), degree_(n, 0) {}

    static Graph from_edges(std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> edges);

    std::size_t size() const noexcept { return n_; }
    void add_edge(std::size_t i, std::size_t j);
    bool has_edge(std::size_t i, std::size_t j) const { return adj_[i * n_ + j] != 0; }
    std::size_t degree(std::size_t i) const { return degree_[i]; }
    std::size_t max_degree() const;
    std::size_t edge_count() const;
    /// Edges as (i, j) with i < j, lexicographically ordered.
    std::vector<std::pair<std::size_t, std::size_t>> edges() const;

    /// Component label per vertex; labels are 0.. in order of smallest member.
    std::vector<std::size_t> component_labels() const;
    std::size_t component_count() const;
    bool connected() const { return component_count() <= 1; }

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    std::size_t n_ = 0;
    std::vector<unsigned char> adj_;
    std::vector<std::size_t> degree_;
};

/// The epsilon-neighborhood graph of a state together with its components.
struct Profile {
    std::size_t t = 0;
    Graph graph;
    std::vector<std::size_t> component_ids;
    std::size_t component_count = 0;

    std::size_t n() const noexcept { return graph.size(); }
    bool connected() const noexcept { return component_count <= 1; }
    /// Members of each component, ascending.
    std::vector<std::vector<std::size_t>> components() const;
};

Profile build_profile(const OpinionState& state);

/// Max pairwise Euclidean distance of the rows of `points` (selected rows
/// when `subset` is given). This is also the diameter of their convex hull.
double diameter(const Matrix& points);
double diameter(const Matrix& points, std::span<const std::size_t> subset);

bool is_delta_trivial(const Matrix& points, double delta);
bool is_delta_trivial(const Matrix& points, std::span<const std::size_t> subset, double delta);

/// Diameter of each profile component, in component-label order.
std::vector<double> component_diameters(const Matrix& points, const Profile& profile);

struct HullDistanceOptions {
    double tolerance = 1e-9;
    std::size_t max_iterations = 10000;
};

/// Euclidean distance between conv(rows of p) and conv(rows of q): the
/// nearest point to the origin in the hull of the pairwise differences,
/// found with Wolfe's active-set method. Returns 0 when the hulls intersect
/// (within the tolerance). Throws NumericalFailure when the duality gap
/// cannot be closed.
double hull_distance(const Matrix& p, const Matrix& q, const HullDistanceOptions& options = {});
double hull_distance(const Matrix& points, std::span<const std::size_t> a, std::span<const std::size_t> b,
                     const HullDistanceOptions& options = {});

/// Relative guard band on the strict test dist > epsilon.
inline constexpr double kSeparationGuard = 1e-9;
bool exceeds_confidence(double dist, double epsilon);

struct EquilibriumVerdict {
    enum class Failure { none, groups_too_close, group_too_wide };

    bool exists = false;
    /// Candidate partition that was tested (always filled in).
    std::vector<std::vector<std::size_t>> partition;
    Failure failure = Failure::none;
    /// groups_too_close: the first pair of connected pieces found within epsilon
    /// of each other, and their hull distance. group_too_wide: the offending
    /// group index in `partition` and its diameter.
    std::pair<std::size_t, std::size_t> witness_pair{0, 0};
    double witness_value = 0.0;
    std::size_t witness_group = 0;
};

/// Decides whether x(t) is a delta-equilibrium. Connected components are
/// merged while their hulls are within epsilon; the resulting partition is
/// valid iff any valid partition exists (see README for the argument).
EquilibriumVerdict check_delta_equilibrium(const OpinionState& state, double delta);

/// Same as check_delta_equilibrium but tests every set partition; n <= 10.
EquilibriumVerdict check_delta_equilibrium_exhaustive(const OpinionState& state, double delta);

/// Two opinions count as equal when bitwise identical or within 1e-14
/// relative (max-norm) of each other.
bool same_opinion(std::span<const double> a, std::span<const double> b);

struct MergeEvent {
    std::size_t t = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    bool departed = false;
    std::optional<std::size_t> departed_at;

    friend bool operator==(const MergeEvent&, const MergeEvent&) = default;
};

/// Every (t, i < j) with x_i(t) == x_j(t) and x_i(t-1) != x_j(t-1), flagging
/// pairs that separate again later in the sequence.
std::vector<MergeEvent> detect_merge_events(std::span<const Matrix> states);

}  // namespace mixed_hk

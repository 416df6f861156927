#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "mixed_hk/linalg.hpp"
#include "mixed_hk/trajectory.hpp"

namespace mixed_hk {

inline constexpr int kTrajectoryVersion = 1;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
/// Strict parse of a whole token; throws ConfigError on anything else.
double parse_double(std::string_view text);

/// Opinions CSV: header `agent,coord_0,...,coord_{d-1}`, one row per agent.
Matrix read_opinions_csv(const std::string& path);
Matrix parse_opinions_csv(std::istream& in);
void write_opinions_csv(const Matrix& x, std::ostream& out);

/// Trajectory CSV: `# key=value` header lines, a `t,agent,x_0..,alpha`
/// column row, one row per (t, agent), and a `# end rows=N` footer. The
/// alpha column is empty on the final state. Throws IntegrityError on a
/// version mismatch, a malformed row (named by line) or a missing footer.
void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out);
Trajectory read_trajectory_csv(std::istream& in);
void write_trajectory_csv(const Trajectory& trajectory, const std::string& path);
Trajectory read_trajectory_csv(const std::string& path);

/// Whole trajectory (states, alphas, stop reason) as one JSON document.
void write_trajectory_json(const Trajectory& trajectory, std::ostream& out);
Trajectory read_trajectory_json(std::istream& in);

/// Dispatches on the extension: `.json` selects JSON, anything else CSV.
void write_trajectory(const Trajectory& trajectory, const std::string& path);
Trajectory read_trajectory(const std::string& path);

/// Metrics and merge events written next to a CSV trajectory as `<path>.json`.
void write_sidecar(const Trajectory& trajectory, const std::string& csv_path);

}  // namespace mixed_hk

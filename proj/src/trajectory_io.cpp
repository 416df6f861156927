#include "mixed_hk/trajectory_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "mixed_hk/errors.hpp"
#include "mixed_hk/report.hpp"

namespace mixed_hk {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

double parse_double(std::string_view text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last || text.empty()) {
        throw ConfigError("not a number: '" + std::string(text) + "'");
    }
    return v;
}

namespace {

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

bool read_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

std::size_t parse_index(const std::string& text) {
    std::size_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty())
        throw ConfigError("not a nonnegative integer: '" + text + "'");
    return v;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    return out;
}

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

Matrix parse_opinions_csv(std::istream& in) {
    std::string line;
    if (!read_line(in, line)) throw ConfigError("opinions CSV: empty file");
    const auto header = split(line, ',');
    if (header.size() < 2 || header[0] != "agent") throw ConfigError("opinions CSV line 1: expected 'agent,coord_0,...'");
    const std::size_t d = header.size() - 1;
    for (std::size_t k = 0; k < d; ++k)
        if (header[k + 1] != "coord_" + std::to_string(k))
            throw ConfigError("opinions CSV line 1: column " + std::to_string(k + 2) + " should be coord_" + std::to_string(k));
    std::vector<double> data;
    std::size_t rows = 0;
    std::size_t lineno = 1;
    while (read_line(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        const std::string where = "opinions CSV line " + std::to_string(lineno) + ": ";
        if (cells.size() != d + 1) throw ConfigError(where + "expected " + std::to_string(d + 1) + " fields");
        try {
            if (parse_index(cells[0]) != rows) throw ConfigError("agents must be listed as 0, 1, 2, ...");
            for (std::size_t k = 0; k < d; ++k) data.push_back(parse_double(cells[k + 1]));
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
        ++rows;
    }
    if (rows == 0) throw ConfigError("opinions CSV: no agents");
    return Matrix(rows, d, std::move(data));
}

Matrix read_opinions_csv(const std::string& path) {
    auto in = open_in(path);
    return parse_opinions_csv(in);
}

void write_opinions_csv(const Matrix& x, std::ostream& out) {
    out << "agent";
    for (std::size_t k = 0; k < x.cols(); ++k) out << ",coord_" << k;
    out << '\n';
    for (std::size_t i = 0; i < x.rows(); ++i) {
        out << i;
        for (std::size_t k = 0; k < x.cols(); ++k) out << ',' << format_double(x(i, k));
        out << '\n';
    }
}

void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out) {
    const auto& h = trajectory.header;
    out << "# version=" << h.version << '\n'
        << "# n=" << h.n << '\n'
        << "# d=" << h.d << '\n'
        << "# epsilon=" << format_double(h.epsilon) << '\n'
        << "# schedule=" << h.schedule << '\n'
        << "# seed=" << h.seed << '\n'
        << "# stop=" << to_string(trajectory.stop) << '\n';
    out << "t,agent";
    for (std::size_t k = 0; k < h.d; ++k) out << ",x_" << k;
    out << ",alpha\n";
    std::size_t rows = 0;
    for (std::size_t t = 0; t < trajectory.states.size(); ++t) {
        const Matrix& x = trajectory.states[t];
        for (std::size_t i = 0; i < x.rows(); ++i) {
            out << t << ',' << i;
            for (std::size_t k = 0; k < x.cols(); ++k) out << ',' << format_double(x(i, k));
            out << ',';
            if (t < trajectory.alphas.size()) out << format_double(trajectory.alphas[t][i]);
            out << '\n';
            ++rows;
        }
    }
    out << "# end rows=" << rows << '\n';
}

Trajectory read_trajectory_csv(std::istream& in) {
    Trajectory traj;
    std::map<std::string, std::string> meta;
    std::string line;
    std::size_t lineno = 0;
    bool have_columns = false;
    while (read_line(in, line)) {
        ++lineno;
        if (line.rfind("# ", 0) != 0) {
            have_columns = true;
            break;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw IntegrityError("trajectory line " + std::to_string(lineno) + ": bad header line");
        meta[line.substr(2, eq - 2)] = line.substr(eq + 1);
    }
    for (const char* key : {"version", "n", "d", "epsilon", "schedule", "seed"})
        if (!meta.count(key)) throw IntegrityError(std::string("trajectory header is missing '") + key + "'");
    auto& h = traj.header;
    try {
        h.version = static_cast<int>(parse_index(meta["version"]));
        h.n = parse_index(meta["n"]);
        h.d = parse_index(meta["d"]);
        h.epsilon = parse_double(meta["epsilon"]);
        h.schedule = meta["schedule"];
        h.seed = std::stoull(meta["seed"]);
        if (meta.count("stop")) traj.stop = stop_reason_from_string(meta["stop"]);
    } catch (const std::exception& e) {
        throw IntegrityError(std::string("trajectory header: ") + e.what());
    }
    if (h.version != kTrajectoryVersion)
        throw IntegrityError("trajectory version " + std::to_string(h.version) + " is not supported (expected " +
                             std::to_string(kTrajectoryVersion) + ")");
    if (!have_columns) throw IntegrityError("trajectory is truncated: no column header");
    std::string expected = "t,agent";
    for (std::size_t k = 0; k < h.d; ++k) expected += ",x_" + std::to_string(k);
    expected += ",alpha";
    if (line != expected) throw IntegrityError("trajectory line " + std::to_string(lineno) + ": expected '" + expected + "'");

    std::size_t rows = 0;
    bool footer = false;
    std::vector<double> alpha_row;
    std::vector<double> coords;
    bool final_state = false;
    while (read_line(in, line)) {
        ++lineno;
        if (line.rfind("# end rows=", 0) == 0) {
            std::size_t declared = 0;
            try {
                declared = parse_index(line.substr(11));
            } catch (const ConfigError&) {
                throw IntegrityError("trajectory line " + std::to_string(lineno) + ": bad footer");
            }
            if (declared != rows) throw IntegrityError("trajectory footer declares " + std::to_string(declared) +
                                                       " rows but " + std::to_string(rows) + " were read");
            footer = true;
            break;
        }
        const std::string where = "trajectory row " + std::to_string(rows + 1) + " (line " + std::to_string(lineno) + "): ";
        const auto cells = split(line, ',');
        if (cells.size() != h.d + 3) throw IntegrityError(where + "expected " + std::to_string(h.d + 3) + " fields");
        try {
            const std::size_t t = parse_index(cells[0]);
            const std::size_t i = parse_index(cells[1]);
            if (final_state) throw ConfigError("rows continue after the final state");
            if (t != traj.states.size() || i != coords.size() / std::max<std::size_t>(h.d, 1))
                throw ConfigError("rows out of order");
            for (std::size_t k = 0; k < h.d; ++k) coords.push_back(parse_double(cells[2 + k]));
            const std::string& a = cells.back();
            if (a.empty()) {
                if (i != 0 && alpha_row.size() == i) throw ConfigError("alpha column is blank mid-state");
            } else {
                if (alpha_row.size() != i) throw ConfigError("alpha column is blank mid-state");
                alpha_row.push_back(parse_double(a));
            }
            if (i + 1 == h.n) {
                traj.states.emplace_back(h.n, h.d, std::move(coords));
                coords.clear();
                if (alpha_row.empty()) {
                    final_state = true;
                } else {
                    if (alpha_row.size() != h.n) throw ConfigError("alpha column is blank mid-state");
                    traj.alphas.push_back(std::move(alpha_row));
                }
                alpha_row.clear();
            }
        } catch (const ConfigError& e) {
            throw IntegrityError(where + e.what());
        }
        ++rows;
    }
    if (!footer) throw IntegrityError("trajectory is truncated: missing '# end rows=' footer");
    if (!coords.empty()) throw IntegrityError("trajectory ends in the middle of a state");
    if (!traj.states.empty() && traj.alphas.size() + 1 != traj.states.size())
        throw IntegrityError("trajectory is missing its final state");
    return traj;
}

void write_trajectory_csv(const Trajectory& trajectory, const std::string& path) {
    auto out = open_out(path);
    write_trajectory_csv(trajectory, out);
}

Trajectory read_trajectory_csv(const std::string& path) {
    auto in = open_in(path);
    return read_trajectory_csv(in);
}

void write_trajectory_json(const Trajectory& trajectory, std::ostream& out) {
    const auto& h = trajectory.header;
    json j;
    j["version"] = h.version;
    j["n"] = h.n;
    j["d"] = h.d;
    j["epsilon"] = h.epsilon;
    j["schedule"] = h.schedule;
    j["seed"] = h.seed;
    j["stop"] = to_string(trajectory.stop);
    json states = json::array();
    for (const Matrix& x : trajectory.states) {
        json rows = json::array();
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const auto r = x.row(i);
            rows.push_back(std::vector<double>(r.begin(), r.end()));
        }
        states.push_back(std::move(rows));
    }
    j["states"] = std::move(states);
    j["alphas"] = trajectory.alphas;
    json events = json::array();
    for (const auto& e : trajectory.events) events.push_back(to_json(e));
    j["events"] = std::move(events);
    out << j.dump() << '\n';
}

Trajectory read_trajectory_json(std::istream& in) {
    Trajectory traj;
    try {
        const json j = json::parse(in);
        auto& h = traj.header;
        h.version = j.at("version").get<int>();
        if (h.version != kTrajectoryVersion)
            throw IntegrityError("trajectory version " + std::to_string(h.version) + " is not supported");
        h.n = j.at("n").get<std::size_t>();
        h.d = j.at("d").get<std::size_t>();
        h.epsilon = j.at("epsilon").get<double>();
        h.schedule = j.at("schedule").get<std::string>();
        h.seed = j.at("seed").get<std::uint64_t>();
        traj.stop = stop_reason_from_string(j.at("stop").get<std::string>());
        for (const auto& s : j.at("states")) {
            if (s.size() != h.n) throw IntegrityError("trajectory JSON: state has the wrong number of agents");
            std::vector<double> data;
            for (const auto& row : s) {
                if (row.size() != h.d) throw IntegrityError("trajectory JSON: opinion has the wrong dimension");
                for (const auto& v : row) data.push_back(v.get<double>());
            }
            traj.states.emplace_back(h.n, h.d, std::move(data));
        }
        traj.alphas = j.at("alphas").get<std::vector<std::vector<double>>>();
        if (!traj.states.empty() && traj.alphas.size() + 1 != traj.states.size())
            throw IntegrityError("trajectory JSON: alphas and states disagree in length");
        if (j.contains("events")) {
            for (const auto& e : j.at("events")) {
                MergeEvent ev;
                ev.t = e.at("t").get<std::size_t>();
                ev.i = e.at("i").get<std::size_t>();
                ev.j = e.at("j").get<std::size_t>();
                ev.departed = e.at("departed").get<bool>();
                if (e.contains("departed_at") && !e.at("departed_at").is_null())
                    ev.departed_at = e.at("departed_at").get<std::size_t>();
                traj.events.push_back(ev);
            }
        }
    } catch (const json::exception& e) {
        throw IntegrityError(std::string("trajectory JSON: ") + e.what());
    }
    return traj;
}

void write_trajectory(const Trajectory& trajectory, const std::string& path) {
    auto out = open_out(path);
    if (ends_with(path, ".json"))
        write_trajectory_json(trajectory, out);
    else
        write_trajectory_csv(trajectory, out);
}

Trajectory read_trajectory(const std::string& path) {
    auto in = open_in(path);
    return ends_with(path, ".json") ? read_trajectory_json(in) : read_trajectory_csv(in);
}

void write_sidecar(const Trajectory& trajectory, const std::string& csv_path) {
    json j;
    json metrics = json::array();
    for (const auto& m : trajectory.metrics) metrics.push_back(to_json(m));
    json events = json::array();
    for (const auto& e : trajectory.events) events.push_back(to_json(e));
    j["metrics"] = std::move(metrics);
    j["events"] = std::move(events);
    j["online_violations"] = trajectory.online_violations;
    j["stop"] = to_string(trajectory.stop);
    auto out = open_out(csv_path + ".json");
    out << j.dump(2) << '\n';
}

}  // namespace mixed_hk

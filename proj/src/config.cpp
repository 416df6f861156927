#include "mixed_hk/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "mixed_hk/errors.hpp"
#include "mixed_hk/trajectory_io.hpp"

namespace mixed_hk {

namespace {

struct Entry {
    std::string value;
    std::size_t line = 0;
};

const std::set<std::string> kKnownKeys = {
    "n", "d", "epsilon", "max_steps", "consensus_tol", "seed",
    "schedule.kind", "schedule.a", "schedule.alpha", "schedule.table",
    "initial.source", "initial.coords", "initial.path", "initial.low", "initial.high",
    "monitors.energy", "monitors.nl8", "monitors.contraction", "monitors.theorem2",
    "monitors.theorem3", "monitors.interaction", "monitors.delta",
};

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void fail(std::size_t line, const std::string& message) {
    throw ConfigError("config line " + std::to_string(line) + ": " + message);
}

class Reader {
public:
    explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    std::size_t line(const std::string& key) const { return has(key) ? entries_.at(key).line : 0; }

    const Entry& required(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) throw ConfigError("config: missing required key '" + key + "'");
        return it->second;
    }

    double number(const std::string& key) const { return to_number(key, required(key)); }
    double number_or(const std::string& key, double fallback) const {
        return has(key) ? to_number(key, entries_.at(key)) : fallback;
    }

    std::uint64_t integer(const std::string& key) const { return to_integer(key, required(key)); }
    std::uint64_t integer_or(const std::string& key, std::uint64_t fallback) const {
        return has(key) ? to_integer(key, entries_.at(key)) : fallback;
    }

    bool flag_or(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const Entry& e = entries_.at(key);
        if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
        if (e.value == "false" || e.value == "0" || e.value == "no") return false;
        fail(e.line, key + " must be true or false, got '" + e.value + "'");
    }

    std::vector<double> vector(const std::string& key) const {
        const Entry& e = required(key);
        return to_vector(key, e.value, e.line);
    }

    std::vector<std::vector<double>> rows(const std::string& key) const {
        const Entry& e = required(key);
        std::vector<std::vector<double>> out;
        std::stringstream ss(e.value);
        std::string part;
        while (std::getline(ss, part, ';')) {
            if (trim(part).empty()) fail(e.line, key + " has an empty row");
            out.push_back(to_vector(key, part, e.line));
        }
        if (out.empty()) fail(e.line, key + " has no rows");
        return out;
    }

private:
    static double to_number(const std::string& key, const Entry& e) {
        try {
            return parse_double(e.value);
        } catch (const ConfigError&) {
            fail(e.line, key + " must be a number, got '" + e.value + "'");
        }
    }

    static std::uint64_t to_integer(const std::string& key, const Entry& e) {
        std::uint64_t v = 0;
        const auto res = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
        if (res.ec != std::errc{} || res.ptr != e.value.data() + e.value.size() || e.value.empty())
            fail(e.line, key + " must be a nonnegative integer, got '" + e.value + "'");
        return v;
    }

    static std::vector<double> to_vector(const std::string& key, const std::string& text, std::size_t line) {
        std::vector<double> out;
        std::stringstream ss(text);
        std::string token;
        while (ss >> token) {
            if (!token.empty() && token.back() == ',') token.pop_back();
            try {
                out.push_back(parse_double(token));
            } catch (const ConfigError&) {
                fail(line, key + " contains a non-number '" + token + "'");
            }
        }
        return out;
    }

    std::map<std::string, Entry> entries_;
};

void check_alpha(const std::vector<double>& values, const std::string& key, std::size_t line) {
    for (double a : values)
        if (!(a >= 0.0 && a <= 1.0)) fail(line, key + " entries must lie in [0, 1], got " + format_double(a));
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ' ';
        out += format_double(values[i]);
    }
    return out;
}

}  // namespace

ModelConfig parse_config(std::istream& in) {
    std::map<std::string, Entry> entries;
    std::string section;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(lineno, "unterminated section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (section != "schedule" && section != "initial" && section != "monitors")
                fail(lineno, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
        std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) fail(lineno, "empty key");
        if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
        if (!kKnownKeys.count(key)) fail(lineno, "unknown key '" + key + "'");
        if (entries.count(key))
            fail(lineno, "duplicate key '" + key + "' (first set on line " + std::to_string(entries[key].line) + ")");
        entries[key] = {value, lineno};
    }

    const Reader r(std::move(entries));
    ModelConfig c;
    c.n = r.integer("n");
    c.d = r.integer("d");
    if (c.n < 1) fail(r.line("n"), "n must be >= 1");
    if (c.d < 1) fail(r.line("d"), "d must be >= 1");
    c.epsilon = r.number("epsilon");
    if (!(c.epsilon > 0.0) || !std::isfinite(c.epsilon)) fail(r.line("epsilon"), "epsilon must be a finite value > 0");
    c.max_steps = r.integer("max_steps");
    if (c.max_steps < 1) fail(r.line("max_steps"), "max_steps must be >= 1");
    c.consensus_tol = r.number_or("consensus_tol", 1e-12);
    if (!(c.consensus_tol > 0.0)) fail(r.line("consensus_tol"), "consensus_tol must be > 0");
    c.seed = r.integer_or("seed", 0);

    const Entry& kind_entry = r.required("schedule.kind");
    ScheduleKind kind{};
    try {
        kind = schedule_kind_from_string(kind_entry.value);
    } catch (const std::exception&) {
        fail(kind_entry.line, "schedule.kind must be one of synchronous, asynchronous, constant, power_law, table");
    }
    const auto reject = [&](const char* key) {
        if (r.has(key)) fail(r.line(key), std::string(key) + " does not apply to schedule.kind = " + kind_entry.value);
    };
    switch (kind) {
        case ScheduleKind::synchronous:
        case ScheduleKind::asynchronous:
            reject("schedule.a");
            reject("schedule.alpha");
            reject("schedule.table");
            c.schedule = kind == ScheduleKind::synchronous ? StubbornnessSchedule::synchronous(c.n)
                                                           : StubbornnessSchedule::asynchronous(c.n);
            break;
        case ScheduleKind::constant: {
            reject("schedule.a");
            reject("schedule.table");
            auto alpha = r.vector("schedule.alpha");
            if (alpha.size() != c.n)
                fail(r.line("schedule.alpha"), "schedule.alpha needs n = " + std::to_string(c.n) + " entries");
            check_alpha(alpha, "schedule.alpha", r.line("schedule.alpha"));
            c.schedule = StubbornnessSchedule::constant_alpha(std::move(alpha));
            break;
        }
        case ScheduleKind::power_law: {
            reject("schedule.alpha");
            reject("schedule.table");
            const double a = r.number("schedule.a");
            if (!(a > 1.0) || !std::isfinite(a)) fail(r.line("schedule.a"), "schedule.a must be a finite value > 1");
            c.schedule = StubbornnessSchedule::power_law(c.n, a);
            break;
        }
        case ScheduleKind::table: {
            reject("schedule.a");
            reject("schedule.alpha");
            auto rows = r.rows("schedule.table");
            for (const auto& row : rows) {
                if (row.size() != c.n)
                    fail(r.line("schedule.table"), "every schedule.table row needs n = " + std::to_string(c.n) + " entries");
                check_alpha(row, "schedule.table", r.line("schedule.table"));
            }
            c.schedule = StubbornnessSchedule::from_table(std::move(rows));
            break;
        }
    }

    const Entry& source = r.required("initial.source");
    if (source.value == "inline") {
        const auto rows = r.rows("initial.coords");
        if (rows.size() != c.n) fail(r.line("initial.coords"), "initial.coords needs n = " + std::to_string(c.n) + " rows");
        std::vector<double> data;
        for (const auto& row : rows) {
            if (row.size() != c.d)
                fail(r.line("initial.coords"), "every initial.coords row needs d = " + std::to_string(c.d) + " values");
            for (double v : row) {
                if (!std::isfinite(v)) fail(r.line("initial.coords"), "initial.coords must be finite");
                data.push_back(v);
            }
        }
        c.initial.kind = InitialSource::Kind::inline_coords;
        c.initial.coords = Matrix(c.n, c.d, std::move(data));
    } else if (source.value == "file") {
        c.initial.kind = InitialSource::Kind::file;
        c.initial.path = r.required("initial.path").value;
        if (c.initial.path.empty()) fail(r.line("initial.path"), "initial.path is empty");
    } else if (source.value == "random") {
        c.initial.kind = InitialSource::Kind::random;
        c.initial.low = r.number_or("initial.low", 0.0);
        c.initial.high = r.number_or("initial.high", 1.0);
        if (!(c.initial.low < c.initial.high))
            fail(r.has("initial.high") ? r.line("initial.high") : r.line("initial.low"), "initial.low must be < initial.high");
    } else {
        fail(source.line, "initial.source must be inline, file or random");
    }

    c.monitors.energy = r.flag_or("monitors.energy", false);
    c.monitors.nl8 = r.flag_or("monitors.nl8", false);
    c.monitors.contraction = r.flag_or("monitors.contraction", false);
    c.monitors.theorem2 = r.flag_or("monitors.theorem2", false);
    c.monitors.theorem3 = r.flag_or("monitors.theorem3", false);
    c.monitors.interaction = r.flag_or("monitors.interaction", false);
    c.monitors.delta = r.number_or("monitors.delta", 0.0);
    if (!(c.monitors.delta >= 0.0)) fail(r.line("monitors.delta"), "monitors.delta must be >= 0");
    c.validate();
    return c;
}

ModelConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

ModelConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    return parse_config(in);
}

std::string format_config(const ModelConfig& c) {
    std::ostringstream out;
    out << "n = " << c.n << '\n'
        << "d = " << c.d << '\n'
        << "epsilon = " << format_double(c.epsilon) << '\n'
        << "max_steps = " << c.max_steps << '\n'
        << "consensus_tol = " << format_double(c.consensus_tol) << '\n'
        << "seed = " << c.seed << '\n';
    out << "\n[schedule]\nkind = " << to_string(c.schedule.kind) << '\n';
    switch (c.schedule.kind) {
        case ScheduleKind::constant: out << "alpha = " << join(c.schedule.constant) << '\n'; break;
        case ScheduleKind::power_law: out << "a = " << format_double(c.schedule.exponent) << '\n'; break;
        case ScheduleKind::table: {
            out << "table = ";
            for (std::size_t t = 0; t < c.schedule.table.size(); ++t) out << (t ? "; " : "") << join(c.schedule.table[t]);
            out << '\n';
            break;
        }
        default: break;
    }
    out << "\n[initial]\n";
    switch (c.initial.kind) {
        case InitialSource::Kind::inline_coords: {
            out << "source = inline\ncoords = ";
            for (std::size_t i = 0; i < c.initial.coords.rows(); ++i) {
                const auto row = c.initial.coords.row(i);
                out << (i ? "; " : "") << join(std::vector<double>(row.begin(), row.end()));
            }
            out << '\n';
            break;
        }
        case InitialSource::Kind::file: out << "source = file\npath = " << c.initial.path << '\n'; break;
        case InitialSource::Kind::random:
            out << "source = random\nlow = " << format_double(c.initial.low) << "\nhigh = " << format_double(c.initial.high)
                << '\n';
            break;
    }
    const auto b = [](bool v) { return v ? "true" : "false"; };
    out << "\n[monitors]\n"
        << "energy = " << b(c.monitors.energy) << '\n'
        << "nl8 = " << b(c.monitors.nl8) << '\n'
        << "contraction = " << b(c.monitors.contraction) << '\n'
        << "theorem2 = " << b(c.monitors.theorem2) << '\n'
        << "theorem3 = " << b(c.monitors.theorem3) << '\n'
        << "interaction = " << b(c.monitors.interaction) << '\n'
        << "delta = " << format_double(c.monitors.delta) << '\n';
    return out.str();
}

}  // namespace mixed_hk

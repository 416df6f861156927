#include "mixed_hk/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mixed_hk/errors.hpp"
#include "mixed_hk/rng.hpp"

namespace mixed_hk {

namespace {

void check_alpha(std::span<const double> alpha, std::size_t n, const char* what) {
    if (alpha.size() != n) {
        std::ostringstream msg;
        msg << what << ": alpha has length " << alpha.size() << ", expected " << n;
        throw ConfigError(msg.str());
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(alpha[i] >= 0.0 && alpha[i] <= 1.0)) {
            std::ostringstream msg;
            msg << what << ": alpha[" << i << "] = " << alpha[i] << " is outside [0, 1]";
            throw ConfigError(msg.str());
        }
    }
}

}  // namespace

void OpinionState::validate() const {
    if (n() < 1 || d() < 1) throw ConfigError("opinion state needs n >= 1 and d >= 1");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be a positive finite number");
    for (double v : x.data()) {
        if (!std::isfinite(v)) throw ConfigError("opinion coordinates must be finite");
    }
}

std::string to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::synchronous: return "synchronous";
        case ScheduleKind::asynchronous: return "asynchronous";
        case ScheduleKind::constant: return "constant";
        case ScheduleKind::power_law: return "power_law";
        case ScheduleKind::table: return "table";
    }
    return "unknown";
}

ScheduleKind schedule_kind_from_string(const std::string& name) {
    for (auto k : {ScheduleKind::synchronous, ScheduleKind::asynchronous, ScheduleKind::constant,
                   ScheduleKind::power_law, ScheduleKind::table}) {
        if (to_string(k) == name) return k;
    }
    throw ConfigError("unknown schedule kind '" + name +
                      "' (expected synchronous, asynchronous, constant, power_law or table)");
}

StubbornnessSchedule StubbornnessSchedule::synchronous(std::size_t n) {
    StubbornnessSchedule s;
    s.kind = ScheduleKind::synchronous;
    s.n = n;
    return s;
}

StubbornnessSchedule StubbornnessSchedule::asynchronous(std::size_t n) {
    StubbornnessSchedule s;
    s.kind = ScheduleKind::asynchronous;
    s.n = n;
    return s;
}

StubbornnessSchedule StubbornnessSchedule::constant_alpha(std::vector<double> alpha) {
    StubbornnessSchedule s;
    s.kind = ScheduleKind::constant;
    s.n = alpha.size();
    s.constant = std::move(alpha);
    s.validate();
    return s;
}

StubbornnessSchedule StubbornnessSchedule::power_law(std::size_t n, double exponent) {
    StubbornnessSchedule s;
    s.kind = ScheduleKind::power_law;
    s.n = n;
    s.exponent = exponent;
    s.validate();
    return s;
}

StubbornnessSchedule StubbornnessSchedule::from_table(std::vector<std::vector<double>> rows) {
    StubbornnessSchedule s;
    s.kind = ScheduleKind::table;
    s.n = rows.empty() ? 0 : rows.front().size();
    s.table = std::move(rows);
    s.validate();
    return s;
}

void StubbornnessSchedule::validate() const {
    switch (kind) {
        case ScheduleKind::synchronous:
        case ScheduleKind::asynchronous:
            break;
        case ScheduleKind::constant:
            check_alpha(constant, n, "constant schedule");
            break;
        case ScheduleKind::power_law:
            if (!(exponent > 1.0) || !std::isfinite(exponent)) {
                throw ConfigError("power_law schedule needs exponent a > 1");
            }
            break;
        case ScheduleKind::table:
            if (table.empty()) throw ConfigError("table schedule needs at least one row");
            for (const auto& row : table) check_alpha(row, n, "table schedule");
            break;
    }
}

std::string StubbornnessSchedule::descriptor() const {
    std::ostringstream out;
    out << to_string(kind);
    if (kind == ScheduleKind::power_law) out << "(a=" << exponent << ")";
    if (kind == ScheduleKind::table) out << "(rows=" << table.size() << ")";
    return out.str();
}

bool within_confidence(std::span<const double> a, std::span<const double> b, double epsilon) {
    return squared_distance(a, b) <= epsilon * epsilon;
}

Neighborhoods neighborhoods(const OpinionState& state) {
    const std::size_t n = state.n();
    Neighborhoods out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].push_back(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            if (within_confidence(state.x.row(i), state.x.row(j), state.epsilon)) {
                out[i].push_back(j);
                out[j].push_back(i);
            }
        }
    }
    for (auto& set : out) std::sort(set.begin(), set.end());
    return out;
}

Matrix averaging_matrix(const OpinionState& state) {
    const auto nbrs = neighborhoods(state);
    Matrix a(state.n(), state.n());
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
        const double w = 1.0 / static_cast<double>(nbrs[i].size());
        for (std::size_t j : nbrs[i]) a(i, j) = w;
    }
    return a;
}

OpinionState step(const OpinionState& state, std::span<const double> alpha) {
    return step(state, alpha, neighborhoods(state));
}

OpinionState step(const OpinionState& state, std::span<const double> alpha, const Neighborhoods& nbrs) {
    const std::size_t n = state.n();
    const std::size_t d = state.d();
    check_alpha(alpha, n, "step");
    if (nbrs.size() != n) throw ConfigError("step: neighborhood list does not match the agent count");

    OpinionState next{state.t + 1, state.x, state.epsilon};
    std::vector<double> mean(d);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = alpha[i];
        if (a == 1.0 || nbrs[i].size() == 1) continue;

        std::fill(mean.begin(), mean.end(), 0.0);
        for (std::size_t j : nbrs[i]) {
            const auto xj = state.x.row(j);
            for (std::size_t k = 0; k < d; ++k) mean[k] += xj[k];
        }
        const double count = static_cast<double>(nbrs[i].size());
        for (std::size_t k = 0; k < d; ++k) mean[k] /= count;

        auto out = next.x.row(i);
        if (a == 0.0) {
            std::copy(mean.begin(), mean.end(), out.begin());
        } else {
            const auto xi = state.x.row(i);
            for (std::size_t k = 0; k < d; ++k) out[k] = a * xi[k] + (1.0 - a) * mean[k];
        }
    }
    return next;
}

std::size_t asynchronous_agent(std::uint64_t seed, std::size_t t, std::size_t n) {
    CounterRng rng(seed, t);
    return static_cast<std::size_t>(rng.below(n));
}

std::vector<double> schedule_alpha(const StubbornnessSchedule& schedule, std::size_t t, std::uint64_t seed) {
    const std::size_t n = schedule.n;
    switch (schedule.kind) {
        case ScheduleKind::synchronous:
            return std::vector<double>(n, 0.0);
        case ScheduleKind::asynchronous: {
            std::vector<double> alpha(n, 1.0);
            if (n > 0) alpha[asynchronous_agent(seed, t, n)] = 0.0;
            return alpha;
        }
        case ScheduleKind::constant:
            return schedule.constant;
        case ScheduleKind::power_law: {
            const double open = std::min(1.0, 1.0 / std::pow(static_cast<double>(t) + 1.0, schedule.exponent));
            return std::vector<double>(n, 1.0 - open);
        }
        case ScheduleKind::table:
            if (t >= schedule.table.size()) {
                std::ostringstream msg;
                msg << "table schedule exhausted: t = " << t << " but only " << schedule.table.size()
                    << " rows are defined";
                throw ScheduleExhausted(msg.str());
            }
            return schedule.table[t];
    }
    return {};
}

}  // namespace mixed_hk

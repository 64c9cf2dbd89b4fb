#pragma once

// Run records and PAR-2 scoring.
//
// CSV columns (header required, order free): instance, solver, result,
// wall_seconds, seed, config. `solver` and `seed`/`config` are optional.
// result is one of sat, unsat, unknown, timeout.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fsmt/errors.hpp"
#include "fsmt/io.hpp"

namespace fsmt {

enum class RunResult { Sat, Unsat, Unknown, Timeout };

struct RunRecord {
    std::string instance;
    std::string solver = "fsmt";
    RunResult result = RunResult::Unknown;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;
    std::string config;
};

inline const char* to_string(RunResult r) {
    switch (r) {
        case RunResult::Sat: return "sat";
        case RunResult::Unsat: return "unsat";
        case RunResult::Unknown: return "unknown";
        case RunResult::Timeout: return "timeout";
    }
    return "unknown";
}

inline RunResult parse_run_result(std::string_view s) {
    if (s == "sat") return RunResult::Sat;
    if (s == "unsat") return RunResult::Unsat;
    if (s == "unknown") return RunResult::Unknown;
    if (s == "timeout") return RunResult::Timeout;
    throw InvalidArgument("unknown result '" + std::string(s) + "'");
}

/// Per-record PAR-2 term: the runtime of a decided run within the limit,
/// 2T otherwise (timeouts, unknown answers, and runs beyond T).
inline double par2_term(const RunRecord& r, double T) {
    const bool decided = r.result == RunResult::Sat || r.result == RunResult::Unsat;
    return decided && r.wall_seconds <= T ? r.wall_seconds : 2.0 * T;
}

inline double par2(const std::vector<RunRecord>& runs, double T) {
    if (!(T > 0.0)) throw InvalidArgument("time limit must be positive");
    if (runs.empty()) throw InvalidArgument("no run records");
    double s = 0.0;
    for (const auto& r : runs) s += par2_term(r, T);
    return s / static_cast<double>(runs.size());
}

/// PAR-2 per solver, keyed by solver name.
inline std::map<std::string, double> par2_by_solver(const std::vector<RunRecord>& runs, double T) {
    std::map<std::string, std::vector<RunRecord>> groups;
    for (const auto& r : runs) groups[r.solver].push_back(r);
    std::map<std::string, double> out;
    for (const auto& [name, rs] : groups) out[name] = par2(rs, T);
    return out;
}

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

}  // namespace detail

inline std::vector<RunRecord> parse_run_records(std::string_view text) {
    std::vector<RunRecord> out;
    std::map<std::string, std::size_t> col;
    std::size_t line_no = 0, start = 0;
    bool header = true;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        const auto fields = detail::split_csv_line(line);
        if (header) {
            for (std::size_t i = 0; i < fields.size(); ++i) col[fields[i]] = i;
            for (const char* need : {"instance", "result", "wall_seconds"})
                if (!col.count(need)) throw ParseError(line_no, 1, std::string("missing column '") + need + "'");
            header = false;
            continue;
        }
        auto get = [&](const char* name) -> std::string {
            const auto it = col.find(name);
            if (it == col.end()) return {};
            if (it->second >= fields.size()) throw ParseError(line_no, 1, "row has too few fields");
            return fields[it->second];
        };
        RunRecord r;
        r.instance = get("instance");
        if (auto s = get("solver"); !s.empty()) r.solver = s;
        try {
            r.result = parse_run_result(get("result"));
        } catch (const InvalidArgument& e) {
            throw ParseError(line_no, 1, e.what());
        }
        const auto wall = get("wall_seconds");
        const auto v = detail::parse_plain_number(wall);
        if (!v || *v < 0.0 || !std::isfinite(*v)) throw ParseError(line_no, 1, "bad wall_seconds '" + wall + "'");
        r.wall_seconds = *v;
        if (auto s = get("seed"); !s.empty()) {
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), r.seed);
            if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError(line_no, 1, "bad seed '" + s + "'");
        }
        r.config = get("config");
        out.push_back(std::move(r));
    }
    if (header) throw ParseError(1, 1, "empty run table");
    return out;
}

inline std::string format_run_records(const std::vector<RunRecord>& runs) {
    std::ostringstream os;
    os << "instance,solver,result,wall_seconds,seed,config\n";
    for (const auto& r : runs)
        os << detail::csv_field(r.instance) << ',' << detail::csv_field(r.solver) << ',' << to_string(r.result) << ','
           << format_double(r.wall_seconds) << ',' << r.seed << ',' << detail::csv_field(r.config) << '\n';
    return os.str();
}

}  // namespace fsmt

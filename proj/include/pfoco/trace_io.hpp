#pragma once

#include "pfoco/learners.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace pfoco {

/// Column header of trace files.
inline constexpr const char* kTraceHeader = "t,x,loss,loo_calls_cum,so_calls_cum,block_index";

/// A trace file read back into memory.
struct TraceTable {
    std::vector<std::size_t> t;
    std::vector<Vector> x;
    std::vector<double> loss;
    std::vector<std::uint64_t> loo_calls_cum;
    std::vector<std::uint64_t> so_calls_cum;
    std::vector<std::size_t> block_index;

    std::size_t rows() const { return t.size(); }
};

/// Shortest round-trip text of a double.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// CSV text of a run: header plus one LF-terminated row per round, with x as
/// semicolon-separated coordinates.
inline std::string trace_csv(const RunTrace& trace) {
    std::string out = kTraceHeader;
    out += '\n';
    for (std::size_t i = 0; i < trace.horizon(); ++i) {
        out += std::to_string(i + 1);
        out += ',';
        const Vector& x = trace.played[i];
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            if (j > 0) {
                out += ';';
            }
            out += format_double(x(j));
        }
        out += ',';
        out += format_double(trace.loss[i]);
        out += ',';
        out += std::to_string(trace.loo_calls_cum[i]);
        out += ',';
        out += std::to_string(trace.so_calls_cum[i]);
        out += ',';
        out += std::to_string(trace.block_index[i]);
        out += '\n';
    }
    return out;
}

inline void write_trace_csv(const RunTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InvalidArgument("cannot write trace file " + path);
    }
    out << trace_csv(trace);
    if (!out) {
        throw InvalidArgument("failed while writing trace file " + path);
    }
}

namespace detail {

inline double parse_double(const std::string& s, const std::string& where) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw InvalidArgument(where + ": not a number: \"" + s + "\"");
    }
    return v;
}

inline std::uint64_t parse_count(const std::string& s, const std::string& where) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || s[0] == '-' || end != s.c_str() + s.size()) {
        throw InvalidArgument(where + ": not a nonnegative integer: \"" + s + "\"");
    }
    return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        out.push_back(item);
    }
    if (!s.empty() && s.back() == sep) {
        out.emplace_back();
    }
    return out;
}

}  // namespace detail

/// Parses trace CSV text. Throws InvalidArgument on a wrong header, ragged rows, or
/// rounds out of order.
inline TraceTable parse_trace_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kTraceHeader) {
        throw InvalidArgument("trace: expected header \"" + std::string(kTraceHeader) + "\"");
    }
    TraceTable table;
    std::size_t row = 1;
    Eigen::Index n = -1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) {
            continue;
        }
        const std::string where = "trace line " + std::to_string(row);
        const auto cols = detail::split(line, ',');
        if (cols.size() != 6) {
            throw InvalidArgument(where + ": expected 6 columns, got " + std::to_string(cols.size()));
        }
        const auto t = static_cast<std::size_t>(detail::parse_count(cols[0], where));
        if (t != table.rows() + 1) {
            throw InvalidArgument(where + ": rounds must be 1, 2, ... in order");
        }
        const auto coords = detail::split(cols[1], ';');
        if (n < 0) {
            n = static_cast<Eigen::Index>(coords.size());
        } else if (static_cast<Eigen::Index>(coords.size()) != n) {
            throw InvalidArgument(where + ": point dimension changed");
        }
        Vector x(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            x(j) = detail::parse_double(coords[static_cast<std::size_t>(j)], where);
        }
        table.t.push_back(t);
        table.x.push_back(std::move(x));
        table.loss.push_back(detail::parse_double(cols[2], where));
        table.loo_calls_cum.push_back(detail::parse_count(cols[3], where));
        table.so_calls_cum.push_back(detail::parse_count(cols[4], where));
        table.block_index.push_back(static_cast<std::size_t>(detail::parse_count(cols[5], where)));
    }
    return table;
}

inline TraceTable read_trace_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidArgument("cannot open trace file " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_trace_csv(buf.str());
}

}  // namespace pfoco

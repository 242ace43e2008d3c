#pragma once
// File formats for sample data.
//
// Facility samples: CSV, one row per demand sample, |V| columns of
// nonnegative reals. Live-edge samples: text blocks, one per sample, headed
// by "# sample <i> / nodes <N>" followed by "u v" lines for active edges.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "drsm/submodular.hpp"

namespace drsm {

namespace detail {

inline void io_require(bool cond, const std::string& path, std::size_t line, const std::string& msg) {
    if (!cond) {
        throw std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
    }
}

inline bool blank(const std::string& s) {
    return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace detail

inline std::vector<FacilitySample> load_facility_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::vector<FacilitySample> samples;
    std::string line;
    std::size_t lineno = 0;
    std::size_t ground = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::blank(line)) continue;
        FacilitySample s;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) {
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                detail::io_require(cell.find_first_not_of(" \t\r", used) == std::string::npos, path,
                                   lineno, "trailing characters in '" + cell + "'");
                detail::io_require(std::isfinite(v) && v >= 0.0, path, lineno,
                                   "rewards must be finite and nonnegative");
                s.rewards.push_back(v);
            } catch (const std::invalid_argument&) {
                detail::io_require(false, path, lineno, "not a number: '" + cell + "'");
            }
        }
        detail::io_require(!s.rewards.empty(), path, lineno, "empty row");
        if (ground == 0) ground = s.rewards.size();
        detail::io_require(s.rewards.size() == ground, path, lineno,
                           "row width differs from previous rows");
        samples.push_back(std::move(s));
    }
    if (samples.empty()) throw std::runtime_error(path + ": no samples");
    return samples;
}

inline void save_facility_csv(const std::string& path, const std::vector<FacilitySample>& samples) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    char buf[64];
    for (const auto& s : samples) {
        for (std::size_t j = 0; j < s.rewards.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", s.rewards[j]);
            out << (j ? "," : "") << buf;
        }
        out << "\n";
    }
}

inline std::vector<LiveEdgeSample> load_live_edges(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::vector<LiveEdgeSample> samples;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::blank(line)) continue;
        if (line[0] == '#') {
            std::size_t index = 0;
            std::size_t nodes = 0;
            const int got = std::sscanf(line.c_str(), "# sample %zu / nodes %zu", &index, &nodes);
            detail::io_require(got == 2, path, lineno, "malformed sample header");
            detail::io_require(index == samples.size(), path, lineno, "sample index out of order");
            detail::io_require(nodes >= 1, path, lineno, "node count must be positive");
            samples.push_back(LiveEdgeSample{nodes, {}});
            continue;
        }
        detail::io_require(!samples.empty(), path, lineno, "edge line before any sample header");
        unsigned long u = 0;
        unsigned long v = 0;
        const int got = std::sscanf(line.c_str(), "%lu %lu", &u, &v);
        detail::io_require(got == 2, path, lineno, "malformed edge line");
        LiveEdgeSample& s = samples.back();
        detail::io_require(u < s.nodes && v < s.nodes, path, lineno, "edge endpoint out of range");
        s.edges.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
    }
    if (samples.empty()) throw std::runtime_error(path + ": no samples");
    return samples;
}

inline void save_live_edges(const std::string& path, const std::vector<LiveEdgeSample>& samples) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out << "# sample " << i << " / nodes " << samples[i].nodes << "\n";
        for (const auto& [u, v] : samples[i].edges) out << u << " " << v << "\n";
    }
}

/// Newline-separated reals (for the oracle and projection commands).
inline numvec load_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    numvec values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::blank(line)) continue;
        try {
            std::size_t used = 0;
            const double v = std::stod(line, &used);
            detail::io_require(line.find_first_not_of(" \t\r", used) == std::string::npos, path,
                               lineno, "trailing characters");
            detail::io_require(std::isfinite(v), path, lineno, "values must be finite");
            values.push_back(v);
        } catch (const std::invalid_argument&) {
            detail::io_require(false, path, lineno, "not a number: '" + line + "'");
        }
    }
    if (values.empty()) throw std::runtime_error(path + ": no values");
    return values;
}

/// Sniffs the sample format: live-edge files start with a '#' header.
inline SampledObjective load_objective(const std::string& path, const std::string& format = "auto",
                                       double declared_bound = std::numeric_limits<double>::quiet_NaN()) {
    std::string kind = format;
    if (kind == "auto") {
        std::ifstream in(path);
        if (!in) throw std::runtime_error(path + ": cannot open");
        std::string line;
        while (std::getline(in, line) && detail::blank(line)) {
        }
        kind = (!line.empty() && line[0] == '#') ? "edges" : "facility";
    }
    if (kind == "facility") return SampledObjective::facility(load_facility_csv(path), declared_bound);
    if (kind == "edges") return SampledObjective::influence(load_live_edges(path));
    throw std::runtime_error("unknown data format '" + format + "'");
}

}  // namespace drsm

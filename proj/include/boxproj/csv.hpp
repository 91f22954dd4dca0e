#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "boxproj/common.hpp"

namespace boxproj {

/// Shortest deterministic round-trip formatting for CSV output.
inline std::string format_numeric(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline bool parse_numeric(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size();
}

}  // namespace detail

/// Reads a single-column CSV: one value per line, '.' decimal, optional
/// single header line. inf / -inf are accepted. Throws ParseError naming the
/// 1-based line on any other malformed content.
inline std::vector<double> read_numeric_column(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'", 0);
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        double x;
        if (!detail::parse_numeric(line, x)) {
            if (line_no == 1) continue;  // header
            throw ParseError("'" + path + "': malformed value at line " + std::to_string(line_no),
                             line_no);
        }
        values.push_back(x);
    }
    return values;
}

inline void write_numeric_column(const std::string& path, std::span<const double> values,
                                 const std::string& header = "") {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing", 0);
    if (!header.empty()) out << header << '\n';
    for (double v : values) out << format_numeric(v) << '\n';
}

}  // namespace boxproj

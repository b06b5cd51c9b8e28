#pragma once

// Small text helpers shared by the spec parsers and CSV writers.

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "qcalc/errors.hpp"

namespace qcalc::text {

/// 12 significant digits, '.' separator.
inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline double parse_number(const std::string& s) {
    if (s.empty()) throw ParseError("empty number");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) {
        throw ParseError("not a number: '" + s + "'");
    }
    return v;
}

/// "head:rest" -> {head, rest}; no colon gives an empty rest.
inline std::pair<std::string, std::string> split_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) return {spec, ""};
    return {spec.substr(0, colon), spec.substr(colon + 1)};
}

inline std::vector<double> parse_numbers(const std::string& csv) {
    std::vector<double> out;
    if (csv.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = csv.find(',', start);
        out.push_back(parse_number(csv.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace qcalc::text

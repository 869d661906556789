#include "args.hpp"

#include <charconv>
#include <cmath>

namespace defence::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_number(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size() || !std::isfinite(v)) {
        throw UsageError("invalid number '" + s + "' for " + what);
    }
    return v;
}

int parse_int(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    int v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
        throw UsageError("invalid integer '" + s + "' for " + what);
    }
    return v;
}

std::vector<double> parse_number_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    for (const auto& tok : split(s, ',')) out.push_back(parse_number(tok, what));
    return out;
}

std::vector<GlobalShift> parse_shift_list(const std::string& s) {
    std::vector<GlobalShift> out;
    for (const auto& pair : split(s, ';')) {
        if (pair.empty()) continue;
        const auto xy = split(pair, ',');
        if (xy.size() != 2) throw UsageError("shift '" + pair + "' is not a dx,dy pair");
        out.push_back({parse_number(xy[0], "shift dx"), parse_number(xy[1], "shift dy")});
    }
    if (out.empty()) throw UsageError("empty shift list");
    return out;
}

}  // namespace defence::cli

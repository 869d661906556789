#pragma once

#include <defence/motion.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace defence::cli {

/// Thrown for malformed command-line values; maps to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep);
double parse_number(const std::string& s, const std::string& what);
int parse_int(const std::string& s, const std::string& what);

/// "1.5,2,3"
std::vector<double> parse_number_list(const std::string& s, const std::string& what);

/// "0,0;-8,-8;8,8"
std::vector<GlobalShift> parse_shift_list(const std::string& s);

}  // namespace defence::cli

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace crossfield::cli {

enum ExitCode : int {
    kSuccess = 0,
    kIoError = 1,
    kUsage = 2,
    kNumerical = 3,
    kInsufficientData = 4,
};

/// Runs one command line. Output files go where --out points; progress and
/// diagnostics go to `log`.
int run(const std::vector<std::string>& args, std::ostream& log);

/// "100T", "100 T" or "100" -> tesla.
double parse_tesla(const std::string& text);
/// "50kV/cm", "5e4V/cm" or "50" (kV/cm) -> kV/cm.
double parse_kv_per_cm(const std::string& text);
/// Comma-separated values and inclusive ranges "a:b:step".
std::vector<double> parse_real_list(const std::string& text);
/// Comma-separated integers and inclusive ranges "a:b" or "a:b:step".
std::vector<int> parse_int_list(const std::string& text);

} // namespace crossfield::cli

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ek::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit status: 0 success, 2 bad parameters or unknown flags, 1 anything else.
int run(int argc, char** argv);
// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "250000", "1e9", "2.5e3" -> exact integer. Forms with a decimal point or
// exponent must be integral and at most 2^53.
std::int64_t parse_scientific_int(const std::string& text);

}  // namespace ek::cli

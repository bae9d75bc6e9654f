#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bwt::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 2;
inline constexpr int kUnreachable = 3;
inline constexpr int kNoSpdMap = 4;
inline constexpr int kNumerical = 5;

// Runs one command. `args` excludes the program name. Reports go to `out` as
// JSON, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bwt::cli

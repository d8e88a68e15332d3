#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ixa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Runs one invocation. `args` excludes the program name. Decisions of the
/// serve subcommand are read from `in` and written to `out`; diagnostics and
/// the effective configuration go to `err`.
int dispatch(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
             std::ostream& err);

int dispatch(int argc, char** argv);

}  // namespace ixa::cli

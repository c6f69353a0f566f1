#pragma once

// Command-line front end. Subcommands: dot, mma, search, emit-smt, compare.
// Exit status is 0 on success, 1 on usage or parse errors, and 2 when a
// search or check finds no discriminating input.

#include <iosfwd>
#include <string>
#include <vector>

namespace tcsem {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNoWitness = 2;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Writes through a temporary file in the same directory, then renames it into place.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace tcsem

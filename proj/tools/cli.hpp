#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lpsvm::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_warning = 2;

// Runs one subcommand. `args` excludes the program name. Human-readable text goes to `out`,
// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lpsvm::cli

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace insitu::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/**
 * The `insitu` command line: scene, run, filter, evolve, metrics, bench,
 * export. `args` excludes the program name. Returns 0 on success, 1 on a
 * domain error and 2 on a usage error (with the usage text on `err`). The
 * resolved configuration is logged to `err` before any work starts.
 */
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace insitu::cli

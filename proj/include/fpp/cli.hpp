// Command-line front end. Exit codes: 0 success, 1 usage error, 2 data error.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fpp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

int run(int argc, char** argv);
/// Same as run(), with explicit arguments (argv[0] excluded) and streams.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fpp::cli

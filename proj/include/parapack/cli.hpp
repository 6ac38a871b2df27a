#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace parapack {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

/// Entry point of the `parapack` tool; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count from PARAPACK_WORKERS, or 0 when unset or invalid.
int default_workers();

}  // namespace parapack

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace atelier::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the atelier binary; args[0] is the program name.
// Subcommands: harvest, ingest, dedup, geocode, stats, serve.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace atelier::cli

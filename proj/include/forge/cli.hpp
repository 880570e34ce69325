#pragma once

#include <iosfwd>
#include <string>

namespace forge {

// Exit codes of the forge tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitBadInput = 1,    // usage error, unreadable file or malformed JSON
  kExitBadMetric = 2,   // development or metric violates the contract
  kExitSolver = 3,      // continuation or embedding failed
  kExitMismatch = 4,    // roundtrip result not congruent to its source
};

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Applies a level name (trace, debug, info, warn, error, off); FORGE_LOG wins when set.
void configure_logging(const std::string& level);

}  // namespace forge

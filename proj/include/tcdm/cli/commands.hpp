#pragma once

#include <iosfwd>

namespace tcdm::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kInput = 2, kInternal = 3 };

/// Entry point of the `tcdm` tool. Writes results to `out` and diagnostics
/// to `err`; returns one of the ExitCode values.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tcdm::cli

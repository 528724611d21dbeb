#pragma once

#include <ostream>

namespace diskcover {

enum ExitCode : int { kExitOk = 0, kExitDomain = 1, kExitUsage = 2 };

/// Entry point behind the `diskcover` binary. Subcommands: fit, render,
/// simplify, eval, ablate, grad-check, gen-suite. Returns 0 on success, 1 on
/// a domain error, 2 on a usage error; diagnostics are single lines on `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err, bool color = false);

}  // namespace diskcover

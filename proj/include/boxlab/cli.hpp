#pragma once

namespace boxlab {

/// Command-line entry point. Subcommands: label, evaluate, sweep, render.
/// Exit codes: 0 success, 1 usage error, 2 data error, 3 degenerate-only
/// results.
int cli(int argc, const char* const* argv);

}  // namespace boxlab

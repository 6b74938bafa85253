#pragma once

namespace promptseg::cli {

// Parses argv and dispatches to a subcommand; returns the exit code.
int run(int argc, const char* const* argv);

}  // namespace promptseg::cli

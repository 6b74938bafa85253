#pragma once

#include <chrono>
#include <string>
#include <vector>

namespace promptseg {

struct ProcessResult {
    int exit_code = -1;      // -1 when killed by a signal or timed out
    bool timed_out = false;
    std::string output;      // stdout and stderr, interleaved
};

// fork/exec with the child in its own process group; on timeout the whole
// group is killed. A zero timeout waits forever. Throws IoError if the
// process cannot be started.
ProcessResult run_process(const std::vector<std::string>& argv, std::chrono::milliseconds timeout);

// POSIX single-quote escaping for /bin/sh.
std::string shell_quote(const std::string& s);

}  // namespace promptseg

#include "promptseg/subprocess.hpp"

#include <cerrno>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "promptseg/error.hpp"

namespace promptseg {

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "'\\''";
        else out += c;
    }
    out += "'";
    return out;
}

ProcessResult run_process(const std::vector<std::string>& argv, std::chrono::milliseconds timeout) {
    if (argv.empty()) throw InvalidArgument("empty command line");

    int fds[2];
    if (pipe(fds) != 0) throw IoError(std::string("pipe: ") + std::strerror(errno));

    std::vector<char*> cargv;
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);

    const pid_t pid = fork();
    if (pid < 0) {
        close(fds[0]);
        close(fds[1]);
        throw IoError(std::string("fork: ") + std::strerror(errno));
    }
    if (pid == 0) {
        setpgid(0, 0);
        dup2(fds[1], STDOUT_FILENO);
        dup2(fds[1], STDERR_FILENO);
        close(fds[0]);
        close(fds[1]);
        execvp(cargv[0], cargv.data());
        _exit(127);
    }
    setpgid(pid, pid);
    close(fds[1]);

    ProcessResult res;
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    bool open = true;
    char buf[4096];
    while (open) {
        int wait_ms = -1;
        if (timeout.count() > 0) {
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                deadline - std::chrono::steady_clock::now());
            if (left.count() <= 0) {
                res.timed_out = true;
                break;
            }
            wait_ms = static_cast<int>(left.count());
        }
        pollfd pfd{fds[0], POLLIN, 0};
        const int rc = poll(&pfd, 1, wait_ms);
        if (rc < 0 && errno == EINTR) continue;
        if (rc == 0) continue;
        const ssize_t n = read(fds[0], buf, sizeof buf);
        if (n > 0) res.output.append(buf, static_cast<std::size_t>(n));
        else if (n == 0 || errno != EINTR) open = false;
    }
    close(fds[0]);

    int status = 0;
    if (!res.timed_out && timeout.count() > 0) {
        // The child may have closed its output and still be running.
        for (;;) {
            const pid_t w = waitpid(pid, &status, WNOHANG);
            if (w == pid) break;
            if (w < 0 && errno != EINTR) break;
            if (std::chrono::steady_clock::now() >= deadline) {
                res.timed_out = true;
                break;
            }
            usleep(5000);
        }
        if (!res.timed_out) {
            if (WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
            return res;
        }
    }
    if (res.timed_out) kill(-pid, SIGKILL);
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    if (!res.timed_out && WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
    return res;
}

}  // namespace promptseg

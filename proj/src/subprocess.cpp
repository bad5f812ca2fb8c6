// Copyright 2026 The SlsBench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "slsbench/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>

#include "slsbench/error.hpp"

extern char** environ;

namespace slsbench {
namespace {

std::int64_t steady_ns() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

class Fd {
public:
    Fd() = default;
    explicit Fd(int fd) : fd_(fd) {}
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    ~Fd() { reset(); }

    int get() const { return fd_; }
    void reset() {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }

private:
    int fd_ = -1;
};

void make_pipe(int fds[2]) {
    if (::pipe2(fds, O_CLOEXEC) != 0) fail(ErrorCode::kIo, std::string("pipe: ") + std::strerror(errno));
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const std::filesystem::path& cwd,
                          const std::map<std::string, std::string>& env, const std::string& stdin_text,
                          std::int64_t timeout_ns) {
    if (argv.empty()) fail(ErrorCode::kInvalidArgument, "empty command");

    int in_pipe[2], out_pipe[2], err_pipe[2];
    make_pipe(in_pipe);
    make_pipe(out_pipe);
    make_pipe(err_pipe);
    Fd in_r(in_pipe[0]), in_w(in_pipe[1]), out_r(out_pipe[0]), out_w(out_pipe[1]), err_r(err_pipe[0]),
        err_w(err_pipe[1]);

    // Build everything the child needs before fork; only async-signal-safe
    // calls happen in the child.
    std::vector<std::string> env_strings;
    for (char** e = environ; *e != nullptr; ++e) {
        std::string kv(*e);
        if (env.count(kv.substr(0, kv.find('='))) == 0) env_strings.push_back(std::move(kv));
    }
    for (const auto& [k, v] : env) env_strings.push_back(k + "=" + v);
    std::vector<char*> envp;
    for (auto& s : env_strings) envp.push_back(s.data());
    envp.push_back(nullptr);
    std::vector<std::string> args = argv;
    std::vector<char*> argp;
    for (auto& s : args) argp.push_back(s.data());
    argp.push_back(nullptr);
    const std::string dir = cwd.string();

    const auto start = steady_ns();
    const pid_t pid = ::fork();
    if (pid < 0) fail(ErrorCode::kIo, std::string("fork: ") + std::strerror(errno));
    if (pid == 0) {
        ::dup2(in_pipe[0], 0);
        ::dup2(out_pipe[1], 1);
        ::dup2(err_pipe[1], 2);
        if (!dir.empty() && ::chdir(dir.c_str()) != 0) _exit(126);
        ::execvpe(argp[0], argp.data(), envp.data());
        _exit(127);
    }
    in_r.reset();
    out_w.reset();
    err_w.reset();

    ProcessResult result;
    std::size_t written = 0;
    if (stdin_text.empty()) in_w.reset();
    ::signal(SIGPIPE, SIG_IGN);

    bool out_open = true, err_open = true;
    char buf[65536];
    while (out_open || err_open || in_w.get() >= 0) {
        int wait_ms = -1;
        if (timeout_ns > 0) {
            const auto left = start + timeout_ns - steady_ns();
            if (left <= 0) {
                result.timed_out = true;
                break;
            }
            wait_ms = static_cast<int>((left + 999'999) / 1'000'000);
        }
        pollfd fds[3];
        nfds_t n = 0;
        if (out_open) fds[n++] = {out_r.get(), POLLIN, 0};
        if (err_open) fds[n++] = {err_r.get(), POLLIN, 0};
        if (in_w.get() >= 0) fds[n++] = {in_w.get(), POLLOUT, 0};
        const int rc = ::poll(fds, n, wait_ms);
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }
        for (nfds_t i = 0; i < n; ++i) {
            if (fds[i].revents == 0) continue;
            if (fds[i].fd == in_w.get()) {
                const auto w = ::write(in_w.get(), stdin_text.data() + written, stdin_text.size() - written);
                if (w > 0) written += static_cast<std::size_t>(w);
                if (w < 0 || written == stdin_text.size()) in_w.reset();
                continue;
            }
            const bool is_out = fds[i].fd == out_r.get();
            const auto r = ::read(fds[i].fd, buf, sizeof buf);
            if (r > 0) {
                (is_out ? result.stdout_text : result.stderr_text).append(buf, static_cast<std::size_t>(r));
            } else if (r == 0 || (r < 0 && errno != EINTR && errno != EAGAIN)) {
                (is_out ? out_open : err_open) = false;
            }
        }
    }
    if (result.timed_out) ::kill(pid, SIGKILL);
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    result.elapsed_ns = steady_ns() - start;
    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.exit_code = 128 + WTERMSIG(status);
    }
    return result;
}

}  // namespace slsbench

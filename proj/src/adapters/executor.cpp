#include "vigil/adapters/executor.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

#include "vigil/core/errors.hpp"

namespace vigil::adapters {

namespace {

using Clock = std::chrono::steady_clock;

struct Pipe {
    int fd[2] = {-1, -1};
    ~Pipe() { close_all(); }
    void close_end(int i) {
        if (fd[i] >= 0) ::close(fd[i]);
        fd[i] = -1;
    }
    void close_all() { close_end(0), close_end(1); }
};

void open_pipe(Pipe& p) {
    if (::pipe2(p.fd, O_CLOEXEC) != 0) throw ExecutorUnavailable(std::string("pipe: ") + std::strerror(errno));
}

std::filesystem::path make_scratch_dir() {
    auto tmpl = (std::filesystem::temp_directory_path() / "vigil-run-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw ExecutorUnavailable(std::string("mkdtemp: ") + std::strerror(errno));
    return tmpl;
}

}  // namespace

RawOutput SubprocessExecutor::run(const std::vector<std::string>& argv, const std::filesystem::path&,
                                  Seconds timeout) {
    if (argv.empty()) throw ExecutorUnavailable("empty command");

    Pipe out, err, status;
    open_pipe(out);
    open_pipe(err);
    open_pipe(status);
    const auto scratch = make_scratch_dir();

    std::vector<char*> cargv;
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);

    const auto start = Clock::now();
    const pid_t pid = ::fork();
    if (pid < 0) {
        std::filesystem::remove_all(scratch);
        throw ExecutorUnavailable(std::string("fork: ") + std::strerror(errno));
    }
    if (pid == 0) {
        ::setpgid(0, 0);
        ::dup2(out.fd[1], STDOUT_FILENO);
        ::dup2(err.fd[1], STDERR_FILENO);
        const int devnull = ::open("/dev/null", O_RDONLY);
        if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
        int e = 0;
        if (::chdir(scratch.c_str()) != 0) e = errno;
        if (!e) {
            ::execvp(cargv[0], cargv.data());
            e = errno;
        }
        [[maybe_unused]] auto n = ::write(status.fd[1], &e, sizeof e);
        ::_exit(127);
    }
    ::setpgid(pid, pid);  // also done in the child; whichever runs first wins
    out.close_end(1);
    err.close_end(1);
    status.close_end(1);

    int exec_errno = 0;
    if (::read(status.fd[0], &exec_errno, sizeof exec_errno) == static_cast<ssize_t>(sizeof exec_errno)) {
        ::waitpid(pid, nullptr, 0);
        std::filesystem::remove_all(scratch);
        throw ExecutorUnavailable("cannot execute '" + argv[0] + "': " + std::strerror(exec_errno));
    }

    RawOutput raw;
    const auto deadline = start + std::chrono::duration_cast<Clock::duration>(timeout);
    pollfd fds[2] = {{out.fd[0], POLLIN, 0}, {err.fd[0], POLLIN, 0}};
    std::string* sinks[2] = {&raw.stdout_text, &raw.stderr_text};
    char buf[65536];
    int open_streams = 2;
    while (open_streams > 0) {
        const auto left = std::chrono::ceil<std::chrono::milliseconds>(deadline - Clock::now()).count();
        if (left <= 0) {
            raw.timed_out = true;
            break;
        }
        const int rc = ::poll(fds, 2, static_cast<int>(std::min<long long>(left, 1000)));
        if (rc < 0 && errno != EINTR) break;
        for (int i = 0; i < 2; ++i) {
            if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
            const auto n = ::read(fds[i].fd, buf, sizeof buf);
            if (n <= 0) {
                fds[i].fd = -1;
                --open_streams;
                continue;
            }
            auto& sink = *sinks[i];
            if (sink.size() < stream_cap_) sink.append(buf, std::min<std::size_t>(n, stream_cap_ - sink.size()));
        }
    }

    int wstatus = 0;
    if (raw.timed_out) {
        ::kill(-pid, SIGKILL);
        ::waitpid(pid, &wstatus, 0);
    } else {
        // Streams closed; the process may still be running if it detached them.
        while (true) {
            const pid_t r = ::waitpid(pid, &wstatus, WNOHANG);
            if (r == pid) break;
            if (Clock::now() >= deadline) {
                raw.timed_out = true;
                ::kill(-pid, SIGKILL);
                ::waitpid(pid, &wstatus, 0);
                break;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
    }
    ::kill(-pid, SIGKILL);  // reap stragglers left in the group
    raw.wall_time = std::chrono::duration_cast<Seconds>(Clock::now() - start);
    if (raw.timed_out) raw.exit_code = -1;
    else if (WIFEXITED(wstatus)) raw.exit_code = WEXITSTATUS(wstatus);
    else if (WIFSIGNALED(wstatus)) raw.exit_code = 128 + WTERMSIG(wstatus);
    std::error_code ec;
    std::filesystem::remove_all(scratch, ec);
    return raw;
}

MockExecutor::MockExecutor(Script fixed) : responder_([fixed](const auto&) { return fixed; }) {}

MockExecutor::MockExecutor(Responder r) : responder_(std::move(r)) {}

RawOutput MockExecutor::run(const std::vector<std::string>& argv, const std::filesystem::path&, Seconds timeout) {
    ++calls_;
    {
        std::lock_guard lock(mu_);
        seen_.push_back(argv);
    }
    if (unavailable_) throw ExecutorUnavailable("mock executor marked unavailable");
    const Script s = responder_ ? responder_(argv) : Script{};
    RawOutput raw;
    const auto start = Clock::now();
    if (s.delay >= timeout) {
        std::this_thread::sleep_for(timeout);
        raw.timed_out = true;
        raw.exit_code = -1;
    } else {
        if (s.delay.count() > 0) std::this_thread::sleep_for(s.delay);
        raw.stdout_text = s.stdout_text;
        raw.stderr_text = s.stderr_text;
        raw.exit_code = s.exit_code;
    }
    raw.wall_time = std::chrono::duration_cast<Seconds>(Clock::now() - start);
    return raw;
}

std::vector<std::vector<std::string>> MockExecutor::seen() const {
    std::lock_guard lock(mu_);
    return seen_;
}

}  // namespace vigil::adapters

#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "vigil/core/time.hpp"

namespace vigil::adapters {

struct RawOutput {
    std::string stdout_text;
    std::string stderr_text;
    int exit_code = 0;
    Seconds wall_time{0.0};
    bool timed_out = false;
};

class Executor {
public:
    virtual ~Executor() = default;
    /// Throws ExecutorUnavailable when the program cannot be started.
    virtual RawOutput run(const std::vector<std::string>& argv, const std::filesystem::path& workdir,
                          Seconds timeout) = 0;
};

/// Runs argv[0] as a child process in its own process group. The child's
/// working directory is a fresh scratch directory; `workdir` is only passed
/// through the argv. On timeout the whole group is killed.
class SubprocessExecutor final : public Executor {
public:
    explicit SubprocessExecutor(std::size_t stream_cap = 8u << 20) : stream_cap_(stream_cap) {}
    RawOutput run(const std::vector<std::string>& argv, const std::filesystem::path& workdir, Seconds timeout) override;

private:
    std::size_t stream_cap_;
};

/// Scriptable stand-in for tests and dry runs.
class MockExecutor final : public Executor {
public:
    struct Script {
        std::string stdout_text;
        std::string stderr_text;
        int exit_code = 0;
        Seconds delay{0.0};  // a delay >= timeout produces a timeout
    };
    using Responder = std::function<Script(const std::vector<std::string>& argv)>;

    MockExecutor() = default;
    explicit MockExecutor(Script fixed);
    explicit MockExecutor(Responder r);

    RawOutput run(const std::vector<std::string>& argv, const std::filesystem::path& workdir, Seconds timeout) override;

    std::size_t calls() const { return calls_.load(); }
    std::vector<std::vector<std::string>> seen() const;
    void set_unavailable(bool v) { unavailable_ = v; }

private:
    Responder responder_;
    std::atomic<std::size_t> calls_{0};
    std::atomic<bool> unavailable_{false};
    mutable std::mutex mu_;
    std::vector<std::vector<std::string>> seen_;
};

}  // namespace vigil::adapters

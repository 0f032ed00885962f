// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <sys/types.h>

#include <chrono>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "targetfill/denoiser.hpp"

namespace targetfill {

struct WorkerOptions {
    std::vector<std::string> argv;
    std::chrono::milliseconds timeout{30000};
};

// Splits a worker command line on whitespace, honouring single and double
// quotes. No other shell syntax is interpreted.
std::vector<std::string> split_command_line(std::string_view command);

// Denoiser hosted in a child process speaking FDN1 over its stdin/stdout.
// One request is in flight at a time; the session belongs to one run.
class ExternalDenoiser final : public Denoiser {
public:
    ExternalDenoiser(const ExternalDenoiser&) = delete;
    ExternalDenoiser& operator=(const ExternalDenoiser&) = delete;
    ~ExternalDenoiser() override;

    Shape shape() const override { return shape_; }
    int timesteps() const override { return timesteps_; }
    pid_t pid() const { return pid_; }

    // Sends SHUTDOWN and reaps the worker. Returns its exit status, or -1 if
    // it had to be killed or did not exit normally. Idempotent.
    int shutdown();

    friend std::unique_ptr<ExternalDenoiser> external_handshake(const WorkerOptions& options,
                                                                const NoiseSchedule& sched, Shape shape);

protected:
    ImageTensor predict(const ImageTensor& x_t, int t) override;

private:
    ExternalDenoiser(pid_t pid, int fd, Shape shape, int timesteps, std::chrono::milliseconds timeout)
        : pid_(pid), fd_(fd), shape_(shape), timesteps_(timesteps), timeout_(timeout) {}

    [[noreturn]] void fail(const std::string& message);
    int reap(std::chrono::milliseconds grace);

    pid_t pid_;
    int fd_;
    Shape shape_;
    int timesteps_;
    std::chrono::milliseconds timeout_;
    int exit_status_ = -1;
    bool closed_ = false;
};

// Spawns the worker and performs HELLO / HELLO_ACK. Throws BackendError when
// the process cannot be started and ProtocolError on any framing violation
// or timeout.
std::unique_ptr<ExternalDenoiser> external_handshake(const WorkerOptions& options, const NoiseSchedule& sched,
                                                     Shape shape);

}  // namespace targetfill

// SPDX-License-Identifier: Apache-2.0

#include "targetfill/external_denoiser.hpp"

#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include "targetfill/errors.hpp"
#include "targetfill/protocol.hpp"

extern char** environ;

namespace targetfill {

std::vector<std::string> split_command_line(std::string_view command) {
    std::vector<std::string> out;
    std::string current;
    bool in_token = false;
    char quote = 0;
    for (char ch : command) {
        if (quote != 0) {
            if (ch == quote) {
                quote = 0;
            } else {
                current += ch;
            }
        } else if (ch == '\'' || ch == '"') {
            quote = ch;
            in_token = true;
        } else if (ch == ' ' || ch == '\t' || ch == '\n') {
            if (in_token) out.push_back(std::move(current));
            current.clear();
            in_token = false;
        } else {
            current += ch;
            in_token = true;
        }
    }
    if (quote != 0) throw std::invalid_argument("unterminated quote in worker command");
    if (in_token) out.push_back(std::move(current));
    return out;
}

std::unique_ptr<ExternalDenoiser> external_handshake(const WorkerOptions& options, const NoiseSchedule& sched,
                                                     Shape shape) {
    if (options.argv.empty()) throw BackendError("empty worker command");

    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
        throw BackendError(std::string("socketpair failed: ") + std::strerror(errno));
    }

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, fds[1], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);

    std::vector<char*> argv;
    for (const auto& a : options.argv) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);

    pid_t pid = 0;
    const int rc = ::posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(fds[1]);
    if (rc != 0) {
        ::close(fds[0]);
        throw BackendError("cannot start worker '" + options.argv[0] + "': " + std::strerror(rc));
    }

    std::unique_ptr<ExternalDenoiser> session(
        new ExternalDenoiser(pid, fds[0], shape, sched.timesteps(), options.timeout));

    fdn1::Hello hello;
    hello.timesteps = static_cast<std::uint32_t>(sched.timesteps());
    hello.channels = static_cast<std::uint32_t>(shape.channels);
    hello.height = static_cast<std::uint32_t>(shape.height);
    hello.width = static_cast<std::uint32_t>(shape.width);
    for (double b : sched.betas()) hello.betas.push_back(static_cast<float>(b));

    try {
        fdn1::write_frame(session->fd_, fdn1::make_hello(hello), options.timeout);
        const auto reply = fdn1::read_frame(session->fd_, options.timeout);
        if (reply.type == fdn1::MessageType::error) {
            session->fail("worker rejected HELLO: "
                          + std::string(reply.payload.begin(), reply.payload.end()));
        }
        if (reply.type != fdn1::MessageType::hello_ack || !reply.payload.empty()) {
            session->fail(std::string("expected empty HELLO_ACK, got ") + fdn1::to_string(reply.type) + " with "
                          + std::to_string(reply.payload.size()) + " payload bytes");
        }
    } catch (const ProtocolError& e) {
        session->reap(std::chrono::milliseconds(200));
        std::string message = std::string("handshake failed: ") + e.what();
        if (session->exit_status_ >= 0) message += " (worker exited with status " + std::to_string(session->exit_status_) + ")";
        throw ProtocolError(message);
    }
    return session;
}

ExternalDenoiser::~ExternalDenoiser() { shutdown(); }

void ExternalDenoiser::fail(const std::string& message) {
    reap(std::chrono::milliseconds(200));
    throw ProtocolError(message);
}

int ExternalDenoiser::reap(std::chrono::milliseconds grace) {
    if (closed_) return exit_status_;
    closed_ = true;
    ::close(fd_);

    const auto deadline = std::chrono::steady_clock::now() + grace;
    int status = 0;
    for (;;) {
        const pid_t rc = ::waitpid(pid_, &status, WNOHANG);
        if (rc == pid_) break;
        if (rc < 0) return exit_status_ = -1;
        if (std::chrono::steady_clock::now() >= deadline) {
            ::kill(pid_, SIGKILL);
            ::waitpid(pid_, &status, 0);
            return exit_status_ = -1;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    exit_status_ = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return exit_status_;
}

int ExternalDenoiser::shutdown() {
    if (closed_) return exit_status_;
    try {
        fdn1::write_frame(fd_, fdn1::make_empty(fdn1::MessageType::shutdown), std::chrono::milliseconds(1000));
    } catch (const ProtocolError&) {
        // worker already gone; reap below
    }
    return reap(std::chrono::milliseconds(2000));
}

ImageTensor ExternalDenoiser::predict(const ImageTensor& x_t, int t) {
    if (closed_) throw BackendError("worker session is closed");
    try {
        fdn1::write_frame(fd_, fdn1::make_eps_request(static_cast<std::uint32_t>(t), x_t.values()), timeout_);
        const auto reply = fdn1::read_frame(fd_, timeout_);
        if (reply.type == fdn1::MessageType::error) {
            fail("worker error: " + std::string(reply.payload.begin(), reply.payload.end()));
        }
        if (reply.type != fdn1::MessageType::eps_response) {
            fail(std::string("expected EPS_RESP, got ") + fdn1::to_string(reply.type));
        }
        auto eps = fdn1::decode_eps_response(reply.payload, shape_.size());
        return ImageTensor(shape_, std::move(eps));
    } catch (const ProtocolError&) {
        reap(std::chrono::milliseconds(200));
        throw;
    }
}

}  // namespace targetfill

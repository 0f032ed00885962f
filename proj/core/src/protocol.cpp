// SPDX-License-Identifier: Apache-2.0

#include "targetfill/protocol.hpp"

#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cstring>

#include "targetfill/errors.hpp"

namespace targetfill::fdn1 {
namespace {

using Clock = std::chrono::steady_clock;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t offset) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[offset + i]) << (8 * i);
    return v;
}

void put_floats(std::vector<std::uint8_t>& out, std::span<const float> values) {
    out.reserve(out.size() + values.size() * 4);
    for (float f : values) put_u32(out, std::bit_cast<std::uint32_t>(f));
}

std::vector<float> get_floats(std::span<const std::uint8_t> in, std::size_t offset, std::size_t count) {
    std::vector<float> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = std::bit_cast<float>(get_u32(in, offset + 4 * i));
    return out;
}

bool known_type(std::uint8_t t) {
    switch (t) {
        case 0x01: case 0x02: case 0x03: case 0x04: case 0x05: case 0x7f: return true;
        default: return false;
    }
}

// Milliseconds left until `deadline`, or -1 for no deadline.
int remaining_ms(const Clock::time_point* deadline) {
    if (deadline == nullptr) return -1;
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(*deadline - Clock::now()).count();
    return static_cast<int>(std::max<long long>(0, left));
}

void wait_ready(int fd, short events, const Clock::time_point* deadline, const char* what) {
    for (;;) {
        pollfd pfd{fd, events, 0};
        const int rc = ::poll(&pfd, 1, remaining_ms(deadline));
        if (rc > 0) return;
        if (rc == 0) throw ProtocolError(std::string("timed out while ") + what);
        if (errno != EINTR) throw ProtocolError(std::string("poll failed while ") + what + ": " + std::strerror(errno));
    }
}

void read_exact(int fd, std::uint8_t* dst, std::size_t n, const Clock::time_point* deadline, const char* what) {
    std::size_t got = 0;
    while (got < n) {
        wait_ready(fd, POLLIN, deadline, what);
        const ssize_t rc = ::read(fd, dst + got, n - got);
        if (rc > 0) {
            got += static_cast<std::size_t>(rc);
        } else if (rc == 0) {
            throw ProtocolError(std::string("peer closed the stream while ") + what + " (" + std::to_string(got)
                                + " of " + std::to_string(n) + " bytes)");
        } else if (errno != EINTR && errno != EAGAIN) {
            throw ProtocolError(std::string("read failed while ") + what + ": " + std::strerror(errno));
        }
    }
}

ssize_t write_some(int fd, const std::uint8_t* src, std::size_t n) {
    const ssize_t rc = ::send(fd, src, n, MSG_NOSIGNAL);
    if (rc < 0 && errno == ENOTSOCK) return ::write(fd, src, n);
    return rc;
}

}  // namespace

const char* to_string(MessageType type) {
    switch (type) {
        case MessageType::hello: return "HELLO";
        case MessageType::hello_ack: return "HELLO_ACK";
        case MessageType::eps_request: return "EPS_REQ";
        case MessageType::eps_response: return "EPS_RESP";
        case MessageType::shutdown: return "SHUTDOWN";
        case MessageType::error: return "ERROR";
    }
    return "UNKNOWN";
}

std::vector<std::uint8_t> encode_frame(const Frame& frame) {
    if (frame.payload.size() > kMaxPayload) throw ProtocolError("payload too large to encode");
    std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
    out.reserve(kHeaderSize + frame.payload.size());
    out.push_back(static_cast<std::uint8_t>(frame.type));
    put_u32(out, static_cast<std::uint32_t>(frame.payload.size()));
    out.insert(out.end(), frame.payload.begin(), frame.payload.end());
    return out;
}

FrameHeader parse_header(std::span<const std::uint8_t> header) {
    if (header.size() != kHeaderSize) throw ProtocolError("frame header must be 9 bytes");
    if (!std::equal(kMagic.begin(), kMagic.end(), header.begin())) {
        std::string got;
        for (int i = 0; i < 4; ++i) {
            const auto c = header[static_cast<std::size_t>(i)];
            got += (c >= 0x20 && c < 0x7f) ? static_cast<char>(c) : '?';
        }
        throw ProtocolError("bad frame magic '" + got + "' (expected 'FDN1'; protocol version mismatch?)");
    }
    if (!known_type(header[4])) throw ProtocolError("unknown message type " + std::to_string(header[4]));
    const std::uint32_t length = get_u32(header, 5);
    if (length > kMaxPayload) throw ProtocolError("payload length " + std::to_string(length) + " exceeds limit");
    return {static_cast<MessageType>(header[4]), length};
}

Frame make_hello(const Hello& hello) {
    if (hello.betas.size() != hello.timesteps) throw ProtocolError("HELLO beta count does not match T");
    Frame f{MessageType::hello, {}};
    put_u32(f.payload, hello.timesteps);
    put_u32(f.payload, hello.channels);
    put_u32(f.payload, hello.height);
    put_u32(f.payload, hello.width);
    put_floats(f.payload, hello.betas);
    return f;
}

Frame make_eps_request(std::uint32_t t, std::span<const float> x) {
    Frame f{MessageType::eps_request, {}};
    put_u32(f.payload, t);
    put_floats(f.payload, x);
    return f;
}

Frame make_eps_response(std::span<const float> eps) {
    Frame f{MessageType::eps_response, {}};
    put_floats(f.payload, eps);
    return f;
}

Frame make_error(const std::string& message) {
    return Frame{MessageType::error, std::vector<std::uint8_t>(message.begin(), message.end())};
}

Frame make_empty(MessageType type) { return Frame{type, {}}; }

Hello decode_hello(std::span<const std::uint8_t> payload) {
    if (payload.size() < 16) throw ProtocolError("HELLO payload shorter than 16 bytes");
    Hello h;
    h.timesteps = get_u32(payload, 0);
    h.channels = get_u32(payload, 4);
    h.height = get_u32(payload, 8);
    h.width = get_u32(payload, 12);
    if (payload.size() != 16 + 4ull * h.timesteps) {
        throw ProtocolError("HELLO payload is " + std::to_string(payload.size()) + " bytes, expected "
                            + std::to_string(16 + 4ull * h.timesteps));
    }
    h.betas = get_floats(payload, 16, h.timesteps);
    return h;
}

EpsRequest decode_eps_request(std::span<const std::uint8_t> payload, std::size_t count) {
    if (payload.size() != 4 + 4 * count) {
        throw ProtocolError("EPS_REQ payload is " + std::to_string(payload.size()) + " bytes, expected "
                            + std::to_string(4 + 4 * count));
    }
    return EpsRequest{get_u32(payload, 0), get_floats(payload, 4, count)};
}

std::vector<float> decode_eps_response(std::span<const std::uint8_t> payload, std::size_t count) {
    if (payload.size() != 4 * count) {
        throw ProtocolError("EPS_RESP payload is " + std::to_string(payload.size()) + " bytes, expected "
                            + std::to_string(4 * count) + " (shape mismatch)");
    }
    return get_floats(payload, 0, count);
}

void write_frame(int fd, const Frame& frame, std::chrono::milliseconds timeout) {
    const auto bytes = encode_frame(frame);
    const auto deadline = Clock::now() + timeout;
    const Clock::time_point* dl = timeout.count() < 0 ? nullptr : &deadline;
    std::size_t sent = 0;
    while (sent < bytes.size()) {
        wait_ready(fd, POLLOUT, dl, "writing a frame");
        const ssize_t rc = write_some(fd, bytes.data() + sent, bytes.size() - sent);
        if (rc >= 0) {
            sent += static_cast<std::size_t>(rc);
        } else if (errno != EINTR && errno != EAGAIN) {
            throw ProtocolError(std::string("write failed: ") + std::strerror(errno));
        }
    }
}

Frame read_frame(int fd, std::chrono::milliseconds timeout) {
    const auto deadline = Clock::now() + timeout;
    const Clock::time_point* dl = timeout.count() < 0 ? nullptr : &deadline;
    std::array<std::uint8_t, kHeaderSize> header{};
    read_exact(fd, header.data(), header.size(), dl, "reading a frame header");
    const auto h = parse_header(header);
    Frame f{h.type, std::vector<std::uint8_t>(h.length)};
    if (h.length > 0) read_exact(fd, f.payload.data(), h.length, dl, "reading a frame payload");
    return f;
}

}  // namespace targetfill::fdn1

// SPDX-License-Identifier: Apache-2.0

#pragma once

// FDN1 framing used between the engine and an external denoiser worker.
// Every frame is: magic "FDN1" | u8 type | u32 payload length | payload,
// little-endian throughout.
//
//   0x01 HELLO       u32 T | u32 C | u32 H | u32 W | T x f32 beta
//   0x02 HELLO_ACK   empty
//   0x03 EPS_REQ     u32 t | C*H*W x f32 x_t
//   0x04 EPS_RESP    C*H*W x f32 eps
//   0x05 SHUTDOWN    empty
//   0x7F ERROR       UTF-8 message

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace targetfill::fdn1 {

inline constexpr std::array<std::uint8_t, 4> kMagic{'F', 'D', 'N', '1'};
inline constexpr std::size_t kHeaderSize = 9;
inline constexpr std::uint32_t kMaxPayload = 256u << 20;

enum class MessageType : std::uint8_t {
    hello = 0x01,
    hello_ack = 0x02,
    eps_request = 0x03,
    eps_response = 0x04,
    shutdown = 0x05,
    error = 0x7f,
};

const char* to_string(MessageType type);

struct Frame {
    MessageType type;
    std::vector<std::uint8_t> payload;
};

struct FrameHeader {
    MessageType type;
    std::uint32_t length;
};

std::vector<std::uint8_t> encode_frame(const Frame& frame);

// Throws ProtocolError on bad magic, unknown type or oversized payload.
FrameHeader parse_header(std::span<const std::uint8_t> header);

struct Hello {
    std::uint32_t timesteps = 0;
    std::uint32_t channels = 0;
    std::uint32_t height = 0;
    std::uint32_t width = 0;
    std::vector<float> betas;
};

struct EpsRequest {
    std::uint32_t timestep = 0;
    std::vector<float> x;
};

Frame make_hello(const Hello& hello);
Frame make_eps_request(std::uint32_t t, std::span<const float> x);
Frame make_eps_response(std::span<const float> eps);
Frame make_error(const std::string& message);
Frame make_empty(MessageType type);

Hello decode_hello(std::span<const std::uint8_t> payload);
// `count` is the expected number of floats (C*H*W from the handshake).
EpsRequest decode_eps_request(std::span<const std::uint8_t> payload, std::size_t count);
std::vector<float> decode_eps_response(std::span<const std::uint8_t> payload, std::size_t count);

// Blocking frame I/O on a file descriptor. A negative timeout waits forever.
// Reads throw ProtocolError on EOF, timeout or malformed header.
void write_frame(int fd, const Frame& frame, std::chrono::milliseconds timeout);
Frame read_frame(int fd, std::chrono::milliseconds timeout);

}  // namespace targetfill::fdn1

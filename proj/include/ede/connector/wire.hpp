#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace ede::connector {

/// Largest accepted frame payload.
inline constexpr std::size_t kMaxFrameSize = 64u << 20;

/// Writes a 4-byte big-endian length followed by the payload. Throws Error.
void write_frame(int fd, std::string_view payload);

/// Nullopt on a clean end of stream before a header. Throws Error on a
/// truncated frame, an oversize length or a socket error.
std::optional<std::string> read_frame(int fd, std::size_t max_size = kMaxFrameSize);

/// "host:port" -> (host, port). Throws ValidationError.
std::pair<std::string, std::uint16_t> split_endpoint(std::string_view endpoint);

/// Connected TCP socket; throws Error naming the endpoint on failure.
int connect_to(std::string_view endpoint, int timeout_ms);

}  // namespace ede::connector

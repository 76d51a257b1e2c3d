#include "ede/connector/wire.hpp"

#include "ede/error.hpp"

#include <cerrno>
#include <charconv>
#include <cstring>

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

namespace ede::connector {

namespace {

void send_all(int fd, const char* data, std::size_t size) {
    while (size > 0) {
        ssize_t n = ::send(fd, data, size, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw Error(std::string("send failed: ") + std::strerror(errno));
        }
        data += n;
        size -= static_cast<std::size_t>(n);
    }
}

// Returns bytes read; less than `size` only at end of stream.
std::size_t recv_all(int fd, char* data, std::size_t size) {
    std::size_t got = 0;
    while (got < size) {
        ssize_t n = ::recv(fd, data + got, size - got, 0);
        if (n == 0) break;
        if (n < 0) {
            if (errno == EINTR) continue;
            if (errno == EAGAIN || errno == EWOULDBLOCK) throw Error("receive timed out");
            throw Error(std::string("receive failed: ") + std::strerror(errno));
        }
        got += static_cast<std::size_t>(n);
    }
    return got;
}

}  // namespace

void write_frame(int fd, std::string_view payload) {
    if (payload.size() > kMaxFrameSize) throw Error("frame too large");
    auto n = static_cast<std::uint32_t>(payload.size());
    unsigned char header[4] = {static_cast<unsigned char>(n >> 24), static_cast<unsigned char>(n >> 16),
                               static_cast<unsigned char>(n >> 8), static_cast<unsigned char>(n)};
    send_all(fd, reinterpret_cast<const char*>(header), 4);
    send_all(fd, payload.data(), payload.size());
}

std::optional<std::string> read_frame(int fd, std::size_t max_size) {
    unsigned char header[4];
    auto got = recv_all(fd, reinterpret_cast<char*>(header), 4);
    if (got == 0) return std::nullopt;
    if (got < 4) throw Error("truncated frame header");
    std::uint32_t n = (std::uint32_t(header[0]) << 24) | (std::uint32_t(header[1]) << 16) |
                      (std::uint32_t(header[2]) << 8) | std::uint32_t(header[3]);
    if (n > max_size) throw Error("frame of " + std::to_string(n) + " bytes exceeds the limit");
    std::string payload(n, '\0');
    if (recv_all(fd, payload.data(), n) < n) throw Error("truncated frame payload");
    return payload;
}

std::pair<std::string, std::uint16_t> split_endpoint(std::string_view endpoint) {
    auto colon = endpoint.rfind(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == endpoint.size()) {
        throw ValidationError("endpoint '" + std::string(endpoint) + "' is not host:port");
    }
    unsigned port = 0;
    auto digits = endpoint.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || port > 65535) {
        throw ValidationError("endpoint '" + std::string(endpoint) + "' has an invalid port");
    }
    return {std::string(endpoint.substr(0, colon)), static_cast<std::uint16_t>(port)};
}

int connect_to(std::string_view endpoint, int timeout_ms) {
    auto [host, port] = split_endpoint(endpoint);
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* found = nullptr;
    auto service = std::to_string(port);
    if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &found); rc != 0) {
        throw Error("cannot resolve " + std::string(endpoint) + ": " + ::gai_strerror(rc));
    }
    std::string last_error = "no address";
    int fd = -1;
    for (addrinfo* ai = found; ai != nullptr; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        timeval tv{timeout_ms / 1000, (timeout_ms % 1000) * 1000};
        ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
        ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
        last_error = std::strerror(errno);
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(found);
    if (fd < 0) throw Error("cannot connect to " + std::string(endpoint) + ": " + last_error);
    return fd;
}

}  // namespace ede::connector

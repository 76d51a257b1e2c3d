#include "ede/connector/server.hpp"

#include "ede/connector/wire.hpp"
#include "ede/error.hpp"

#include <cerrno>
#include <cstring>

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

namespace ede::connector {

Server::Server(Node& node, std::string listen) : node_(node) {
    auto [host, port] = split_endpoint(listen);
    host_ = host;
    requested_port_ = port;
}

Server::~Server() { stop(); }

void Server::start() {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo* found = nullptr;
    auto service = std::to_string(requested_port_);
    if (int rc = ::getaddrinfo(host_.c_str(), service.c_str(), &hints, &found); rc != 0) {
        throw Error("cannot resolve listen address " + host_ + ": " + ::gai_strerror(rc));
    }
    int fd = ::socket(found->ai_family, found->ai_socktype, found->ai_protocol);
    if (fd < 0) {
        ::freeaddrinfo(found);
        throw Error(std::string("socket: ") + std::strerror(errno));
    }
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd, found->ai_addr, found->ai_addrlen) != 0 || ::listen(fd, 128) != 0) {
        int err = errno;
        ::freeaddrinfo(found);
        ::close(fd);
        throw Error("cannot listen on " + host_ + ":" + service + ": " + std::strerror(err));
    }
    ::freeaddrinfo(found);
    sockaddr_in bound{};
    socklen_t len = sizeof bound;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);
    listen_fd_ = fd;
    running_ = true;
    node_.set_endpoint(endpoint());
    acceptor_ = std::thread([this] { accept_loop(); });
}

std::string Server::endpoint() const { return host_ + ":" + std::to_string(port_); }

void Server::accept_loop() {
    while (running_) {
        int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR || errno == ECONNABORTED) continue;
            break;
        }
        std::lock_guard lock(mutex_);
        if (!running_) {
            ::close(fd);
            break;
        }
        reap(false);
        auto& c = connections_.emplace_back();
        c.fd = fd;
        c.thread = std::thread([this, &c] { serve(c); });
    }
}

void Server::serve(Connection& connection) {
    try {
        while (auto payload = read_frame(connection.fd)) {
            auto response = node_.handle_payload(*payload);
            if (!response) break;
            write_frame(connection.fd, *response);
        }
    } catch (const std::exception&) {
        // Broken or hostile peer: drop the connection.
    }
    ::shutdown(connection.fd, SHUT_RDWR);
    connection.done = true;
}

void Server::reap(bool all) {
    for (auto it = connections_.begin(); it != connections_.end();) {
        if (all || it->done) {
            if (all) ::shutdown(it->fd, SHUT_RDWR);
            it->thread.join();
            ::close(it->fd);
            it = connections_.erase(it);
        } else {
            ++it;
        }
    }
}

void Server::stop() {
    bool was_running = running_.exchange(false);
    if (listen_fd_ >= 0) ::shutdown(listen_fd_, SHUT_RDWR);
    if (acceptor_.joinable()) acceptor_.join();
    if (listen_fd_ >= 0) ::close(listen_fd_);
    listen_fd_ = -1;
    {
        std::lock_guard lock(mutex_);
        reap(true);
    }
    if (was_running) stopped_.notify_all();
}

void Server::wait() {
    std::unique_lock lock(mutex_);
    stopped_.wait(lock, [this] { return !running_; });
}

}  // namespace ede::connector

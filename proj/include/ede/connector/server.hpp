#pragma once

#include "ede/connector/node.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

namespace ede::connector {

/// Serves a node over the framed TCP protocol, one thread per connection.
/// A connection may carry any number of request/response exchanges.
class Server {
public:
    /// `listen` is "host:port"; port 0 picks a free port.
    Server(Node& node, std::string listen);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds and starts accepting. Throws Error on bind failure.
    void start();
    /// Closes the listener and all connections and joins their threads.
    void stop();
    /// Blocks until stop() is called from another thread.
    void wait();

    std::uint16_t port() const noexcept { return port_; }
    std::string endpoint() const;

private:
    struct Connection {
        int fd;
        std::thread thread;
        std::atomic<bool> done{false};
    };

    void accept_loop();
    void serve(Connection& connection);
    void reap(bool all);

    Node& node_;
    std::string host_;
    std::uint16_t requested_port_;
    std::uint16_t port_ = 0;
    int listen_fd_ = -1;
    std::thread acceptor_;
    std::atomic<bool> running_{false};
    std::mutex mutex_;
    std::condition_variable stopped_;
    std::list<Connection> connections_;
};

}  // namespace ede::connector

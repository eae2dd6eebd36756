#pragma once

#include <cstdint>
#include <memory>

#include "ocular/service/session.hpp"

namespace ocular::service {

inline constexpr std::uint16_t kDefaultPort = 8601;

/// WebSocket front end: one thread and one Session per connection.
class Server {
public:
    /// Binds immediately; port 0 picks an ephemeral port.
    Server(std::uint16_t port, SessionState initial);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    std::uint16_t port() const;
    /// Blocks until stop() is called, or until SIGINT/SIGTERM when
    /// `stop_on_signals` is set.
    void run(bool stop_on_signals = false);
    /// Safe to call from any thread; closes live connections.
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace ocular::service

#include "ocular/service/server.hpp"

#include <list>
#include <mutex>
#include <thread>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace ocular::service {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

constexpr std::size_t kMaxMessageBytes = 1 << 20;

void serve_connection(std::shared_ptr<tcp::socket> socket, SessionState initial) {
    Session session(std::move(initial));
    try {
        websocket::stream<tcp::socket&> ws(*socket);
        ws.read_message_max(kMaxMessageBytes);
        ws.accept();
        beast::flat_buffer buffer;
        for (;;) {
            ws.read(buffer);
            const std::string request = beast::buffers_to_string(buffer.data());
            buffer.consume(buffer.size());
            const std::string reply = session.handle_text(request);
            ws.text(true);
            ws.write(asio::buffer(reply));
        }
    } catch (const std::exception&) {
        // Closed by the peer or by stop().
    }
}

}  // namespace

struct Server::Impl {
    asio::io_context ioc;
    tcp::acceptor acceptor;
    SessionState initial;
    std::mutex mutex;
    bool stopped = false;
    std::list<std::pair<std::shared_ptr<tcp::socket>, std::thread>> connections;

    Impl(std::uint16_t port, SessionState state)
        : acceptor(ioc, tcp::endpoint(asio::ip::address_v4::any(), port)), initial(std::move(state)) {}

    void accept_next() {
        acceptor.async_accept([this](boost::system::error_code ec, tcp::socket socket) {
            if (ec) return;
            auto shared = std::make_shared<tcp::socket>(std::move(socket));
            {
                std::lock_guard lock(mutex);
                if (stopped) return;
                connections.emplace_back(shared, std::thread(serve_connection, shared, initial));
            }
            accept_next();
        });
    }
};

Server::Server(std::uint16_t port, SessionState initial) : impl_(std::make_unique<Impl>(port, std::move(initial))) {}

Server::~Server() { stop(); }

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run(bool stop_on_signals) {
    asio::signal_set signals(impl_->ioc);
    if (stop_on_signals) {
        signals.add(SIGINT);
        signals.add(SIGTERM);
        signals.async_wait([this](boost::system::error_code ec, int) {
            if (!ec) stop();
        });
    }
    impl_->accept_next();
    impl_->ioc.run();
}

void Server::stop() {
    std::list<std::pair<std::shared_ptr<tcp::socket>, std::thread>> live;
    {
        std::lock_guard lock(impl_->mutex);
        if (impl_->stopped) return;
        impl_->stopped = true;
        live.swap(impl_->connections);
    }
    asio::post(impl_->ioc, [this] {
        boost::system::error_code ignored;
        impl_->acceptor.close(ignored);
    });
    impl_->ioc.stop();
    for (auto& [socket, thread] : live) {
        boost::system::error_code ignored;
        socket->shutdown(tcp::socket::shutdown_both, ignored);
        thread.join();
    }
}

}  // namespace ocular::service

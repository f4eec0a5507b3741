#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>

namespace evok::net {

namespace asio = boost::asio;

class WsSession;

/// WebSocket endpoint for dashboard clients. Plain HTTP GETs on the same port
/// are answered from `static_dir` when one is configured.
class UiBridge {
public:
    /// Returns the message sent to a client right after the handshake.
    using SnapshotFn = std::function<std::string()>;
    /// Handles one inbound text message; a returned string is sent back to
    /// that client only.
    using CommandFn = std::function<std::optional<std::string>(const std::string&)>;

    UiBridge(asio::io_context& ioc, const asio::ip::tcp::endpoint& listen, SnapshotFn snapshot, CommandFn on_command,
             std::optional<std::filesystem::path> static_dir = std::nullopt);
    ~UiBridge();

    void start();
    void stop();
    void broadcast(const std::string& message);

    std::uint16_t port() const { return acceptor_.local_endpoint().port(); }
    std::size_t client_count();

private:
    friend class WsSession;
    friend class HttpSession;

    void do_accept();

    asio::io_context& ioc_;
    asio::ip::tcp::acceptor acceptor_;
    SnapshotFn snapshot_;
    CommandFn on_command_;
    std::optional<std::filesystem::path> static_dir_;
    std::vector<std::weak_ptr<WsSession>> sessions_;
    std::shared_ptr<bool> alive_;
};

}  // namespace evok::net

#include "evok/net/ui_bridge.hpp"

#include <deque>
#include <fstream>
#include <sstream>

#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

namespace evok::net {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

std::string_view mime_type(const std::filesystem::path& p) {
    const auto ext = p.extension().string();
    if (ext == ".html" || ext == ".htm") return "text/html";
    if (ext == ".js" || ext == ".mjs") return "application/javascript";
    if (ext == ".css") return "text/css";
    if (ext == ".json") return "application/json";
    if (ext == ".svg") return "image/svg+xml";
    if (ext == ".png") return "image/png";
    if (ext == ".wav") return "audio/wav";
    return "application/octet-stream";
}

/// Maps a request target onto a file below `root`; empty when it escapes.
std::optional<std::filesystem::path> resolve_static(const std::filesystem::path& root, std::string_view target) {
    std::string path(target.substr(0, target.find('?')));
    if (path.empty() || path.back() == '/') path += "index.html";
    if (path.find("..") != std::string::npos) return std::nullopt;
    return root / std::filesystem::path(path).relative_path();
}

}  // namespace

class WsSession : public std::enable_shared_from_this<WsSession> {
public:
    WsSession(tcp::socket socket, UiBridge& bridge, std::weak_ptr<bool> alive)
        : ws_(std::move(socket)), bridge_(bridge), alive_(std::move(alive)) {}

    void run(http::request<http::string_body> req) {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
    }

    void send(std::string message) {
        outbox_.push_back(std::move(message));
        if (outbox_.size() == 1) do_write();
    }

    void close() {
        beast::error_code ec;
        beast::get_lowest_layer(ws_).socket().close(ec);
    }

private:
    void on_accept(beast::error_code ec) {
        if (ec || alive_.expired()) return;
        bridge_.sessions_.push_back(weak_from_this());
        send(bridge_.snapshot_());
        do_read();
    }

    void do_read() {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
    }

    void on_read(beast::error_code ec) {
        if (ec || alive_.expired()) return;
        std::string text = beast::buffers_to_string(buffer_.data());
        buffer_.consume(buffer_.size());
        if (auto reply = bridge_.on_command_(text)) send(std::move(*reply));
        do_read();
    }

    void do_write() {
        ws_.text(true);
        ws_.async_write(asio::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) return;
            self->outbox_.pop_front();
            if (!self->outbox_.empty()) self->do_write();
        });
    }

    websocket::stream<beast::tcp_stream> ws_;
    beast::flat_buffer buffer_;
    std::deque<std::string> outbox_;
    UiBridge& bridge_;
    std::weak_ptr<bool> alive_;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
public:
    HttpSession(tcp::socket socket, UiBridge& bridge, std::weak_ptr<bool> alive)
        : stream_(std::move(socket)), bridge_(bridge), alive_(std::move(alive)) {}

    void run() {
        stream_.expires_after(std::chrono::seconds(30));
        http::async_read(stream_, buffer_, req_,
                         [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
    }

private:
    void on_read(beast::error_code ec) {
        if (ec || alive_.expired()) return;
        if (websocket::is_upgrade(req_)) {
            stream_.expires_never();
            std::make_shared<WsSession>(stream_.release_socket(), bridge_, alive_)->run(std::move(req_));
            return;
        }
        respond();
    }

    void respond() {
        auto res = std::make_shared<http::response<http::string_body>>();
        res->version(req_.version());
        res->keep_alive(false);
        res->set(http::field::server, "evok-receiver");

        std::optional<std::filesystem::path> file;
        if (bridge_.static_dir_ && req_.method() == http::verb::get) {
            const auto target = req_.target();
            file = resolve_static(*bridge_.static_dir_, std::string_view(target.data(), target.size()));
        }
        std::ifstream in;
        if (file) in.open(*file, std::ios::binary);
        if (in.is_open() && in) {
            std::ostringstream body;
            body << in.rdbuf();
            res->result(http::status::ok);
            res->set(http::field::content_type, std::string(mime_type(*file)));
            res->body() = body.str();
        } else {
            res->result(http::status::not_found);
            res->set(http::field::content_type, "text/plain");
            res->body() = "evok receiver: connect with a WebSocket client\n";
        }
        res->prepare_payload();
        http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
            beast::error_code ignored;
            self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        });
    }

    beast::tcp_stream stream_;
    beast::flat_buffer buffer_;
    http::request<http::string_body> req_;
    UiBridge& bridge_;
    std::weak_ptr<bool> alive_;
};

UiBridge::UiBridge(asio::io_context& ioc, const tcp::endpoint& listen, SnapshotFn snapshot, CommandFn on_command,
                   std::optional<std::filesystem::path> static_dir)
    : ioc_(ioc),
      acceptor_(ioc),
      snapshot_(std::move(snapshot)),
      on_command_(std::move(on_command)),
      static_dir_(std::move(static_dir)),
      alive_(std::make_shared<bool>(true)) {
    acceptor_.open(listen.protocol());
    acceptor_.set_option(asio::socket_base::reuse_address(true));
    acceptor_.bind(listen);
    acceptor_.listen();
}

UiBridge::~UiBridge() { stop(); }

void UiBridge::start() { do_accept(); }

void UiBridge::stop() {
    beast::error_code ec;
    acceptor_.close(ec);
    for (auto& weak : sessions_) {
        if (auto s = weak.lock()) s->close();
    }
    sessions_.clear();
}

void UiBridge::broadcast(const std::string& message) {
    std::erase_if(sessions_, [](const auto& w) { return w.expired(); });
    for (auto& weak : sessions_) {
        if (auto s = weak.lock()) s->send(message);
    }
}

std::size_t UiBridge::client_count() {
    std::erase_if(sessions_, [](const auto& w) { return w.expired(); });
    return sessions_.size();
}

void UiBridge::do_accept() {
    acceptor_.async_accept([this, alive = std::weak_ptr<bool>(alive_)](beast::error_code ec, tcp::socket socket) {
        if (alive.expired() || !acceptor_.is_open()) return;
        if (ec) {
            spdlog::warn("ui accept failed: {}", ec.message());
        } else {
            std::make_shared<HttpSession>(std::move(socket), *this, alive)->run();
        }
        do_accept();
    });
}

}  // namespace evok::net

#include "evok/net/udp.hpp"

#include <boost/asio/buffer.hpp>
#include <fmt/format.h>

namespace evok::net {

std::pair<std::string, std::string> split_host_port(std::string_view text) {
    std::string_view host, port;
    if (!text.empty() && text.front() == '[') {
        const auto close = text.find(']');
        if (close == std::string_view::npos || close + 1 >= text.size() || text[close + 1] != ':') {
            throw TransportError(fmt::format("malformed address '{}'", text));
        }
        host = text.substr(1, close - 1);
        port = text.substr(close + 2);
    } else {
        const auto colon = text.rfind(':');
        if (colon == std::string_view::npos) throw TransportError(fmt::format("address '{}' lacks a port", text));
        host = text.substr(0, colon);
        port = text.substr(colon + 1);
    }
    if (host.empty() || port.empty()) throw TransportError(fmt::format("malformed address '{}'", text));
    return {std::string(host), std::string(port)};
}

asio::ip::udp::endpoint resolve_udp(asio::io_context& ioc, std::string_view host_port) {
    auto [host, port] = split_host_port(host_port);
    asio::ip::udp::resolver resolver(ioc);
    boost::system::error_code ec;
    auto results = resolver.resolve(host, port, ec);
    if (ec || results.empty()) {
        throw TransportError(fmt::format("cannot resolve '{}': {}", host_port, ec ? ec.message() : "no results"));
    }
    return results.begin()->endpoint();
}

asio::ip::tcp::endpoint resolve_tcp(asio::io_context& ioc, std::string_view host_port) {
    auto [host, port] = split_host_port(host_port);
    asio::ip::tcp::resolver resolver(ioc);
    boost::system::error_code ec;
    auto results = resolver.resolve(host, port, ec);
    if (ec || results.empty()) {
        throw TransportError(fmt::format("cannot resolve '{}': {}", host_port, ec ? ec.message() : "no results"));
    }
    return results.begin()->endpoint();
}

UdpSink::UdpSink(asio::io_context& ioc, std::string_view destination)
    : dest_(resolve_udp(ioc, destination)), socket_(ioc) {
    boost::system::error_code ec;
    socket_.open(dest_.protocol(), ec);
    if (ec) throw TransportError(fmt::format("cannot open UDP socket: {}", ec.message()));
}

void UdpSink::send(std::span<const std::uint8_t> datagram) {
    boost::system::error_code ec;
    socket_.send_to(asio::buffer(datagram.data(), datagram.size()), dest_, 0, ec);
    // An unreachable receiver is not fatal for a broadcast-style link.
    if (ec && ec != asio::error::connection_refused) {
        throw TransportError(fmt::format("send to {} failed: {}", dest_.address().to_string(), ec.message()));
    }
}

}  // namespace evok::net

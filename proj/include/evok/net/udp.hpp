#pragma once

#include <string>
#include <string_view>

#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/ip/udp.hpp>

#include "evok/sender.hpp"

namespace evok::net {

namespace asio = boost::asio;

/// Splits "host:port" (IPv6 hosts in brackets). Throws TransportError.
std::pair<std::string, std::string> split_host_port(std::string_view text);

/// Resolves "host:port" to the first UDP endpoint. Throws TransportError.
asio::ip::udp::endpoint resolve_udp(asio::io_context& ioc, std::string_view host_port);
asio::ip::tcp::endpoint resolve_tcp(asio::io_context& ioc, std::string_view host_port);

/// Blocking UDP datagram sink bound to one destination.
class UdpSink final : public DatagramSink {
public:
    /// Throws TransportError when the destination cannot be resolved.
    UdpSink(asio::io_context& ioc, std::string_view destination);

    void send(std::span<const std::uint8_t> datagram) override;

    const asio::ip::udp::endpoint& destination() const noexcept { return dest_; }

private:
    asio::ip::udp::endpoint dest_;
    asio::ip::udp::socket socket_;
};

}  // namespace evok::net

#pragma once

#include <array>
#include <cstdint>

#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/udp.hpp>
#include <boost/asio/steady_timer.hpp>

#include "evok/clock.hpp"
#include "evok/link_sim.hpp"

namespace evok::net {

namespace asio = boost::asio;

class BindError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ProxyStats {
    std::uint64_t received = 0;
    std::uint64_t dropped = 0;
    std::uint64_t duplicated = 0;
    std::uint64_t forwarded = 0;
};

/// UDP impairment proxy: ImpairmentModel decisions plus two sockets and a
/// timer draining a DelayQueue. Runs on the caller's io_context.
class ImpairmentProxy {
public:
    /// Throws BindError when `listen` cannot be bound.
    ImpairmentProxy(asio::io_context& ioc, const asio::ip::udp::endpoint& listen,
                    const asio::ip::udp::endpoint& forward_to, link::LinkImpairment imp, const Clock& clock);

    void start();
    void stop();

    asio::ip::udp::endpoint local_endpoint() const { return in_.local_endpoint(); }
    const ProxyStats& stats() const noexcept { return stats_; }

private:
    void do_receive();
    void arm_timer();
    void flush_due();

    const Clock& clock_;
    asio::ip::udp::socket in_;
    asio::ip::udp::socket out_;
    asio::ip::udp::endpoint forward_to_;
    asio::ip::udp::endpoint sender_;
    asio::steady_timer timer_;
    link::ImpairmentModel model_;
    link::DelayQueue queue_;
    std::array<std::uint8_t, 2048> buffer_{};
    std::size_t index_ = 0;
    ProxyStats stats_;
};

}  // namespace evok::net

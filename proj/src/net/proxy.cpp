#include "evok/net/proxy.hpp"

#include <boost/asio/buffer.hpp>
#include <fmt/format.h>

namespace evok::net {

ImpairmentProxy::ImpairmentProxy(asio::io_context& ioc, const asio::ip::udp::endpoint& listen,
                                 const asio::ip::udp::endpoint& forward_to, link::LinkImpairment imp,
                                 const Clock& clock)
    : clock_(clock), in_(ioc), out_(ioc), forward_to_(forward_to), timer_(ioc), model_(imp) {
    boost::system::error_code ec;
    in_.open(listen.protocol(), ec);
    if (!ec) in_.bind(listen, ec);
    if (ec) throw BindError(fmt::format("cannot bind {}:{}: {}", listen.address().to_string(), listen.port(), ec.message()));
    out_.open(forward_to.protocol(), ec);
    if (ec) throw BindError(fmt::format("cannot open forwarding socket: {}", ec.message()));
}

void ImpairmentProxy::start() { do_receive(); }

void ImpairmentProxy::stop() {
    boost::system::error_code ec;
    in_.close(ec);
    timer_.cancel();
}

void ImpairmentProxy::do_receive() {
    in_.async_receive_from(asio::buffer(buffer_), sender_, [this](boost::system::error_code ec, std::size_t n) {
        if (ec == asio::error::operation_aborted || !in_.is_open()) return;
        if (!ec) {
            ++stats_.received;
            const link::Decision d = model_.next();
            const std::int64_t now = clock_.now_ms();
            const std::size_t idx = index_++;
            if (d.dropped) {
                ++stats_.dropped;
            } else {
                std::vector<std::uint8_t> bytes(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(n));
                queue_.push({now + d.delay_ms, idx, false, bytes});
                if (d.duplicated) {
                    ++stats_.duplicated;
                    queue_.push({now + d.dup_delay_ms, idx, true, std::move(bytes)});
                }
                flush_due();
            }
        }
        do_receive();
    });
}

void ImpairmentProxy::flush_due() {
    const std::int64_t now = clock_.now_ms();
    while (!queue_.empty() && queue_.next_time() <= now) {
        const link::Delivery d = queue_.pop();
        boost::system::error_code ec;
        out_.send_to(asio::buffer(d.bytes), forward_to_, 0, ec);
        if (!ec) ++stats_.forwarded;
    }
    arm_timer();
}

void ImpairmentProxy::arm_timer() {
    if (queue_.empty()) return;
    const std::int64_t wait = std::max<std::int64_t>(0, queue_.next_time() - clock_.now_ms());
    timer_.expires_after(std::chrono::milliseconds(wait));
    timer_.async_wait([this](boost::system::error_code ec) {
        if (ec == asio::error::operation_aborted) return;
        flush_due();
    });
}

}  // namespace evok::net

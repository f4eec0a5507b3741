#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>

#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/udp.hpp>
#include <boost/asio/steady_timer.hpp>

#include "evok/clock.hpp"
#include "evok/net/ui_bridge.hpp"
#include "evok/receiver.hpp"

namespace evok::net {

struct ReceiverServiceConfig {
    asio::ip::udp::endpoint listen;
    receiver::ReceiverConfig machine{};
    receiver::NormalRange range{};
    std::optional<asio::ip::tcp::endpoint> ui;
    std::optional<std::filesystem::path> ui_dir;
    std::optional<std::filesystem::path> log_path;
    std::int64_t tick_ms = 100;
    std::int64_t heartbeat_ms = 1000;
};

/// Receiver daemon: every input (datagrams, timer ticks, dashboard commands)
/// is turned into a receiver::Event on one io_context thread, so the state
/// machine sees a single totally ordered stream.
class ReceiverService {
public:
    /// `headless` receives one line per state push when non-null.
    /// Throws BindError (see proxy.hpp) or std::runtime_error for an unwritable log.
    ReceiverService(asio::io_context& ioc, ReceiverServiceConfig config, const Clock& clock,
                    std::ostream* headless = nullptr);
    ~ReceiverService();

    void start();
    void stop();

    receiver::StepResult dispatch(const receiver::Event& event);
    std::optional<std::string> handle_command(const std::string& text);

    const receiver::ReceiverState& state() const noexcept { return state_; }
    std::uint16_t udp_port() const { return socket_.local_endpoint().port(); }
    std::optional<std::uint16_t> ui_port() const;
    std::uint64_t rejected_datagrams() const noexcept { return rejected_; }

private:
    void do_receive();
    void arm_tick();
    void push_state(std::int64_t now_ms);

    ReceiverServiceConfig config_;
    const Clock& clock_;
    std::ostream* headless_;
    asio::ip::udp::socket socket_;
    asio::ip::udp::endpoint peer_;
    asio::steady_timer tick_timer_;
    std::array<std::uint8_t, 512> buffer_{};
    std::unique_ptr<UiBridge> bridge_;
    std::ofstream log_;
    receiver::ReceiverState state_;
    std::optional<std::int64_t> last_push_ms_;
    std::uint64_t rejected_ = 0;
};

}  // namespace evok::net

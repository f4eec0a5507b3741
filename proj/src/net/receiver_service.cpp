#include "evok/net/receiver_service.hpp"

#include <boost/asio/buffer.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "evok/net/proxy.hpp"
#include "evok/protocol.hpp"
#include "evok/ui_messages.hpp"

namespace evok::net {

using namespace evok::receiver;

ReceiverService::ReceiverService(asio::io_context& ioc, ReceiverServiceConfig config, const Clock& clock,
                                 std::ostream* headless)
    : config_(std::move(config)), clock_(clock), headless_(headless), socket_(ioc), tick_timer_(ioc) {
    if (!config_.range.valid()) throw std::invalid_argument("invalid normal range");
    state_.range = config_.range;

    boost::system::error_code ec;
    socket_.open(config_.listen.protocol(), ec);
    if (!ec) socket_.bind(config_.listen, ec);
    if (ec) {
        throw BindError(fmt::format("cannot bind {}:{}: {}", config_.listen.address().to_string(),
                                    config_.listen.port(), ec.message()));
    }
    if (config_.log_path) {
        log_.open(*config_.log_path, std::ios::out | std::ios::trunc);
        if (!log_) throw std::runtime_error(fmt::format("cannot open log '{}'", config_.log_path->string()));
    }
    if (config_.ui) {
        try {
            bridge_ = std::make_unique<UiBridge>(
                ioc, *config_.ui, [this] { return ui::state_message(state_, clock_.now_ms()).dump(); },
                [this](const std::string& text) { return handle_command(text); }, config_.ui_dir);
        } catch (const boost::system::system_error& e) {
            throw BindError(fmt::format("cannot bind UI port {}: {}", config_.ui->port(), e.what()));
        }
    }
}

ReceiverService::~ReceiverService() = default;

std::optional<std::uint16_t> ReceiverService::ui_port() const {
    if (!bridge_) return std::nullopt;
    return bridge_->port();
}

void ReceiverService::start() {
    do_receive();
    arm_tick();
    if (bridge_) bridge_->start();
    push_state(clock_.now_ms());
}

void ReceiverService::stop() {
    boost::system::error_code ec;
    socket_.close(ec);
    tick_timer_.cancel();
    if (bridge_) bridge_->stop();
}

StepResult ReceiverService::dispatch(const Event& event) {
    StepResult result = step(config_.machine, state_, event);
    if (log_.is_open()) log_ << ui::log_record(event, result).dump() << '\n' << std::flush;
    const bool changed = result.state != state_;
    state_ = result.state;
    for (const auto& e : result.effects) spdlog::debug("effect {}", describe(e));
    const std::int64_t now = event_time(event);
    if (changed || !last_push_ms_ || now - *last_push_ms_ >= config_.heartbeat_ms) push_state(now);
    return result;
}

std::optional<std::string> ReceiverService::handle_command(const std::string& text) {
    auto parsed = ui::parse_command(text);
    if (auto* err = std::get_if<ui::CommandError>(&parsed)) return ui::error_message(err->reason).dump();
    const StepResult r = dispatch(ui::to_event(std::get<ui::Command>(parsed), clock_.now_ms()));
    if (r.error) return ui::error_message("invalid range").dump();
    return std::nullopt;
}

void ReceiverService::push_state(std::int64_t now_ms) {
    last_push_ms_ = now_ms;
    if (bridge_) bridge_->broadcast(ui::state_message(state_, now_ms).dump());
    if (headless_) *headless_ << ui::headless_line(state_, now_ms) << std::endl;
}

void ReceiverService::do_receive() {
    socket_.async_receive_from(asio::buffer(buffer_), peer_, [this](boost::system::error_code ec, std::size_t n) {
        if (ec == asio::error::operation_aborted || !socket_.is_open()) return;
        if (!ec) {
            auto decoded = protocol::decode(std::span(buffer_.data(), n));
            if (auto* frame = std::get_if<protocol::Frame>(&decoded)) {
                if (frame->msg_type == protocol::MsgType::Hello) {
                    spdlog::info("hello from sender {} (group {})", frame->sender_id, frame->group_id);
                }
                dispatch(FrameArrived{*frame, clock_.now_ms()});
            } else {
                ++rejected_;
                spdlog::debug("rejected datagram: {}", protocol::to_string(std::get<protocol::DecodeError>(decoded)));
            }
        }
        do_receive();
    });
}

void ReceiverService::arm_tick() {
    tick_timer_.expires_after(std::chrono::milliseconds(config_.tick_ms));
    tick_timer_.async_wait([this](boost::system::error_code ec) {
        if (ec == asio::error::operation_aborted) return;
        dispatch(Tick{clock_.now_ms()});
        arm_tick();
    });
}

}  // namespace evok::net

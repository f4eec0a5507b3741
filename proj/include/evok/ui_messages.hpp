#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "evok/receiver.hpp"

namespace evok::ui {

/// `{"type":"state", ...}` snapshot pushed to dashboard clients.
nlohmann::json state_message(const receiver::ReceiverState& state, std::int64_t now_ms);

/// `{"type":"error","reason":...}`
nlohmann::json error_message(std::string_view reason);

struct TogglePauseCommand {};
struct SetRangeCommand {
    receiver::NormalRange range;
};
using Command = std::variant<TogglePauseCommand, SetRangeCommand>;

struct CommandError {
    std::string reason;
};

/// Parses an inbound client message. Range validity is checked here so that
/// invalid ranges never reach the state machine.
std::variant<Command, CommandError> parse_command(std::string_view text);

receiver::Event to_event(const Command& cmd, std::int64_t now_ms);

/// One line for headless terminal output.
std::string headless_line(const receiver::ReceiverState& state, std::int64_t now_ms);

/// Session-log record for one processed event.
nlohmann::json log_record(const receiver::Event& event, const receiver::StepResult& result);

}  // namespace evok::ui

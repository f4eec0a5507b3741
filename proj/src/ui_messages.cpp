#include "evok/ui_messages.hpp"

#include <fmt/format.h>

namespace evok::ui {

using nlohmann::json;
using namespace evok::receiver;

namespace {

template <typename T>
json optional_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

json event_json(const Event& event) {
    return std::visit(
        [](const auto& ev) -> json {
            using T = std::decay_t<decltype(ev)>;
            if constexpr (std::is_same_v<T, FrameArrived>) {
                return {{"kind", "frame"},
                        {"t_ms", ev.now_ms},
                        {"msg_type", ev.frame.msg_type == protocol::MsgType::Hello ? "hello" : "hr_data"},
                        {"group", ev.frame.group_id},
                        {"sender", ev.frame.sender_id},
                        {"seq", ev.frame.seq},
                        {"bpm", ev.frame.bpm},
                        {"flags", ev.frame.flags}};
            } else if constexpr (std::is_same_v<T, Tick>) {
                return {{"kind", "tick"}, {"t_ms", ev.now_ms}};
            } else if constexpr (std::is_same_v<T, TogglePause>) {
                return {{"kind", "toggle_pause"}, {"t_ms", ev.now_ms}};
            } else {
                return {{"kind", "set_range"}, {"t_ms", ev.now_ms}, {"low", ev.range.low}, {"high", ev.range.high}};
            }
        },
        event);
}

}  // namespace

json state_message(const ReceiverState& state, std::int64_t now_ms) {
    return {{"type", "state"},
            {"bpm", optional_json(state.last_bpm)},
            {"zone", to_string(state.zone)},
            {"paused", state.paused},
            {"alarm", state.alarm_active},
            {"digit", optional_json(state.current_digit())},
            {"range", {{"low", state.range.low}, {"high", state.range.high}}},
            {"t_ms", now_ms}};
}

json error_message(std::string_view reason) { return {{"type", "error"}, {"reason", reason}}; }

std::variant<Command, CommandError> parse_command(std::string_view text) {
    const json msg = json::parse(text, nullptr, false);
    if (msg.is_discarded()) return CommandError{"malformed JSON"};
    if (!msg.is_object()) return CommandError{"command must be a JSON object"};
    const auto type = msg.find("type");
    if (type == msg.end() || !type->is_string()) return CommandError{"missing string field 'type'"};

    const auto& name = type->get_ref<const std::string&>();
    if (name == "toggle_pause") return TogglePauseCommand{};
    if (name == "set_range") {
        const auto low = msg.find("low");
        const auto high = msg.find("high");
        if (low == msg.end() || high == msg.end() || !low->is_number_integer() || !high->is_number_integer()) {
            return CommandError{"set_range requires integer 'low' and 'high'"};
        }
        const auto lo = low->get<std::int64_t>();
        const auto hi = high->get<std::int64_t>();
        if (lo < 30 || hi > 220 || lo >= hi) {
            return CommandError{fmt::format("range {}:{} violates 30 <= low < high <= 220", lo, hi)};
        }
        return SetRangeCommand{{static_cast<int>(lo), static_cast<int>(hi)}};
    }
    return CommandError{fmt::format("unknown command type '{}'", name)};
}

Event to_event(const Command& cmd, std::int64_t now_ms) {
    if (const auto* sr = std::get_if<SetRangeCommand>(&cmd)) return SetRange{sr->range, now_ms};
    return TogglePause{now_ms};
}

std::string headless_line(const ReceiverState& state, std::int64_t now_ms) {
    const auto digit = state.current_digit();
    return fmt::format("t_ms={} bpm={} zone={} led={} paused={} alarm={} digit={} range={}:{}", now_ms,
                       state.last_bpm ? std::to_string(*state.last_bpm) : "-", to_string(state.zone),
                       to_string(led_for(state.zone)), state.paused ? 1 : 0, state.alarm_active ? 1 : 0,
                       digit ? std::to_string(*digit) : "-", state.range.low, state.range.high);
}

json log_record(const Event& event, const StepResult& result) {
    json effects = json::array();
    for (const auto& e : result.effects) effects.push_back(describe(e));
    json rec{{"t_ms", event_time(event)},
             {"event", event_json(event)},
             {"zone", to_string(result.state.zone)},
             {"effects", std::move(effects)}};
    if (result.error) rec["error"] = "invalid_range";
    return rec;
}

}  // namespace evok::ui

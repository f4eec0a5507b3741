#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <variant>
#include <vector>

#include "evok/protocol.hpp"

namespace evok::receiver {

struct NormalRange {
    int low = 60;
    int high = 100;

    bool valid() const noexcept { return 30 <= low && low < high && high <= 220; }

    friend bool operator==(const NormalRange&, const NormalRange&) = default;
};

/// Parses "low:high". Throws std::invalid_argument on syntax or range errors.
NormalRange parse_range(std::string_view text);

enum class Zone { Low, Normal, High, Warmup, Stale, Paused };

std::string_view to_string(Zone z) noexcept;
constexpr bool is_data_zone(Zone z) noexcept { return z == Zone::Low || z == Zone::Normal || z == Zone::High; }

/// LOW below the range, NORMAL inside it (inclusive), HIGH above.
constexpr Zone classify_zone(int bpm, NormalRange range) noexcept {
    if (bpm < range.low) return Zone::Low;
    if (bpm > range.high) return Zone::High;
    return Zone::Normal;
}

enum class LedColor { Blue, Green, Red, White, Off };

std::string_view to_string(LedColor c) noexcept;
LedColor led_for(Zone z) noexcept;

/// Decimal digits of bpm, most significant first.
std::vector<int> display_sequence(int bpm);

struct SetLed {
    LedColor color;
    friend bool operator==(const SetLed&, const SetLed&) = default;
};
struct BeepOnce {
    friend bool operator==(const BeepOnce&, const BeepOnce&) = default;
};
struct AlarmStart {
    friend bool operator==(const AlarmStart&, const AlarmStart&) = default;
};
struct AlarmStop {
    friend bool operator==(const AlarmStop&, const AlarmStop&) = default;
};
struct DisplayDigit {
    int digit;
    friend bool operator==(const DisplayDigit&, const DisplayDigit&) = default;
};

using Effect = std::variant<SetLed, BeepOnce, AlarmStart, AlarmStop, DisplayDigit>;
using Effects = std::vector<Effect>;

std::string describe(const Effect& e);

struct FrameArrived {
    protocol::Frame frame;
    std::int64_t now_ms;
};
struct Tick {
    std::int64_t now_ms;
};
struct TogglePause {
    std::int64_t now_ms;
};
struct SetRange {
    NormalRange range;
    std::int64_t now_ms;
};

using Event = std::variant<FrameArrived, Tick, TogglePause, SetRange>;

std::int64_t event_time(const Event& e) noexcept;

struct ReceiverConfig {
    std::uint8_t group_id = 0;
    std::int64_t alarm_after_ms = 15000;
    std::int64_t stale_after_ms = 5000;
    std::int64_t digit_tick_ms = 500;
};

struct ReceiverState {
    Zone zone = Zone::Stale;
    std::optional<int> last_bpm;
    bool paused = false;
    std::optional<std::int64_t> high_since_ms;
    bool alarm_active = false;
    std::optional<std::int64_t> last_frame_ms;
    std::optional<std::uint32_t> last_seq;
    NormalRange range{};
    std::vector<int> display_queue;
    std::size_t display_pos = 0;
    std::int64_t display_since_ms = 0;

    std::optional<int> current_digit() const noexcept {
        if (display_queue.empty()) return std::nullopt;
        return display_queue[display_pos];
    }

    friend bool operator==(const ReceiverState&, const ReceiverState&) = default;
};

enum class StepError { InvalidRange };

struct StepResult {
    ReceiverState state;
    Effects effects;
    std::optional<StepError> error;
};

/// Pure transition function of the notification state machine.
StepResult step(const ReceiverConfig& config, const ReceiverState& state, const Event& event);

}  // namespace evok::receiver

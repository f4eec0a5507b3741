#include "evok/receiver.hpp"

#include <charconv>
#include <string>

#include <fmt/format.h>

namespace evok::receiver {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

class Transition {
public:
    Transition(const ReceiverConfig& config, const ReceiverState& state) : cfg_(config), s_(state) {}

    StepResult finish() && { return {std::move(s_), std::move(fx_), std::nullopt}; }

    void on(const FrameArrived& ev) {
        const auto& frame = ev.frame;
        if (frame.group_id != cfg_.group_id || protocol::validate(frame)) return;
        s_.last_frame_ms = ev.now_ms;
        if (s_.paused) return;
        if (!protocol::accepts(cfg_.group_id, s_.last_seq, frame)) return;
        s_.last_seq = frame.seq;
        advance_display(ev.now_ms);
        if (frame.msg_type == protocol::MsgType::Hello) return;

        if (frame.bpm == 0 || frame.flags != 0) {
            reset_high();
            s_.last_bpm.reset();
            set_zone(Zone::Warmup);
            clear_display();
            return;
        }
        s_.last_bpm = frame.bpm;
        apply_bpm(frame.bpm, ev.now_ms);
        show(frame.bpm, ev.now_ms);
    }

    void on(const Tick& ev) {
        advance_display(ev.now_ms);
        if (s_.paused) return;
        if (s_.last_frame_ms && ev.now_ms - *s_.last_frame_ms > cfg_.stale_after_ms && s_.zone != Zone::Stale) {
            reset_high();
            set_zone(Zone::Stale);
            clear_display();
            return;
        }
        check_alarm(ev.now_ms);
    }

    void on(const TogglePause&) {
        reset_high();
        clear_display();
        s_.paused = !s_.paused;
        set_zone(s_.paused ? Zone::Paused : Zone::Stale);
    }

    void on(const SetRange& ev) {
        s_.range = ev.range;
        if (!s_.paused && is_data_zone(s_.zone) && s_.last_bpm) apply_bpm(*s_.last_bpm, ev.now_ms);
    }

private:
    void set_zone(Zone z) {
        if (led_for(z) != led_for(s_.zone)) fx_.emplace_back(SetLed{led_for(z)});
        s_.zone = z;
    }

    void reset_high() {
        s_.high_since_ms.reset();
        if (s_.alarm_active) {
            s_.alarm_active = false;
            fx_.emplace_back(AlarmStop{});
        }
    }

    void apply_bpm(int bpm, std::int64_t now_ms) {
        const Zone previous = s_.zone;
        const Zone next = classify_zone(bpm, s_.range);
        set_zone(next);
        if (next != Zone::High) {
            reset_high();
            return;
        }
        if (previous == Zone::Low || previous == Zone::Normal) fx_.emplace_back(BeepOnce{});
        if (!s_.high_since_ms) s_.high_since_ms = now_ms;
        check_alarm(now_ms);
    }

    void check_alarm(std::int64_t now_ms) {
        if (s_.zone == Zone::High && !s_.paused && !s_.alarm_active && s_.high_since_ms &&
            now_ms - *s_.high_since_ms >= cfg_.alarm_after_ms) {
            s_.alarm_active = true;
            fx_.emplace_back(AlarmStart{});
        }
    }

    void show(int bpm, std::int64_t now_ms) {
        auto digits = display_sequence(bpm);
        if (digits == s_.display_queue) return;
        s_.display_queue = std::move(digits);
        s_.display_pos = 0;
        s_.display_since_ms = now_ms;
        fx_.emplace_back(DisplayDigit{s_.display_queue.front()});
    }

    void advance_display(std::int64_t now_ms) {
        if (s_.display_queue.empty() || cfg_.digit_tick_ms <= 0) return;
        const std::int64_t ticks = (now_ms - s_.display_since_ms) / cfg_.digit_tick_ms;
        if (ticks <= 0) return;
        s_.display_pos = (s_.display_pos + static_cast<std::size_t>(ticks)) % s_.display_queue.size();
        s_.display_since_ms += ticks * cfg_.digit_tick_ms;
        fx_.emplace_back(DisplayDigit{s_.display_queue[s_.display_pos]});
    }

    void clear_display() {
        s_.display_queue.clear();
        s_.display_pos = 0;
    }

    const ReceiverConfig& cfg_;
    ReceiverState s_;
    Effects fx_;
};

}  // namespace

NormalRange parse_range(std::string_view text) {
    const auto colon = text.find(':');
    NormalRange r{};
    if (colon == std::string_view::npos) throw std::invalid_argument("range must look like LOW:HIGH");
    const auto parse = [](std::string_view part, int& out) {
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
        return ec == std::errc{} && ptr == part.data() + part.size() && !part.empty();
    };
    if (!parse(text.substr(0, colon), r.low) || !parse(text.substr(colon + 1), r.high)) {
        throw std::invalid_argument("range must look like LOW:HIGH");
    }
    if (!r.valid()) throw std::invalid_argument(fmt::format("range {}:{} violates 30 <= low < high <= 220", r.low, r.high));
    return r;
}

std::string_view to_string(Zone z) noexcept {
    switch (z) {
        case Zone::Low: return "low";
        case Zone::Normal: return "normal";
        case Zone::High: return "high";
        case Zone::Warmup: return "warmup";
        case Zone::Stale: return "stale";
        case Zone::Paused: return "paused";
    }
    return "unknown";
}

std::string_view to_string(LedColor c) noexcept {
    switch (c) {
        case LedColor::Blue: return "blue";
        case LedColor::Green: return "green";
        case LedColor::Red: return "red";
        case LedColor::White: return "white";
        case LedColor::Off: return "off";
    }
    return "unknown";
}

LedColor led_for(Zone z) noexcept {
    switch (z) {
        case Zone::Low: return LedColor::Blue;
        case Zone::Normal: return LedColor::Green;
        case Zone::High: return LedColor::Red;
        case Zone::Warmup: return LedColor::White;
        case Zone::Stale:
        case Zone::Paused: return LedColor::Off;
    }
    return LedColor::Off;
}

std::vector<int> display_sequence(int bpm) {
    if (bpm <= 0) return {0};
    std::vector<int> digits;
    for (; bpm > 0; bpm /= 10) digits.insert(digits.begin(), bpm % 10);
    return digits;
}

std::string describe(const Effect& e) {
    return std::visit(overloaded{
                          [](const SetLed& v) { return fmt::format("led:{}", to_string(v.color)); },
                          [](const BeepOnce&) { return std::string("beep"); },
                          [](const AlarmStart&) { return std::string("alarm_start"); },
                          [](const AlarmStop&) { return std::string("alarm_stop"); },
                          [](const DisplayDigit& v) { return fmt::format("digit:{}", v.digit); },
                      },
                      e);
}

std::int64_t event_time(const Event& e) noexcept {
    return std::visit([](const auto& ev) { return ev.now_ms; }, e);
}

StepResult step(const ReceiverConfig& config, const ReceiverState& state, const Event& event) {
    if (const auto* sr = std::get_if<SetRange>(&event); sr && !sr->range.valid()) {
        return {state, {}, StepError::InvalidRange};
    }
    Transition t(config, state);
    std::visit([&t](const auto& ev) { t.on(ev); }, event);
    return std::move(t).finish();
}

}  // namespace evok::receiver

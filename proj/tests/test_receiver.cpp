#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "evok/receiver.hpp"

using namespace evok::receiver;
namespace proto = evok::protocol;

namespace {

constexpr std::uint8_t kGroup = 7;

ReceiverConfig config() {
    ReceiverConfig c;
    c.group_id = kGroup;
    return c;
}

FrameArrived hr(std::uint32_t seq, int bpm, std::int64_t t, std::uint8_t flags = 0) {
    proto::Frame f{.group_id = kGroup, .seq = seq, .timestamp_ms = static_cast<std::uint64_t>(t),
                   .bpm = static_cast<std::uint16_t>(bpm), .flags = flags};
    return {f, t};
}

bool contains(const Effects& effects, const Effect& e) {
    return std::find(effects.begin(), effects.end(), e) != effects.end();
}

template <class T>
int count_of(const Effects& effects) {
    return static_cast<int>(std::count_if(effects.begin(), effects.end(),
                                          [](const Effect& e) { return std::holds_alternative<T>(e); }));
}

/// Runs events in order, returning the final state and all effects.
struct Trace {
    ReceiverState state;
    std::vector<Effects> effects;
    std::vector<ReceiverState> states;
};

Trace drive(const std::vector<Event>& events, ReceiverState s = {}) {
    Trace t;
    const auto cfg = config();
    for (const auto& ev : events) {
        auto r = step(cfg, s, ev);
        s = r.state;
        t.effects.push_back(r.effects);
        t.states.push_back(s);
    }
    t.state = s;
    return t;
}

void check_invariants(const ReceiverState& s) {
    if (s.alarm_active) {
        EXPECT_EQ(s.zone, Zone::High);
        EXPECT_FALSE(s.paused);
    }
    if (s.paused) {
        EXPECT_EQ(s.zone, Zone::Paused);
        EXPECT_FALSE(s.alarm_active);
        EXPECT_FALSE(s.high_since_ms);
    }
    if (s.high_since_ms) EXPECT_EQ(s.zone, Zone::High);
    if (!s.display_queue.empty()) EXPECT_LT(s.display_pos, s.display_queue.size());
}

/// Random event stream with reordering, duplicates, foreign groups and pauses.
std::vector<Event> random_events(std::mt19937_64& gen, int n) {
    std::vector<Event> events;
    std::int64_t t = 0;
    std::uint32_t seq = static_cast<std::uint32_t>(gen());
    for (int i = 0; i < n; ++i) {
        t += static_cast<std::int64_t>(gen() % 1500);
        const auto kind = gen() % 20;
        if (kind < 12) {
            const int bpm = gen() % 8 == 0 ? 0 : 40 + static_cast<int>(gen() % 120);
            const std::uint8_t flags = bpm == 0 ? static_cast<std::uint8_t>(1 + gen() % 3) : 0;
            // mostly increasing, sometimes stale or repeated
            const std::uint32_t s = gen() % 6 == 0 ? seq - static_cast<std::uint32_t>(gen() % 4) : ++seq;
            auto f = hr(s, bpm, t, flags);
            if (gen() % 15 == 0) f.frame.group_id = kGroup + 1;
            events.push_back(f);
        } else if (kind < 17) {
            events.push_back(Tick{t});
        } else if (kind < 19) {
            events.push_back(TogglePause{t});
        } else {
            const int lo = 30 + static_cast<int>(gen() % 100);
            const int hi = gen() % 5 == 0 ? lo : lo + 1 + static_cast<int>(gen() % 80);
            events.push_back(SetRange{{lo, std::min(hi, 230)}, t});
        }
    }
    return events;
}

}  // namespace

TEST(Zones, Examples) {
    const NormalRange r{60, 100};
    EXPECT_EQ(classify_zone(59, r), Zone::Low);
    EXPECT_EQ(classify_zone(60, r), Zone::Normal);
    EXPECT_EQ(classify_zone(100, r), Zone::Normal);
    EXPECT_EQ(classify_zone(101, r), Zone::High);
    EXPECT_EQ(classify_zone(130, r), Zone::High);
    EXPECT_EQ(led_for(Zone::Low), LedColor::Blue);
    EXPECT_EQ(led_for(Zone::Normal), LedColor::Green);
    EXPECT_EQ(led_for(Zone::High), LedColor::Red);
    EXPECT_EQ(led_for(Zone::Warmup), LedColor::White);
    EXPECT_EQ(led_for(Zone::Stale), LedColor::Off);
    EXPECT_EQ(led_for(Zone::Paused), LedColor::Off);
}

TEST(Zones, PartitionForEveryValidRange) {
    for (int lo = 30; lo <= 219; lo += 7) {
        for (int hi = lo + 1; hi <= 220; hi += 11) {
            const NormalRange r{lo, hi};
            ASSERT_TRUE(r.valid());
            Zone prev = Zone::Low;
            for (int bpm = 30; bpm <= 240; ++bpm) {
                const Zone z = classify_zone(bpm, r);
                ASSERT_TRUE(is_data_zone(z));
                ASSERT_GE(static_cast<int>(z), static_cast<int>(prev)) << "not monotone at " << bpm;
                ASSERT_EQ(z == Zone::Normal, lo <= bpm && bpm <= hi);
                prev = z;
            }
        }
    }
}

TEST(Range, ParseAndValidate) {
    EXPECT_EQ(parse_range("60:100"), (NormalRange{60, 100}));
    EXPECT_EQ(parse_range("30:220"), (NormalRange{30, 220}));
    for (const char* bad : {"100:60", "60:60", "29:100", "60:221", "60-100", "", "a:b", "60:", "60:100:1"}) {
        EXPECT_THROW(parse_range(bad), std::invalid_argument) << bad;
    }
}

TEST(Display, DigitSequences) {
    EXPECT_EQ(display_sequence(30), (std::vector<int>{3, 0}));
    EXPECT_EQ(display_sequence(65), (std::vector<int>{6, 5}));
    EXPECT_EQ(display_sequence(130), (std::vector<int>{1, 3, 0}));
    EXPECT_EQ(display_sequence(240), (std::vector<int>{2, 4, 0}));
}

TEST(Display, CyclesEveryDigitTick) {
    auto t = drive({hr(1, 130, 0), Tick{400}, Tick{500}, Tick{1000}, Tick{1500}});
    EXPECT_EQ(t.states[0].current_digit(), 1);
    EXPECT_EQ(t.states[1].current_digit(), 1);
    EXPECT_EQ(t.states[2].current_digit(), 3);
    EXPECT_TRUE(contains(t.effects[2], DisplayDigit{3}));
    EXPECT_EQ(t.states[3].current_digit(), 0);
    EXPECT_EQ(t.states[4].current_digit(), 1);
}

TEST(Receiver, FirstFrameLightsZone) {
    const auto r = step(config(), {}, hr(1, 80, 0));
    EXPECT_EQ(r.state.zone, Zone::Normal);
    EXPECT_EQ(r.state.last_bpm, 80);
    EXPECT_TRUE(contains(r.effects, SetLed{LedColor::Green}));
    EXPECT_TRUE(contains(r.effects, DisplayDigit{8}));
    EXPECT_EQ(count_of<BeepOnce>(r.effects), 0);
}

TEST(Receiver, NormalToHighBeepsOnceAndTurnsRed) {
    auto t = drive({hr(1, 80, 0), hr(2, 120, 1000), hr(3, 125, 2000), hr(4, 130, 3000)});
    EXPECT_TRUE(contains(t.effects[1], BeepOnce{}));
    EXPECT_TRUE(contains(t.effects[1], SetLed{LedColor::Red}));
    EXPECT_EQ(count_of<BeepOnce>(t.effects[2]) + count_of<BeepOnce>(t.effects[3]), 0);
}

TEST(Receiver, NoBeepEnteringHighFromWarmupOrStale) {
    auto t = drive({hr(1, 0, 0, proto::flags::kWarmup), hr(2, 130, 1000)});
    EXPECT_EQ(t.state.zone, Zone::High);
    EXPECT_EQ(count_of<BeepOnce>(t.effects[1]), 0);
    auto u = drive({hr(1, 130, 0)});
    EXPECT_EQ(count_of<BeepOnce>(u.effects[0]), 0);
}

TEST(Receiver, AlarmAfterFifteenSecondsOfHigh) {
    std::vector<Event> events;
    for (int i = 0; i <= 20; ++i) events.push_back(hr(i + 1, 110, i * 1000));
    auto t = drive(events);
    for (int i = 0; i <= 20; ++i) {
        EXPECT_EQ(count_of<AlarmStart>(t.effects[i]), i == 15 ? 1 : 0) << "t=" << i * 1000;
        EXPECT_EQ(t.states[i].alarm_active, i >= 15);
    }
}

TEST(Receiver, AlarmStartsOnTickWithoutNewFrames) {
    auto t = drive({hr(1, 110, 0), hr(2, 110, 4000), Tick{4500}, hr(3, 110, 9000), hr(4, 110, 14000), Tick{15000}});
    EXPECT_EQ(count_of<AlarmStart>(t.effects.back()), 1);
    EXPECT_TRUE(t.state.alarm_active);
}

TEST(Receiver, AlarmStopsWhenLeavingHigh) {
    std::vector<Event> events;
    for (int i = 0; i <= 16; ++i) events.push_back(hr(i + 1, 110, i * 1000));
    events.push_back(hr(18, 95, 17000));
    auto t = drive(events);
    EXPECT_TRUE(contains(t.effects.back(), AlarmStop{}));
    EXPECT_TRUE(contains(t.effects.back(), SetLed{LedColor::Green}));
    EXPECT_FALSE(t.state.alarm_active);
    EXPECT_FALSE(t.state.high_since_ms);
}

TEST(Receiver, BriefDipRestartsAlarmTimer) {
    std::vector<Event> events;
    std::uint32_t seq = 1;
    for (int i = 0; i < 10; ++i) events.push_back(hr(seq++, 110, i * 1000));
    events.push_back(hr(seq++, 90, 10000));
    for (int i = 11; i <= 30; ++i) events.push_back(hr(seq++, 110, i * 1000));
    auto t = drive(events);
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (count_of<AlarmStart>(t.effects[i])) EXPECT_EQ(event_time(events[i]), 26000);
    }
    EXPECT_TRUE(t.state.alarm_active);
}

TEST(Receiver, PauseIgnoresFramesThenResumes) {
    std::vector<Event> events{hr(1, 80, 0), TogglePause{100}};
    for (int i = 0; i < 30; ++i) events.push_back(hr(2 + i, 150, 1000 + i * 1000));
    auto t = drive(events);
    const auto& paused = t.states[1];
    EXPECT_EQ(paused.zone, Zone::Paused);
    EXPECT_TRUE(contains(t.effects[1], SetLed{LedColor::Off}));
    for (std::size_t i = 2; i < events.size(); ++i) {
        EXPECT_TRUE(t.effects[i].empty());
        EXPECT_EQ(t.states[i].zone, Zone::Paused);
        EXPECT_EQ(t.states[i].last_bpm, 80);
    }
    auto r = step(config(), t.state, TogglePause{31000});
    EXPECT_EQ(r.state.zone, Zone::Stale);
    EXPECT_FALSE(r.state.paused);
    auto g = step(config(), r.state, hr(40, 70, 31500));
    EXPECT_EQ(g.state.zone, Zone::Normal);
    EXPECT_TRUE(contains(g.effects, SetLed{LedColor::Green}));
}

TEST(Receiver, PauseClearsAlarm) {
    std::vector<Event> events;
    for (int i = 0; i <= 16; ++i) events.push_back(hr(i + 1, 110, i * 1000));
    events.push_back(TogglePause{16500});
    auto t = drive(events);
    EXPECT_TRUE(contains(t.effects.back(), AlarmStop{}));
    EXPECT_FALSE(t.state.alarm_active);
    EXPECT_FALSE(t.state.high_since_ms);
}

TEST(Receiver, StaleAfterFiveSecondsOfSilence) {
    auto t = drive({hr(1, 80, 0), Tick{5000}, Tick{6000}});
    EXPECT_EQ(t.states[1].zone, Zone::Normal);
    EXPECT_EQ(t.states[2].zone, Zone::Stale);
    EXPECT_TRUE(contains(t.effects[2], SetLed{LedColor::Off}));
    EXPECT_TRUE(t.state.display_queue.empty());
}

TEST(Receiver, StaleStopsAlarm) {
    std::vector<Event> events;
    for (int i = 0; i <= 16; ++i) events.push_back(hr(i + 1, 110, i * 1000));
    events.push_back(Tick{22000});
    auto t = drive(events);
    EXPECT_EQ(t.state.zone, Zone::Stale);
    EXPECT_TRUE(contains(t.effects.back(), AlarmStop{}));
    EXPECT_FALSE(t.state.alarm_active);
}

TEST(Receiver, FlaggedFramesShowWarmup) {
    auto t = drive({hr(1, 80, 0), hr(2, 0, 1000, proto::flags::kContactLost)});
    EXPECT_EQ(t.state.zone, Zone::Warmup);
    EXPECT_FALSE(t.state.last_bpm);
    EXPECT_TRUE(contains(t.effects[1], SetLed{LedColor::White}));
}

TEST(Receiver, ForeignGroupAndInvalidFramesIgnored) {
    auto s = step(config(), {}, hr(1, 80, 0)).state;
    auto foreign = hr(2, 150, 1000);
    foreign.frame.group_id = kGroup + 1;
    auto r = step(config(), s, foreign);
    EXPECT_EQ(r.state, s);
    EXPECT_TRUE(r.effects.empty());

    auto bad = hr(3, 250, 1000);
    r = step(config(), s, bad);
    EXPECT_EQ(r.state, s);
}

TEST(Receiver, StaleSequenceRefreshesLivenessOnly) {
    auto s = step(config(), {}, hr(10, 80, 0)).state;
    auto r = step(config(), s, hr(9, 150, 4000));
    EXPECT_EQ(r.state.zone, Zone::Normal);
    EXPECT_EQ(r.state.last_bpm, 80);
    EXPECT_EQ(r.state.last_frame_ms, 4000);
    EXPECT_TRUE(r.effects.empty());
    // liveness kept the display alive past 5 s from the last accepted frame
    EXPECT_EQ(step(config(), r.state, Tick{6000}).state.zone, Zone::Normal);
}

TEST(Receiver, SetRangeReclassifies) {
    auto s = step(config(), {}, hr(1, 110, 0)).state;
    EXPECT_EQ(s.zone, Zone::High);
    auto r = step(config(), s, SetRange{{80, 120}, 100});
    EXPECT_EQ(r.state.zone, Zone::Normal);
    EXPECT_EQ(r.state.range, (NormalRange{80, 120}));
    EXPECT_TRUE(contains(r.effects, SetLed{LedColor::Green}));
    EXPECT_FALSE(r.error);
}

TEST(Receiver, InvalidRangeIsRejected) {
    auto s = step(config(), {}, hr(1, 110, 0)).state;
    for (NormalRange bad : {NormalRange{120, 80}, NormalRange{20, 80}, NormalRange{60, 230}, NormalRange{90, 90}}) {
        auto r = step(config(), s, SetRange{bad, 100});
        EXPECT_EQ(r.error, StepError::InvalidRange);
        EXPECT_EQ(r.state, s);
        EXPECT_TRUE(r.effects.empty());
    }
}

TEST(Receiver, RangeChangeWhilePausedAppliesOnResume) {
    auto t = drive({hr(1, 110, 0), TogglePause{100}, SetRange{{80, 120}, 200}, TogglePause{300}, hr(2, 110, 400)});
    EXPECT_EQ(t.states[2].zone, Zone::Paused);
    EXPECT_EQ(t.state.zone, Zone::Normal);
}

// --- properties -------------------------------------------------------------

TEST(ReceiverProperty, InvariantsHoldOnRandomStreams) {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 300; ++trial) {
        auto t = drive(random_events(gen, 200));
        for (const auto& s : t.states) check_invariants(s);
    }
}

TEST(ReceiverProperty, StepIsPure) {
    std::mt19937_64 gen(12);
    for (int trial = 0; trial < 100; ++trial) {
        const auto events = random_events(gen, 100);
        ReceiverState s;
        for (const auto& ev : events) {
            const ReceiverState before = s;
            auto a = step(config(), s, ev);
            auto b = step(config(), s, ev);
            ASSERT_EQ(s, before);
            ASSERT_EQ(a.state, b.state);
            ASSERT_EQ(a.effects, b.effects);
            s = a.state;
        }
    }
}

TEST(ReceiverProperty, BeepsMatchEntriesIntoHighFromDataZone) {
    std::mt19937_64 gen(13);
    for (int trial = 0; trial < 300; ++trial) {
        const auto events = random_events(gen, 200);
        auto t = drive(events);
        ReceiverState prev;
        for (std::size_t i = 0; i < events.size(); ++i) {
            const bool entered = (prev.zone == Zone::Low || prev.zone == Zone::Normal) && t.states[i].zone == Zone::High;
            ASSERT_EQ(count_of<BeepOnce>(t.effects[i]), entered ? 1 : 0);
            prev = t.states[i];
        }
    }
}

TEST(ReceiverProperty, AlarmHysteresis) {
    std::mt19937_64 gen(14);
    for (int trial = 0; trial < 300; ++trial) {
        const auto events = random_events(gen, 300);
        auto t = drive(events);
        ReceiverState prev;
        for (std::size_t i = 0; i < events.size(); ++i) {
            const auto& s = t.states[i];
            const auto now = event_time(events[i]);
            if (count_of<AlarmStart>(t.effects[i])) {
                ASSERT_TRUE(prev.high_since_ms || s.high_since_ms);
                ASSERT_GE(now - *s.high_since_ms, 15000);
                ASSERT_FALSE(prev.alarm_active);
            }
            if (s.alarm_active && s.high_since_ms) ASSERT_GE(now - *s.high_since_ms, 15000);
            if (prev.alarm_active && !s.alarm_active) ASSERT_EQ(count_of<AlarmStop>(t.effects[i]), 1);
            prev = s;
        }
    }
}

TEST(ReceiverProperty, DoublePauseIsIdentityOnDisplayedZone) {
    std::mt19937_64 gen(15);
    for (int trial = 0; trial < 200; ++trial) {
        auto s = drive(random_events(gen, 50)).state;
        if (s.paused) continue;
        const auto now = s.last_frame_ms.value_or(0) + 1;
        auto once = step(config(), s, TogglePause{now}).state;
        auto twice = step(config(), once, TogglePause{now}).state;
        ASSERT_TRUE(once.paused);
        ASSERT_FALSE(twice.paused);
        ASSERT_EQ(twice.last_bpm, s.last_bpm);
        ASSERT_EQ(twice.range, s.range);
        ASSERT_FALSE(twice.alarm_active);
    }
}

TEST(ReceiverProperty, DuplicatesAndReordersEquivalentToAcceptedSubsequence) {
    // Feeding a disordered stream must match feeding only the frames that pass
    // `accepts`, as far as the displayed zone and bpm are concerned.
    std::mt19937_64 gen(16);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<Event> noisy, clean;
        std::optional<std::uint32_t> last;
        std::uint32_t seq = static_cast<std::uint32_t>(gen());
        std::int64_t t = 0;
        for (int i = 0; i < 100; ++i) {
            t += 200 + static_cast<std::int64_t>(gen() % 800);
            const std::uint32_t s = gen() % 4 == 0 ? seq - static_cast<std::uint32_t>(gen() % 5) : ++seq;
            const auto ev = hr(s, 40 + static_cast<int>(gen() % 120), t);
            noisy.push_back(ev);
            if (proto::accepts(kGroup, last, ev.frame)) {
                clean.push_back(ev);
                last = s;
            }
        }
        const auto a = drive(noisy);
        const auto b = drive(clean);
        ASSERT_EQ(a.state.zone, b.state.zone);
        ASSERT_EQ(a.state.last_bpm, b.state.last_bpm);
        ASSERT_EQ(a.state.last_seq, b.state.last_seq);
        ASSERT_EQ(a.state.alarm_active, b.state.alarm_active);
        ASSERT_EQ(a.state.high_since_ms, b.state.high_since_ms);
    }
}

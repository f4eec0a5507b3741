#pragma once

#include <cstdint>
#include <queue>
#include <span>
#include <vector>

#include "evok/protocol.hpp"
#include "evok/rng.hpp"

namespace evok::link {

struct LinkImpairment {
    double drop_prob = 0.0;
    std::int64_t delay_base_ms = 0;
    std::int64_t delay_jitter_ms = 0;
    double duplicate_prob = 0.0;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument on probabilities outside [0, 1], negative
    /// delays or jitter above 1000 ms.
    void validate() const;
};

/// Outcome for a single inbound datagram: zero, one or two delivery delays.
struct Decision {
    bool dropped = false;
    bool duplicated = false;
    std::int64_t delay_ms = 0;       ///< original copy
    std::int64_t dup_delay_ms = 0;   ///< second copy, when duplicated
};

/// Per-datagram impairment decisions drawn from one xoshiro256** stream.
///
/// Draw order for each datagram:
///   1. drop draw u; dropped iff u < drop_prob. A dropped datagram consumes nothing more.
///   2. duplicate draw u; duplicated iff u < duplicate_prob. Skipped when duplicate_prob == 0.
///   3. jitter draw for the original, floor(u * (jitter + 1)). Skipped when jitter == 0.
///   4. jitter draw for the copy, only when duplicated and jitter > 0.
class ImpairmentModel {
public:
    explicit ImpairmentModel(LinkImpairment imp);

    Decision next();
    const LinkImpairment& impairment() const noexcept { return imp_; }

private:
    LinkImpairment imp_;
    Rng rng_;
};

struct Datagram {
    std::int64_t send_ms = 0;
    std::vector<std::uint8_t> bytes;
};

struct Delivery {
    std::int64_t deliver_ms = 0;
    std::size_t input_index = 0;  ///< position in the input sequence
    bool duplicate = false;
    std::vector<std::uint8_t> bytes;

    friend bool operator==(const Delivery&, const Delivery&) = default;
};

/// Time-ordered delay queue; equal delivery times leave in insertion order.
class DelayQueue {
public:
    void push(Delivery d);
    bool empty() const noexcept { return heap_.empty(); }
    std::size_t size() const noexcept { return heap_.size(); }
    std::int64_t next_time() const { return heap_.top().delivery.deliver_ms; }
    Delivery pop();

private:
    struct Entry {
        Delivery delivery;
        std::uint64_t order;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const noexcept {
            if (a.delivery.deliver_ms != b.delivery.deliver_ms) return a.delivery.deliver_ms > b.delivery.deliver_ms;
            return a.order > b.order;
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
    std::uint64_t counter_ = 0;
};

/// Pure in-process channel: the schedule a proxy with the same impairment would
/// produce for datagrams arriving at `send_ms`. Send times must be non-decreasing.
std::vector<Delivery> simulate_session(std::span<const Datagram> input, const LinkImpairment& imp);

struct TimedFrame {
    std::int64_t send_ms = 0;
    protocol::Frame frame;
};

std::vector<Delivery> simulate_session(std::span<const TimedFrame> frames, const LinkImpairment& imp);

}  // namespace evok::link
